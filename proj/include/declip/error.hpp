#pragma once

#include <stdexcept>
#include <string>

namespace declip {

// Domain error codes surfaced by library operations. The CLI maps any
// declip::Error to exit code 1; usage problems exit with 2.
enum class Errc {
    unknown_key,
    dimension_mismatch,
    remote_unavailable,
    empty_text,
    malformed_line,
    duplicate_image_ref,
    malformed_response,
    client_unavailable,
    empty_field,
    io_error,
    version_mismatch,
    corrupt_blob,
    invalid_mode,
    unknown_attribute,
    length_mismatch,
    degenerate_batch,
    non_finite,
    dataset_too_small,
    invalid_argument,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace declip
