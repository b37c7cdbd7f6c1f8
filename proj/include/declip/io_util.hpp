#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace declip::io {

std::string base64_encode(const void* data, std::size_t n);
std::vector<std::uint8_t> base64_decode(const std::string& text); // throws Errc::corrupt_blob

// float32 <-> little-endian bytes, independent of host endianness.
void append_f32_le(std::string& out, float v);
std::vector<std::uint8_t> f32_to_le(const std::vector<double>& values);
std::vector<double> le_to_f64(const std::uint8_t* bytes, std::size_t n_bytes);

std::string read_file(const std::string& path);          // throws Errc::io_error
void write_file(const std::string& path, const std::string& content);

// Rounds a double through float32 so the value survives a float32 blob
// round-trip bit-for-bit.
inline double snap_f32(double v) { return static_cast<double>(static_cast<float>(v)); }
void snap_f32(std::vector<double>& values);

std::string hex64(std::uint64_t v);
std::uint64_t file_hash(const std::string& path); // FNV-1a of the file bytes

} // namespace declip::io
