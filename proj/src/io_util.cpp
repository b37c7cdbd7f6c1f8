#include "declip/io_util.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "declip/error.hpp"
#include "declip/rng.hpp"

namespace declip::io {

namespace {
constexpr char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}
} // namespace

std::string base64_encode(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::string out;
    out.reserve((n + 2) / 3 * 4);
    for (std::size_t i = 0; i < n; i += 3) {
        unsigned v = static_cast<unsigned>(p[i]) << 16;
        if (i + 1 < n) v |= static_cast<unsigned>(p[i + 1]) << 8;
        if (i + 2 < n) v |= static_cast<unsigned>(p[i + 2]);
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(i + 1 < n ? kB64Alphabet[(v >> 6) & 63] : '=');
        out.push_back(i + 2 < n ? kB64Alphabet[v & 63] : '=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0) raise(Errc::corrupt_blob, "base64 payload length not a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=') {
                if (i + 4 != text.size() || k < 2) raise(Errc::corrupt_blob, "stray base64 padding");
                vals[k] = 0;
                ++pad;
            } else {
                if (pad > 0) raise(Errc::corrupt_blob, "base64 data after padding");
                vals[k] = b64_value(c);
                if (vals[k] < 0) raise(Errc::corrupt_blob, "invalid base64 character");
            }
        }
        const unsigned v = (unsigned(vals[0]) << 18) | (unsigned(vals[1]) << 12) |
                           (unsigned(vals[2]) << 6) | unsigned(vals[3]);
        out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }
    return out;
}

void append_f32_le(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    out.push_back(static_cast<char>(bits & 0xFF));
    out.push_back(static_cast<char>((bits >> 8) & 0xFF));
    out.push_back(static_cast<char>((bits >> 16) & 0xFF));
    out.push_back(static_cast<char>((bits >> 24) & 0xFF));
}

std::vector<std::uint8_t> f32_to_le(const std::vector<double>& values) {
    std::vector<std::uint8_t> out;
    out.reserve(values.size() * 4);
    for (double d : values) {
        const float f = static_cast<float>(d);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        out.push_back(static_cast<std::uint8_t>(bits & 0xFF));
        out.push_back(static_cast<std::uint8_t>((bits >> 8) & 0xFF));
        out.push_back(static_cast<std::uint8_t>((bits >> 16) & 0xFF));
        out.push_back(static_cast<std::uint8_t>((bits >> 24) & 0xFF));
    }
    return out;
}

std::vector<double> le_to_f64(const std::uint8_t* bytes, std::size_t n_bytes) {
    if (n_bytes % 4 != 0) raise(Errc::corrupt_blob, "float32 blob length not a multiple of 4");
    std::vector<double> out(n_bytes / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::uint32_t bits = std::uint32_t(bytes[4 * i]) | (std::uint32_t(bytes[4 * i + 1]) << 8) |
                                   (std::uint32_t(bytes[4 * i + 2]) << 16) |
                                   (std::uint32_t(bytes[4 * i + 3]) << 24);
        float f;
        std::memcpy(&f, &bits, 4);
        out[i] = static_cast<double>(f);
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in.good() && !in.eof()) raise(Errc::io_error, "read failure: " + path);
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::io_error, "cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.good()) raise(Errc::io_error, "write failure: " + path);
}

void snap_f32(std::vector<double>& values) {
    for (double& v : values) v = snap_f32(v);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::uint64_t file_hash(const std::string& path) {
    const std::string bytes = read_file(path);
    return rng::fnv1a64(bytes.data(), bytes.size());
}

} // namespace declip::io
