#include "declip/image.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstring>

#include "declip/error.hpp"
#include "declip/io_util.hpp"

namespace declip {

Image make_image(int width, int height, std::uint8_t fill) {
    Image img;
    img.width = width;
    img.height = height;
    img.rgb.assign(static_cast<std::size_t>(width) * height * 3, fill);
    return img;
}

namespace {

// Skips whitespace and '#' comments in a PNM header.
std::size_t pnm_token(const std::string& s, std::size_t pos, std::string& tok) {
    while (pos < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[pos]))) {
            ++pos;
        } else if (s[pos] == '#') {
            while (pos < s.size() && s[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    tok.clear();
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))) tok.push_back(s[pos++]);
    if (tok.empty()) raise(Errc::corrupt_blob, "truncated PNM header");
    return pos;
}

int parse_pnm_int(const std::string& tok) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        raise(Errc::corrupt_blob, "bad PNM header field: " + tok);
    return std::stoi(tok);
}

struct PngReadCtx {
    const std::string* bytes;
    std::size_t pos;
};

void png_read_fn(png_structp png, png_bytep out, png_size_t n) {
    auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
    if (ctx->pos + n > ctx->bytes->size()) png_error(png, "unexpected end of PNG data");
    std::memcpy(out, ctx->bytes->data() + ctx->pos, n);
    ctx->pos += n;
}

} // namespace

Image decode_ppm(const std::string& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '6' && bytes[1] != '5'))
        raise(Errc::corrupt_blob, "not a binary PPM/PGM file");
    const bool gray = bytes[1] == '5';
    std::string tok;
    std::size_t pos = 2;
    pos = pnm_token(bytes, pos, tok);
    const int width = parse_pnm_int(tok);
    pos = pnm_token(bytes, pos, tok);
    const int height = parse_pnm_int(tok);
    pos = pnm_token(bytes, pos, tok);
    const int maxval = parse_pnm_int(tok);
    if (width <= 0 || height <= 0) raise(Errc::corrupt_blob, "bad PNM dimensions");
    if (maxval != 255) raise(Errc::corrupt_blob, "only 8-bit PNM supported");
    if (pos >= bytes.size()) raise(Errc::corrupt_blob, "truncated PNM header");
    ++pos; // single whitespace byte after maxval

    const std::size_t n_pixels = static_cast<std::size_t>(width) * height;
    const std::size_t need = n_pixels * (gray ? 1 : 3);
    if (bytes.size() - pos < need) raise(Errc::corrupt_blob, "truncated PNM pixel data");

    Image img = make_image(width, height);
    const auto* src = reinterpret_cast<const std::uint8_t*>(bytes.data() + pos);
    if (gray) {
        for (std::size_t i = 0; i < n_pixels; ++i) {
            img.rgb[3 * i] = img.rgb[3 * i + 1] = img.rgb[3 * i + 2] = src[i];
        }
    } else {
        std::memcpy(img.rgb.data(), src, need);
    }
    return img;
}

Image decode_png(const std::string& bytes) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) raise(Errc::io_error, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        raise(Errc::io_error, "png_create_info_struct failed");
    }
    std::vector<png_bytep> rows;
    Image img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(Errc::corrupt_blob, "malformed PNG data");
    }
    PngReadCtx ctx{&bytes, 0};
    png_set_read_fn(png, &ctx, png_read_fn);
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_packing(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    if (png_get_rowbytes(png, info) != static_cast<std::size_t>(img.width) * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(Errc::corrupt_blob, "unsupported PNG layout");
    }
    img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    rows.resize(img.height);
    for (int y = 0; y < img.height; ++y) rows[y] = img.rgb.data() + std::size_t(y) * img.width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

Image load_image(const std::string& path) {
    const std::string bytes = io::read_file(path);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), "\x89PNG\r\n\x1a\n", 8) == 0) return decode_png(bytes);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) return decode_ppm(bytes);
    raise(Errc::corrupt_blob, "unrecognized image format: " + path);
}

void save_ppm(const Image& img, const std::string& path) {
    if (img.empty()) raise(Errc::invalid_argument, "cannot save empty image");
    std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
    io::write_file(path, out);
}

std::vector<double> luma_plane(const Image& img) {
    std::vector<double> luma(img.pixel_count());
    for (std::size_t i = 0; i < luma.size(); ++i) {
        luma[i] = (0.299 * img.rgb[3 * i] + 0.587 * img.rgb[3 * i + 1] + 0.114 * img.rgb[3 * i + 2]) / 255.0;
    }
    return luma;
}

namespace {

void blur_axis(std::vector<double>& plane, int width, int height, int radius, bool horizontal) {
    std::vector<double> out(plane.size());
    const int len = horizontal ? width : height;
    const int lines = horizontal ? height : width;
    const double inv = 1.0 / (2 * radius + 1);
    for (int line = 0; line < lines; ++line) {
        for (int i = 0; i < len; ++i) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                int j = i + k;
                if (j < 0) j = 0;
                if (j >= len) j = len - 1;
                acc += horizontal ? plane[std::size_t(line) * width + j] : plane[std::size_t(j) * width + line];
            }
            if (horizontal)
                out[std::size_t(line) * width + i] = acc * inv;
            else
                out[std::size_t(i) * width + line] = acc * inv;
        }
    }
    plane.swap(out);
}

} // namespace

void box_blur_in_place(Image& img, int radius, int passes) {
    if (radius <= 0 || passes <= 0 || img.empty()) return;
    for (int c = 0; c < 3; ++c) {
        std::vector<double> plane(img.pixel_count());
        for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = img.rgb[3 * i + c];
        for (int p = 0; p < passes; ++p) {
            blur_axis(plane, img.width, img.height, radius, true);
            blur_axis(plane, img.width, img.height, radius, false);
        }
        for (std::size_t i = 0; i < plane.size(); ++i) {
            double v = std::floor(plane[i] + 0.5);
            if (v < 0) v = 0;
            if (v > 255) v = 255;
            img.rgb[3 * i + c] = static_cast<std::uint8_t>(v);
        }
    }
}

} // namespace declip
