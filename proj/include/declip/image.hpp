#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace declip {

// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    bool empty() const { return width == 0 || height == 0; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    std::uint8_t r(int x, int y) const { return rgb[3 * (std::size_t(y) * width + x)]; }
    std::uint8_t g(int x, int y) const { return rgb[3 * (std::size_t(y) * width + x) + 1]; }
    std::uint8_t b(int x, int y) const { return rgb[3 * (std::size_t(y) * width + x) + 2]; }
};

Image make_image(int width, int height, std::uint8_t fill = 0);

// Dispatches on file magic; handles binary PPM/PGM (P6/P5, 8-bit) and PNG.
Image load_image(const std::string& path);
Image decode_ppm(const std::string& bytes);
Image decode_png(const std::string& bytes);
void save_ppm(const Image& img, const std::string& path);

// Luma in [0,1]: (0.299 R + 0.587 G + 0.114 B) / 255.
std::vector<double> luma_plane(const Image& img);

// Box blur with replicate edges, separable, applied `passes` times.
void box_blur_in_place(Image& img, int radius, int passes);

} // namespace declip
