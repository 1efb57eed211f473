#ifndef VTON_IMAGE_HPP
#define VTON_IMAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vton/geometry.hpp"

namespace vton {

struct Rgba {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    std::uint8_t a = 0;

    bool operator==(const Rgba&) const = default;
};

/// 8-bit RGBA raster, row major. For garment segments the alpha channel
/// marks segment membership (0 = outside the segment).
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // width * height * 4

    ImageBuffer() = default;
    ImageBuffer(int w, int h, Rgba fill = {0, 0, 0, 0});

    Rgba at(int x, int y) const {
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 4;
        return {pixels[i], pixels[i + 1], pixels[i + 2], pixels[i + 3]};
    }
    void set(int x, int y, Rgba c) {
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 4;
        pixels[i] = c.r;
        pixels[i + 1] = c.g;
        pixels[i + 2] = c.b;
        pixels[i + 3] = c.a;
    }

    bool operator==(const ImageBuffer&) const = default;
};

/// Single-channel soft mask, row major, every value in [0,1].
struct SegMask {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    SegMask() = default;
    SegMask(int w, int h, float fill = 0.0f);

    float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, float v) { values[static_cast<std::size_t>(y) * width + x] = v; }

    bool operator==(const SegMask&) const = default;
};

/// Raw label ids from a human-parsing map (8-bit indexed or grayscale PNG).
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> labels;

    std::uint8_t at(int x, int y) const {
        return labels[static_cast<std::size_t>(y) * width + x];
    }
};

// PNG I/O. Images are written with fixed settings and no ancillary chunks,
// so identical content always yields identical bytes.
ImageBuffer load_png_rgba(const std::string& path);
void save_png_rgba(const ImageBuffer& img, const std::string& path);
SegMask load_png_mask(const std::string& path);           // value = gray / 255
void save_png_mask(const SegMask& mask, const std::string& path);
LabelMap load_png_labels(const std::string& path);        // palette indices kept raw

/// Bilinear interpolation of the 4 neighboring pixels at a point in
/// normalized [0,1]^2 coordinates (pixel centers at ((i+.5)/W, (j+.5)/H);
/// border neighbors clamp). Points outside [0,1]^2 return transparent black.
Rgba bilinear_sample(const ImageBuffer& img, Vec2 p);

} // namespace vton

#endif
