#include "vton/image.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

#include <png.h>

namespace vton {

ImageBuffer::ImageBuffer(int w, int h, Rgba fill) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("ImageBuffer: dimensions must be positive");
    pixels.resize(static_cast<std::size_t>(w) * h * 4);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) set(x, y, fill);
}

SegMask::SegMask(int w, int h, float fill) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("SegMask: dimensions must be positive");
    values.assign(static_cast<std::size_t>(w) * h, fill);
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

void read_png(const std::string& path, bool expand_to_rgba, int& width, int& height,
              std::vector<std::uint8_t>& data, int& channels) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw std::runtime_error("cannot open PNG file: " + path);

    PngReader r;
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) throw std::runtime_error("png_create_read_struct failed");
    r.info = png_create_info_struct(r.png);
    if (!r.info) throw std::runtime_error("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(r.png))) throw std::runtime_error("failed to decode PNG: " + path);

    png_init_io(r.png, file.get());
    png_read_info(r.png, r.info);

    const png_byte color_type = png_get_color_type(r.png, r.info);
    const png_byte bit_depth = png_get_bit_depth(r.png, r.info);

    if (expand_to_rgba) {
        if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
        if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
        if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
        if (bit_depth == 16) png_set_strip_16(r.png);
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(r.png);
        png_set_filler(r.png, 0xFF, PNG_FILLER_AFTER);
        channels = 4;
    } else {
        // Raw 8-bit single channel: palette indices or gray values as stored.
        if (bit_depth < 8) png_set_packing(r.png);
        if (bit_depth == 16) png_set_strip_16(r.png);
        if (color_type != PNG_COLOR_TYPE_PALETTE && color_type != PNG_COLOR_TYPE_GRAY)
            throw std::runtime_error("label map PNG must be 8-bit indexed or grayscale: " + path);
        channels = 1;
    }
    png_read_update_info(r.png, r.info);

    width = static_cast<int>(png_get_image_width(r.png, r.info));
    height = static_cast<int>(png_get_image_height(r.png, r.info));
    const std::size_t rowbytes = png_get_rowbytes(r.png, r.info);
    if (rowbytes != static_cast<std::size_t>(width) * channels)
        throw std::runtime_error("unexpected PNG row size: " + path);

    data.resize(static_cast<std::size_t>(height) * rowbytes);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = data.data() + static_cast<std::size_t>(y) * rowbytes;
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
}

void write_png(const std::string& path, int width, int height, int color_type,
               const std::uint8_t* data, std::size_t rowbytes) {
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw std::runtime_error("cannot write PNG file: " + path);

    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) throw std::runtime_error("png_create_write_struct failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) throw std::runtime_error("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(w.png))) throw std::runtime_error("failed to encode PNG: " + path);

    png_init_io(w.png, file.get());
    png_set_compression_level(w.png, 6);
    png_set_IHDR(w.png, w.info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);

    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(data + static_cast<std::size_t>(y) * rowbytes);
    png_write_rows(w.png, rows.data(), height);
    png_write_end(w.png, w.info);
}

} // namespace

ImageBuffer load_png_rgba(const std::string& path) {
    ImageBuffer img;
    int channels = 0;
    read_png(path, true, img.width, img.height, img.pixels, channels);
    return img;
}

void save_png_rgba(const ImageBuffer& img, const std::string& path) {
    if (img.width <= 0 || img.height <= 0 ||
        img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * 4)
        throw std::invalid_argument("save_png_rgba: inconsistent image buffer");
    write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGBA, img.pixels.data(),
              static_cast<std::size_t>(img.width) * 4);
}

SegMask load_png_mask(const std::string& path) {
    const ImageBuffer img = load_png_rgba(path);
    SegMask mask(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            mask.set(x, y, static_cast<float>(img.at(x, y).r) / 255.0f);
    return mask;
}

void save_png_mask(const SegMask& mask, const std::string& path) {
    if (mask.width <= 0 || mask.height <= 0 ||
        mask.values.size() != static_cast<std::size_t>(mask.width) * mask.height)
        throw std::invalid_argument("save_png_mask: inconsistent mask");
    std::vector<std::uint8_t> bytes(mask.values.size());
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        const float v = mask.values[i];
        if (!(v >= 0.0f && v <= 1.0f))
            throw std::invalid_argument("save_png_mask: value outside [0,1]");
        bytes[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
    write_png(path, mask.width, mask.height, PNG_COLOR_TYPE_GRAY, bytes.data(),
              static_cast<std::size_t>(mask.width));
}

LabelMap load_png_labels(const std::string& path) {
    LabelMap map;
    int channels = 0;
    read_png(path, false, map.width, map.height, map.labels, channels);
    return map;
}

Rgba bilinear_sample(const ImageBuffer& img, Vec2 p) {
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) return {0, 0, 0, 0};

    const double fx = p.x * img.width - 0.5;
    const double fy = p.y * img.height - 0.5;
    const int x0 = static_cast<int>(std::floor(fx));
    const int y0 = static_cast<int>(std::floor(fy));
    const double wx = fx - x0;
    const double wy = fy - y0;

    auto clamp = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
    const int xa = clamp(x0, img.width - 1);
    const int xb = clamp(x0 + 1, img.width - 1);
    const int ya = clamp(y0, img.height - 1);
    const int yb = clamp(y0 + 1, img.height - 1);

    const Rgba p00 = img.at(xa, ya);
    const Rgba p10 = img.at(xb, ya);
    const Rgba p01 = img.at(xa, yb);
    const Rgba p11 = img.at(xb, yb);

    auto lerp2 = [&](std::uint8_t c00, std::uint8_t c10, std::uint8_t c01, std::uint8_t c11) {
        const double top = (1.0 - wx) * c00 + wx * c10;
        const double bot = (1.0 - wx) * c01 + wx * c11;
        const double v = (1.0 - wy) * top + wy * bot;
        return static_cast<std::uint8_t>(std::lround(v));
    };
    return {lerp2(p00.r, p10.r, p01.r, p11.r), lerp2(p00.g, p10.g, p01.g, p11.g),
            lerp2(p00.b, p10.b, p01.b, p11.b), lerp2(p00.a, p10.a, p01.a, p11.a)};
}

} // namespace vton
