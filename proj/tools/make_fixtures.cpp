// Regenerates the synthetic test fixtures under tests/fixtures/: small
// person images with a textured garment, matching parsing label maps,
// garment masks, hand-placed landmark annotations, and three texture
// images for resampling checks. Output is fully deterministic.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "vton/compose.hpp"
#include "vton/image.hpp"
#include "vton/landmarks.hpp"
#include "vton/rng.hpp"

using namespace vton;

namespace {

constexpr int kBackground = 0;
constexpr int kHair = 2;
constexpr int kUpperClothes = 5;
constexpr int kFace = 13;

struct Figure {
    std::string name;
    int width, height;
    int torso_left, torso_right, torso_top, torso_bottom;  // garment box
    Rgba stripe_a, stripe_b;
    Rgba skin, background;
};

bool inside_garment(const Figure& f, int x, int y) {
    // Torso box with slanted shoulders and short sleeves.
    if (y < f.torso_top || y > f.torso_bottom) return false;
    const int slant = std::max(0, (f.torso_top + 6) - y);  // collar cut
    const int cx = (f.torso_left + f.torso_right) / 2;
    if (std::abs(x - cx) < slant) return false;
    int left = f.torso_left, right = f.torso_right;
    const int sleeve_bottom = f.torso_top + (f.torso_bottom - f.torso_top) / 3;
    if (y > sleeve_bottom) {  // below sleeves the torso narrows
        left += 6;
        right -= 6;
    }
    return x >= left && x <= right;
}

void make_figure(const Figure& f, const std::filesystem::path& dir) {
    ImageBuffer img(f.width, f.height);
    LabelMap labels;
    labels.width = f.width;
    labels.height = f.height;
    labels.labels.assign(static_cast<std::size_t>(f.width) * f.height, kBackground);

    const int cx = (f.torso_left + f.torso_right) / 2;
    const int head_cy = f.torso_top - 12;
    const int head_r = 8;

    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            // Background: soft vertical gradient.
            const auto bg = static_cast<std::uint8_t>(
                f.background.r + (y * 40) / f.height);
            Rgba c{bg, static_cast<std::uint8_t>(f.background.g),
                   static_cast<std::uint8_t>(f.background.b + (x * 30) / f.width), 255};
            int label = kBackground;

            const int dxh = x - cx, dyh = y - head_cy;
            if (dxh * dxh + dyh * dyh <= head_r * head_r) {
                c = f.skin;
                label = kFace;
                if (dyh < -head_r / 2) {
                    c = {60, 40, 30, 255};
                    label = kHair;
                }
            } else if (inside_garment(f, x, y)) {
                c = ((x / 4 + y / 4) % 2 == 0) ? f.stripe_a : f.stripe_b;
                label = kUpperClothes;
            } else if (y > f.torso_bottom && y < f.height - 4 &&
                       std::abs(x - cx) < (f.torso_right - f.torso_left) / 3) {
                c = {70, 70, 110, 255};  // trousers, left as background label
            }
            img.set(x, y, c);
            labels.labels[static_cast<std::size_t>(y) * f.width + x] =
                static_cast<std::uint8_t>(label);
        }
    }

    save_png_rgba(img, (dir / (f.name + ".png")).string());

    // Label map written as grayscale so the ids round-trip exactly.
    SegMask label_gray(f.width, f.height);
    for (std::size_t i = 0; i < labels.labels.size(); ++i)
        label_gray.values[i] = static_cast<float>(labels.labels[i]) / 255.0f;
    save_png_mask(label_gray, (dir / (f.name + "_parsing.png")).string());

    const SegMask cloth = mask_from_labels(labels, {kUpperClothes});
    save_png_mask(cloth, (dir / (f.name + "_cloth_mask.png")).string());

    // Hand-placed landmarks in pixel coordinates.
    LandmarkAnnotation ann;
    ann.image_path = f.name + ".png";
    ann.width = f.width;
    ann.height = f.height;
    ann.space = CoordinateSpace::pixel;
    const double top = f.torso_top, bottom = f.torso_bottom;
    const double left = f.torso_left, right = f.torso_right;
    const double sleeve_y = top + (bottom - top) / 3.0;
    ann.human_landmarks = {
        {static_cast<double>(cx), static_cast<double>(head_cy), true},  // nose
        {static_cast<double>(cx), top + 2.0, true},                     // neck
        {right - 2.0, top + 6.0, true},                                 // right shoulder
        {right - 1.0, sleeve_y + 4.0, true},                            // right elbow
        {right - 1.0, sleeve_y + 16.0, true},                           // right wrist
        {left + 2.0, top + 6.0, true},                                  // left shoulder
        {left + 1.0, sleeve_y + 4.0, true},                             // left elbow
        {left + 1.0, sleeve_y + 16.0, true},                            // left wrist
        {static_cast<double>(cx), bottom + 10.0, true},                 // mid hip
    };
    ann.fashion_landmarks = std::vector<Landmark>{
        {cx - 7.0, top + 7.0, true},    // left collar
        {cx + 7.0, top + 7.0, true},    // right collar
        {left + 3.0, sleeve_y, true},   // left sleeve
        {right - 3.0, sleeve_y, true},  // right sleeve
        {left + 8.0, bottom, true},     // left hem
        {right - 8.0, bottom, true},    // right hem
    };
    save_annotation(ann, (dir / (f.name + ".json")).string());
}

void make_textures(const std::filesystem::path& dir) {
    const int n = 64;
    ImageBuffer checker(n, n), gradient(n, n), noise(n, n);
    std::mt19937_64 eng(7);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const bool on = ((x / 8) + (y / 8)) % 2 == 0;
            checker.set(x, y, on ? Rgba{230, 40, 40, 255} : Rgba{40, 40, 230, 255});
            gradient.set(x, y, {static_cast<std::uint8_t>(4 * x),
                                static_cast<std::uint8_t>(4 * y),
                                static_cast<std::uint8_t>(255 - 2 * x), 255});
            noise.set(x, y, {static_cast<std::uint8_t>(eng() % 256),
                             static_cast<std::uint8_t>(eng() % 256),
                             static_cast<std::uint8_t>(eng() % 256), 255});
        }
    }
    save_png_rgba(checker, (dir / "tex_checker.png").string());
    save_png_rgba(gradient, (dir / "tex_gradient.png").string());
    save_png_rgba(noise, (dir / "tex_noise.png").string());
}

} // namespace

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "tests/fixtures";
    std::filesystem::create_directories(dir);

    make_figure({"model", 96, 128, 24, 72, 38, 86,
                 {200, 50, 50, 255}, {240, 220, 80, 255},
                 {220, 180, 150, 255}, {90, 110, 90, 255}},
                dir);
    make_figure({"person", 96, 128, 28, 68, 42, 92,
                 {60, 160, 220, 255}, {250, 250, 250, 255},
                 {190, 150, 120, 255}, {120, 90, 110, 255}},
                dir);
    make_figure({"person_wide", 112, 128, 22, 88, 40, 90,
                 {90, 200, 90, 255}, {30, 60, 30, 255},
                 {230, 190, 160, 255}, {100, 100, 140, 255}},
                dir);
    make_textures(dir);
    std::printf("fixtures written to %s\n", dir.string().c_str());
    return 0;
}
