#include "vton/glitch.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "vton/compose.hpp"
#include "vton/rng.hpp"
#include "vton/tps.hpp"
#include "vton/warp.hpp"

namespace vton {

std::vector<Landmark> perturb_landmarks(const std::vector<Landmark>& flm,
                                        const PerturbConfig& cfg) {
    if (cfg.variance < 0.0)
        throw std::invalid_argument("perturb_landmarks: variance must be nonnegative");
    const double stddev = std::sqrt(cfg.variance);
    GaussianSampler gauss(cfg.seed);
    std::vector<Landmark> out = flm;
    for (auto& lm : out) {
        const double dx = stddev * gauss.next();
        const double dy = stddev * gauss.next();
        lm.x = std::clamp(lm.x + dx, 0.0, 1.0);
        lm.y = std::clamp(lm.y + dy, 0.0, 1.0);
    }
    return out;
}

std::pair<ImageBuffer, std::vector<Landmark>> synthesize_glitch(
    const ImageBuffer& segment, const std::vector<Landmark>& flm, const PerturbConfig& cfg) {
    if (flm.size() != static_cast<std::size_t>(kFashionLandmarkCount))
        throw std::invalid_argument("synthesize_glitch: expected 6 fashion landmarks");
    for (const auto& lm : flm) {
        if (!lm.visible) throw std::invalid_argument("synthesize_glitch: landmark not visible");
        if (!(lm.x >= 0.0 && lm.x <= 1.0 && lm.y >= 0.0 && lm.y <= 1.0))
            throw std::invalid_argument("synthesize_glitch: landmarks must be normalized");
    }

    const std::vector<Landmark> perturbed = perturb_landmarks(flm, cfg);
    ControlPairs pairs;
    for (int i = 0; i < kFashionLandmarkCount; ++i) {
        pairs.source.push_back({flm[i].x, flm[i].y});
        pairs.target.push_back({perturbed[i].x, perturbed[i].y});
    }
    ImageBuffer warped =
        warp_image(segment, pairs, kDefaultTpsLambda, segment.width, segment.height);
    return {std::move(warped), perturbed};
}

SegMask dilate_mask(const SegMask& m, int radius) {
    if (radius < 0) throw std::invalid_argument("dilate_mask: radius must be nonnegative");
    for (float v : m.values)
        if (v != 0.0f && v != 1.0f)
            throw std::invalid_argument("dilate_mask: mask is not binary");
    if (radius == 0) return m;

    // Square element is separable: horizontal max-run, then vertical.
    SegMask tmp(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            float v = 0.0f;
            const int lo = std::max(0, x - radius);
            const int hi = std::min(m.width - 1, x + radius);
            for (int i = lo; i <= hi && v == 0.0f; ++i) v = m.at(i, y);
            tmp.set(x, y, v);
        }
    }
    SegMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            float v = 0.0f;
            const int lo = std::max(0, y - radius);
            const int hi = std::min(m.height - 1, y + radius);
            for (int j = lo; j <= hi && v == 0.0f; ++j) v = tmp.at(x, j);
            out.set(x, y, v);
        }
    }
    return out;
}

namespace {

/// Garment segment cut out of the image: RGB kept and alpha 255 inside the
/// mask, fully transparent black outside.
ImageBuffer extract_segment(const ImageBuffer& img, const SegMask& mask) {
    ImageBuffer out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (mask.at(x, y) >= 0.5f) {
                Rgba c = img.at(x, y);
                c.a = 255;
                out.set(x, y, c);
            }
        }
    }
    return out;
}

} // namespace

TrainingSampleFiles make_training_sample(const ImageBuffer& model_img,
                                         const SegMask& clothing_mask,
                                         const std::vector<Landmark>& flm,
                                         const PerturbConfig& cfg, SampleMode mode,
                                         const std::string& out_dir, const std::string& stem) {
    if (model_img.width != clothing_mask.width || model_img.height != clothing_mask.height)
        throw std::invalid_argument("make_training_sample: mask not aligned with image");
    const bool empty =
        std::all_of(clothing_mask.values.begin(), clothing_mask.values.end(),
                    [](float v) { return v < 0.5f; });
    if (empty) throw std::invalid_argument("make_training_sample: empty clothing mask");

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);

    const ImageBuffer segment = extract_segment(model_img, clothing_mask);
    auto [glitched, perturbed] = synthesize_glitch(segment, flm, cfg);
    (void)perturbed;

    TrainingSampleFiles files;
    auto write_image = [&](const std::string& name, const ImageBuffer& img) {
        save_png_rgba(img, (dir / name).string());
        return name;
    };
    auto write_mask = [&](const std::string& name, const SegMask& m) {
        save_png_mask(m, (dir / name).string());
        return name;
    };

    if (mode == SampleMode::mask_gen) {
        files.inputs.push_back(write_image(stem + "_glitched_segment.png", glitched));
        files.ground_truth = write_mask(stem + "_gt_mask.png", clothing_mask);
    } else {
        const SegMask removed = dilate_mask(clothing_mask, cfg.dilation_radius);
        const ImageBuffer agnostic = build_person_agnostic(model_img, removed);
        const ImageBuffer composite = combined_representation(agnostic, glitched);
        files.inputs.push_back(write_image(stem + "_agnostic.png", agnostic));
        files.inputs.push_back(write_image(stem + "_glitched_segment.png", glitched));
        files.inputs.push_back(write_image(stem + "_combined.png", composite));
        files.inputs.push_back(write_mask(stem + "_glitched_mask.png", binarize_alpha(glitched)));
        files.ground_truth = write_image(stem + "_gt_image.png", model_img);
    }

    nlohmann::json manifest;
    manifest["mode"] = mode == SampleMode::mask_gen ? "mask_gen" : "synth";
    manifest["seed"] = cfg.seed;
    manifest["inputs"] = files.inputs;
    manifest["ground_truth"] = files.ground_truth;
    files.manifest = stem + "_manifest.json";
    std::ofstream out(dir / files.manifest, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + files.manifest);
    out << manifest.dump(2) << "\n";
    return files;
}

} // namespace vton
