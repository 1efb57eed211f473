#include "vton/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "vton/compose.hpp"
#include "vton/glitch.hpp"
#include "vton/landmarks.hpp"
#include "vton/metrics.hpp"
#include "vton/predictor.hpp"
#include "vton/warp.hpp"

namespace vton {

namespace {

[[noreturn]] void stage_error(const char* stage, const std::exception& e) {
    throw std::runtime_error(std::string(stage) + ": " + e.what());
}

LandmarkAnnotation load_normalized(const std::string& path) {
    LandmarkAnnotation a = load_annotation(path);
    if (a.space == CoordinateSpace::pixel) a = normalize_landmarks(a);
    return a;
}

} // namespace

PipelineResult run_pipeline(const PipelineInputs& in, const PipelineConfig& cfg) {
    if (cfg.out_dir.empty()) throw std::invalid_argument("run_pipeline: no output directory");
    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path dir(cfg.out_dir);

    const bool self_try_on = in.person_image.empty();
    const std::string person_image_path = self_try_on ? in.model_image : in.person_image;
    const std::string person_parsing_path =
        in.person_parsing.empty() ? in.model_parsing : in.person_parsing;

    // Stage 1: target landmarks, control pairs, garment warp.
    ImageBuffer warped;
    LandmarkAnnotation person;
    std::vector<Landmark> predicted;
    try {
        const LandmarkAnnotation model = load_normalized(in.model_annotation);
        person = load_normalized(in.person_annotation);
        if (!model.fashion_landmarks)
            throw std::invalid_argument("model annotation carries no fashion landmarks");
        const std::vector<Landmark>& cloth_lm = *model.fashion_landmarks;

        if (!in.predictor_model.empty()) {
            const PredictorModel net = load_model(in.predictor_model);
            predicted = forward(net, model.human_landmarks, person.human_landmarks, cloth_lm);
        } else {
            predicted = cloth_lm;  // identity bypass
        }

        const ControlPairs pairs = build_control_pairs(model, person, cloth_lm, predicted);

        const ImageBuffer model_img = load_png_rgba(in.model_image);
        if (model_img.width != model.width || model_img.height != model.height)
            throw std::invalid_argument("model image does not match its annotation dimensions");
        const LabelMap model_parsing = load_png_labels(in.model_parsing);
        if (model_parsing.width != model_img.width || model_parsing.height != model_img.height)
            throw std::invalid_argument("model parsing does not match the model image");

        const SegMask cloth_mask = mask_from_labels(model_parsing, cfg.cloth_labels);
        ImageBuffer segment(model_img.width, model_img.height);
        for (int y = 0; y < model_img.height; ++y) {
            for (int x = 0; x < model_img.width; ++x) {
                if (cloth_mask.at(x, y) >= 0.5f) {
                    Rgba c = model_img.at(x, y);
                    c.a = 255;
                    segment.set(x, y, c);
                }
            }
        }
        warped = warp_image(segment, pairs, cfg.lambda, person.width, person.height);
    } catch (const std::exception& e) {
        stage_error("stage-1 (warp)", e);
    }

    // Stage 2: target mask.
    SegMask target_mask;
    try {
        if (!in.external_mask.empty()) {
            target_mask = load_png_mask(in.external_mask);
            if (target_mask.width != warped.width || target_mask.height != warped.height)
                throw std::invalid_argument("external mask does not match the output size");
        } else {
            target_mask = binarize_alpha(warped);
        }
    } catch (const std::exception& e) {
        stage_error("stage-2 (mask)", e);
    }

    // Stage 3: person-agnostic image, overlay and blend.
    PipelineResult result;
    ImageBuffer person_img, agnostic, combined;
    try {
        person_img = load_png_rgba(person_image_path);
        if (person_img.width != person.width || person_img.height != person.height)
            throw std::invalid_argument("person image does not match its annotation dimensions");
        const LabelMap person_parsing = load_png_labels(person_parsing_path);
        if (person_parsing.width != person_img.width ||
            person_parsing.height != person_img.height)
            throw std::invalid_argument("person parsing does not match the person image");

        const SegMask removed = mask_from_labels(person_parsing, cfg.agnostic_labels);
        agnostic = build_person_agnostic(person_img, removed);
        combined = combined_representation(agnostic, warped);
        result.output = convex_combine(warped, combined, target_mask);

        for (int y = 0; y < person_img.height; ++y)
            for (int x = 0; x < person_img.width; ++x)
                if (removed.at(x, y) >= 0.5f && warped.at(x, y).a == 0) ++result.uncovered_pixels;
    } catch (const std::exception& e) {
        stage_error("stage-3 (compose)", e);
    }

    SsimConfig ssim_cfg;
    ssim_cfg.window = cfg.ssim_window;
    result.ssim_vs_person = ssim(result.output, person_img, ssim_cfg);

    save_png_rgba(warped, (dir / "warped_cloth.png").string());
    save_png_mask(target_mask, (dir / "target_mask.png").string());
    save_png_rgba(agnostic, (dir / "agnostic.png").string());
    save_png_rgba(combined, (dir / "combined.png").string());
    save_png_rgba(result.output, (dir / "output.png").string());

    {
        LandmarkAnnotation pred = person;
        pred.fashion_landmarks = predicted;
        save_annotation(pred, (dir / "predicted_landmarks.json").string());
    }
    {
        const double p = psnr(result.output, person_img);
        nlohmann::json j;
        j["ssim"] = result.ssim_vs_person;
        j["dssim"] = 1.0 - result.ssim_vs_person;
        if (std::isinf(p)) {
            j["psnr_db"] = "inf";
        } else {
            j["psnr_db"] = p;
        }
        j["uncovered_pixels"] = result.uncovered_pixels;
        std::ofstream out(dir / "metrics.json", std::ios::binary);
        out << j.dump(2) << "\n";
    }
    {
        nlohmann::json j;
        j["lambda"] = cfg.lambda;
        j["window"] = cfg.ssim_window;
        j["variance"] = cfg.variance;
        j["dilate"] = cfg.dilation_radius;
        j["seed"] = cfg.seed;
        j["out"] = cfg.out_dir;
        j["cloth_labels"] = cfg.cloth_labels;
        j["agnostic_labels"] = cfg.agnostic_labels;
        j["model_annotation"] = in.model_annotation;
        j["person_annotation"] = in.person_annotation;
        j["model_image"] = in.model_image;
        j["model_parsing"] = in.model_parsing;
        j["person_image"] = person_image_path;
        j["person_parsing"] = person_parsing_path;
        j["predictor_model"] = in.predictor_model;
        j["external_mask"] = in.external_mask;
        j["self_try_on"] = self_try_on;
        std::ofstream out(dir / "run.json", std::ios::binary);
        out << j.dump(2) << "\n";
    }
    return result;
}

} // namespace vton
