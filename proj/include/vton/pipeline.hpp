#ifndef VTON_PIPELINE_HPP
#define VTON_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vton/image.hpp"

namespace vton {

/// Resolved try-on settings. Defaults follow the library-wide choices:
/// lambda 0.01, 3x3 structural-similarity window, perturbation variance
/// 0.001, dilation radius 3.
struct PipelineConfig {
    double lambda = 0.01;
    int ssim_window = 3;
    double variance = 0.001;
    int dilation_radius = 3;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::vector<int> cloth_labels = {5};             // parsing ids forming the garment
    std::vector<int> agnostic_labels = {5, 14, 15};  // ids removed from the person
};

/// File inputs of one try-on run. Empty person paths fall back to the model
/// image/parsing (self-try-on); an empty predictor path predicts the target
/// garment landmarks as the model's own (identity bypass).
struct PipelineInputs {
    std::string model_annotation;
    std::string person_annotation;
    std::string model_image;
    std::string model_parsing;
    std::string person_image;
    std::string person_parsing;
    std::string predictor_model;
    std::string external_mask;  // optional externally supplied target mask
};

struct PipelineResult {
    ImageBuffer output;
    double ssim_vs_person = 0.0;
    long uncovered_pixels = 0;  // removed from the person but not covered by cloth
};

/// Runs the three stages: (1) predict target garment landmarks, build
/// control pairs and warp the garment segment; (2) choose the target mask
/// (external file or the binarized warped alpha); (3) build the person-
/// agnostic image, overlay the cloth and blend through the target mask.
///
/// Writes warped_cloth.png, target_mask.png, agnostic.png, combined.png,
/// output.png, predicted_landmarks.json, metrics.json and run.json into
/// cfg.out_dir. Errors from any stage are surfaced with a stage tag.
PipelineResult run_pipeline(const PipelineInputs& in, const PipelineConfig& cfg);

} // namespace vton

#endif
