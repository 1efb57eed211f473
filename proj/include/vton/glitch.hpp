#ifndef VTON_GLITCH_HPP
#define VTON_GLITCH_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vton/image.hpp"
#include "vton/landmarks.hpp"

namespace vton {

struct PerturbConfig {
    double variance = 0.001;    // Gaussian variance, normalized-coordinate units^2
    std::uint64_t seed = 0;     // identical seed => identical noise stream
    int dilation_radius = 3;    // pixels
};

/// Adds an independent zero-mean Gaussian draw (variance cfg.variance) to
/// every coordinate, clamped back into [0,1]. Deterministic given the seed;
/// variance 0 returns the input exactly.
std::vector<Landmark> perturb_landmarks(const std::vector<Landmark>& flm,
                                        const PerturbConfig& cfg);

/// Simulates a warping glitch: fits a spline from flm to its perturbed copy
/// (lambda = 0.01) and warps the garment segment through it. Returns the
/// warped segment and the perturbed landmarks. Requires 6 visible normalized
/// landmarks; a degenerate configuration after clamping propagates the fit
/// error.
std::pair<ImageBuffer, std::vector<Landmark>> synthesize_glitch(
    const ImageBuffer& segment, const std::vector<Landmark>& flm, const PerturbConfig& cfg);

/// Morphological dilation of a binary mask with a square structuring element
/// of side 2*radius + 1. Throws if any value is not exactly 0 or 1.
SegMask dilate_mask(const SegMask& m, int radius);

enum class SampleMode { mask_gen, synth };

/// Paths (relative to the output directory) of one written sample bundle.
struct TrainingSampleFiles {
    std::vector<std::string> inputs;
    std::string ground_truth;
    std::string manifest;
};

/// Builds one self-supervised training sample and writes its components as
/// PNGs plus a JSON manifest into out_dir, all file names prefixed by stem.
///
///   mask_gen: input  = garment segment with a simulated glitch
///             truth  = the original garment mask
///   synth:    inputs = person-agnostic image (dilated garment region
///             removed), glitched segment, their composite, and the glitched
///             segment's mask
///             truth  = the original image
///
/// Bundles are reproducible byte-for-byte from (inputs, seed). Throws if the
/// garment mask is empty or not aligned with the image.
TrainingSampleFiles make_training_sample(const ImageBuffer& model_img,
                                         const SegMask& clothing_mask,
                                         const std::vector<Landmark>& flm,
                                         const PerturbConfig& cfg, SampleMode mode,
                                         const std::string& out_dir, const std::string& stem);

} // namespace vton

#endif
