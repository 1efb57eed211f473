#ifndef VTON_METRICS_HPP
#define VTON_METRICS_HPP

#include <string>
#include <vector>

#include "vton/image.hpp"

namespace vton {

/// Structural-similarity settings. Statistics come from a uniform (box)
/// window slid over every fully-contained position; the usual stabilizing
/// constants are C1 = (k1 L)^2 and C2 = (k2 L)^2.
struct SsimConfig {
    int window = 3;  // odd, >= 3
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;  // images are compared on [0,1] luma
};

/// Luma plane y = 0.299 R + 0.587 G + 0.114 B, mapped to [0,1].
std::vector<double> luma_plane(const ImageBuffer& img);

/// Mean SSIM over all full windows of the luma planes. Throws on dimension
/// mismatch, an even/too-small window, or images smaller than the window.
double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimConfig& cfg = {});

/// Same, but windows overlapping any excluded pixel (exclude value >= 0.5)
/// are skipped. Throws if no window survives.
double ssim_excluding(const ImageBuffer& a, const ImageBuffer& b, const SegMask& exclude,
                      const SsimConfig& cfg = {});

/// 1 - ssim(a, b).
double dssim(const ImageBuffer& a, const ImageBuffer& b, const SsimConfig& cfg = {});

/// 10 log10(1 / MSE) on [0,1] luma; +infinity for identical planes.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

/// Metric report `{"dssim": .., "psnr_db": ..|"inf", "ssim": ..}`.
std::string metric_report_json(const ImageBuffer& a, const ImageBuffer& b,
                               const SsimConfig& cfg = {});

} // namespace vton

#endif
