#ifndef VTON_WARP_HPP
#define VTON_WARP_HPP

#include <vector>

#include "vton/image.hpp"
#include "vton/landmarks.hpp"
#include "vton/tps.hpp"

namespace vton {

/// Warps src so that the source control points land on the target ones.
/// Resampling is done by inverse mapping: a spline is fitted from target
/// points back to source points and evaluated at every output pixel center
/// (normalized coordinates), then the source is bilinearly sampled. Output
/// pixels whose sampled location falls outside [0,1]^2 or whose sampled
/// alpha is zero are fully transparent.
ImageBuffer warp_image(const ImageBuffer& src, const ControlPairs& pairs, double lambda,
                       int out_width, int out_height);

/// Forward transform (source -> target) applied to each point.
std::vector<Vec2> warp_points(const ControlPairs& pairs, double lambda,
                              const std::vector<Vec2>& pts);

} // namespace vton

#endif
