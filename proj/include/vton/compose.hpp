#ifndef VTON_COMPOSE_HPP
#define VTON_COMPOSE_HPP

#include <vector>

#include "vton/image.hpp"

namespace vton {

/// Zeroes the RGB channels (alpha kept) wherever mask >= 0.5; all other
/// pixels pass through untouched.
ImageBuffer build_person_agnostic(const ImageBuffer& person, const SegMask& upper_body_mask);

/// Hard alpha-over: the cloth pixel wherever cloth alpha > 0, else the
/// agnostic pixel.
ImageBuffer combined_representation(const ImageBuffer& agnostic, const ImageBuffer& warped_cloth);

/// Per-pixel blend out = m * a + (1 - m) * b on every channel (alpha blends
/// the same way), rounded to the nearest 8-bit value. Output values never
/// leave the per-pixel [min, max] envelope of the two inputs. Throws on
/// dimension mismatch or mask values outside [0,1].
ImageBuffer convex_combine(const ImageBuffer& a, const ImageBuffer& b, const SegMask& mask);

/// Binary mask from a parsing label map: 1 where the pixel's label id is in
/// `included`, else 0.
SegMask mask_from_labels(const LabelMap& labels, const std::vector<int>& included);

/// Mask from the alpha channel: 1 where alpha >= 128, else 0.
SegMask binarize_alpha(const ImageBuffer& img);

} // namespace vton

#endif
