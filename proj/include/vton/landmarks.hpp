#ifndef VTON_LANDMARKS_HPP
#define VTON_LANDMARKS_HPP

#include <optional>
#include <string>
#include <vector>

#include "vton/geometry.hpp"

namespace vton {

// Landmark index conventions (fixed; index i always names the same point):
//
// human (9):   0 nose, 1 neck, 2 right_shoulder, 3 right_elbow,
//              4 right_wrist, 5 left_shoulder, 6 left_elbow,
//              7 left_wrist, 8 mid_hip
// fashion (6): 0 left_collar, 1 right_collar, 2 left_sleeve,
//              3 right_sleeve, 4 left_hem, 5 right_hem

inline constexpr int kHumanLandmarkCount = 9;
inline constexpr int kFashionLandmarkCount = 6;

struct Landmark {
    double x = 0.0;
    double y = 0.0;
    bool visible = true;
};

enum class CoordinateSpace { pixel, normalized };

/// One annotated image: human keypoints, optional garment keypoints,
/// and the coordinate space the values live in.
struct LandmarkAnnotation {
    std::string image_path;
    int width = 0;   // pixels
    int height = 0;  // pixels
    CoordinateSpace space = CoordinateSpace::pixel;
    std::vector<Landmark> human_landmarks;                   // exactly 9
    std::optional<std::vector<Landmark>> fashion_landmarks;  // exactly 6 when present
};

/// Aligned source/target control-point multisets for a warp fit.
/// source[i] corresponds to target[i]; both sides always have equal length.
struct ControlPairs {
    std::vector<Vec2> source;
    std::vector<Vec2> target;

    std::size_t count() const { return source.size(); }
};

/// Parses the annotation JSON schema:
///   {"image": str, "width": int, "height": int, "space": "pixel"|"normalized",
///    "human_landmarks": [[x,y,visible] x9], "fashion_landmarks": [[x,y,visible] x6]?}
/// Throws std::invalid_argument on malformed JSON, wrong landmark counts, or
/// coordinates outside the image bounds for the declared space.
LandmarkAnnotation parse_annotation(const std::string& bytes);

/// Canonical serialization: keys sorted, floats fixed at 6 decimals.
/// Two calls on the same annotation produce identical bytes, and
/// parse(serialize(a)) == a up to the 6-decimal rounding.
std::string serialize_annotation(const LandmarkAnnotation& a);

LandmarkAnnotation load_annotation(const std::string& path);
void save_annotation(const LandmarkAnnotation& a, const std::string& path);

/// Pixel -> normalized coordinates (x/width, y/height). Throws on zero
/// dimensions or if the annotation is already normalized.
LandmarkAnnotation normalize_landmarks(const LandmarkAnnotation& a);

/// Normalized -> pixel coordinates.
LandmarkAnnotation denormalize_landmarks(const LandmarkAnnotation& a);

/// Assembles warp control pairs from normalized annotations:
/// source = model human || model fashion, target = person human || target fashion.
/// A pair whose landmark is invisible on either side is dropped from both
/// multisets. Throws if fewer than 3 pairs survive or if either surviving
/// side is collinear (the affine part of a warp fit would be unsolvable).
ControlPairs build_control_pairs(const LandmarkAnnotation& model,
                                 const LandmarkAnnotation& person,
                                 const std::vector<Landmark>& model_fashion,
                                 const std::vector<Landmark>& target_fashion);

} // namespace vton

#endif
