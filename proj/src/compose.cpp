#include "vton/compose.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vton {

namespace {

void check_dims(int aw, int ah, int bw, int bh, const char* what) {
    if (aw != bw || ah != bh)
        throw std::invalid_argument(std::string(what) + ": dimensions differ");
}

} // namespace

ImageBuffer build_person_agnostic(const ImageBuffer& person, const SegMask& upper_body_mask) {
    check_dims(person.width, person.height, upper_body_mask.width, upper_body_mask.height,
               "build_person_agnostic");
    ImageBuffer out = person;
    for (int y = 0; y < person.height; ++y) {
        for (int x = 0; x < person.width; ++x) {
            if (upper_body_mask.at(x, y) >= 0.5f) {
                Rgba c = person.at(x, y);
                out.set(x, y, {0, 0, 0, c.a});
            }
        }
    }
    return out;
}

ImageBuffer combined_representation(const ImageBuffer& agnostic, const ImageBuffer& warped_cloth) {
    check_dims(agnostic.width, agnostic.height, warped_cloth.width, warped_cloth.height,
               "combined_representation");
    ImageBuffer out = agnostic;
    for (int y = 0; y < agnostic.height; ++y) {
        for (int x = 0; x < agnostic.width; ++x) {
            const Rgba cloth = warped_cloth.at(x, y);
            if (cloth.a > 0) out.set(x, y, cloth);
        }
    }
    return out;
}

ImageBuffer convex_combine(const ImageBuffer& a, const ImageBuffer& b, const SegMask& mask) {
    check_dims(a.width, a.height, b.width, b.height, "convex_combine");
    check_dims(a.width, a.height, mask.width, mask.height, "convex_combine");

    ImageBuffer out(a.width, a.height);
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            const double m = mask.at(x, y);
            if (!(m >= 0.0 && m <= 1.0))
                throw std::invalid_argument("convex_combine: mask value outside [0,1]");
            const Rgba ca = a.at(x, y);
            const Rgba cb = b.at(x, y);
            auto blend = [&](std::uint8_t va, std::uint8_t vb) {
                const double v = m * va + (1.0 - m) * vb;
                const double lo = std::min(va, vb);
                const double hi = std::max(va, vb);
                return static_cast<std::uint8_t>(std::lround(std::clamp(v, lo, hi)));
            };
            out.set(x, y, {blend(ca.r, cb.r), blend(ca.g, cb.g), blend(ca.b, cb.b),
                           blend(ca.a, cb.a)});
        }
    }
    return out;
}

SegMask mask_from_labels(const LabelMap& labels, const std::vector<int>& included) {
    SegMask mask(labels.width, labels.height);
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            const int id = labels.at(x, y);
            const bool in = std::find(included.begin(), included.end(), id) != included.end();
            mask.set(x, y, in ? 1.0f : 0.0f);
        }
    }
    return mask;
}

SegMask binarize_alpha(const ImageBuffer& img) {
    SegMask mask(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            mask.set(x, y, img.at(x, y).a >= 128 ? 1.0f : 0.0f);
    return mask;
}

} // namespace vton
