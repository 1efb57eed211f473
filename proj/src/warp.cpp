#include "vton/warp.hpp"

#include <stdexcept>

namespace vton {

ImageBuffer warp_image(const ImageBuffer& src, const ControlPairs& pairs, double lambda,
                       int out_width, int out_height) {
    if (out_width <= 0 || out_height <= 0)
        throw std::invalid_argument("warp_image: output dimensions must be positive");

    ControlPairs inverse{pairs.target, pairs.source};
    const TpsTransform back = fit_tps(inverse, lambda);

    ImageBuffer out(out_width, out_height);
    for (int y = 0; y < out_height; ++y) {
        for (int x = 0; x < out_width; ++x) {
            const Vec2 center{(x + 0.5) / out_width, (y + 0.5) / out_height};
            const Vec2 source_pos = evaluate_tps(back, center);
            Rgba sample = bilinear_sample(src, source_pos);
            if (sample.a == 0) sample = {0, 0, 0, 0};
            out.set(x, y, sample);
        }
    }
    return out;
}

std::vector<Vec2> warp_points(const ControlPairs& pairs, double lambda,
                              const std::vector<Vec2>& pts) {
    const TpsTransform fwd = fit_tps(pairs, lambda);
    std::vector<Vec2> out;
    out.reserve(pts.size());
    for (const Vec2& p : pts) out.push_back(evaluate_tps(fwd, p));
    return out;
}

} // namespace vton
