#include "vton/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace vton {

namespace {

void check_pair(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("metrics: image dimensions differ");
    if (a.width <= 0 || a.height <= 0)
        throw std::invalid_argument("metrics: empty image");
}

void check_window(const SsimConfig& cfg, const ImageBuffer& a) {
    if (cfg.window < 3 || cfg.window % 2 == 0)
        throw std::invalid_argument("ssim: window must be odd and >= 3");
    if (a.width < cfg.window || a.height < cfg.window)
        throw std::invalid_argument("ssim: image smaller than window");
}

double ssim_impl(const ImageBuffer& a, const ImageBuffer& b, const SsimConfig& cfg,
                 const SegMask* exclude) {
    check_pair(a, b);
    check_window(cfg, a);
    if (exclude && (exclude->width != a.width || exclude->height != a.height))
        throw std::invalid_argument("ssim: exclusion mask dimensions differ");

    const std::vector<double> la = luma_plane(a);
    const std::vector<double> lb = luma_plane(b);

    const int w = cfg.window;
    const double n = static_cast<double>(w) * w;
    const double c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
    const double c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);

    double total = 0.0;
    long count = 0;
    for (int y0 = 0; y0 + w <= a.height; ++y0) {
        for (int x0 = 0; x0 + w <= a.width; ++x0) {
            if (exclude) {
                bool skip = false;
                for (int y = y0; y < y0 + w && !skip; ++y)
                    for (int x = x0; x < x0 + w && !skip; ++x)
                        if (exclude->at(x, y) >= 0.5f) skip = true;
                if (skip) continue;
            }
            double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
            for (int y = y0; y < y0 + w; ++y) {
                for (int x = x0; x < x0 + w; ++x) {
                    const double va = la[static_cast<std::size_t>(y) * a.width + x];
                    const double vb = lb[static_cast<std::size_t>(y) * a.width + x];
                    sa += va;
                    sb += vb;
                    saa += va * va;
                    sbb += vb * vb;
                    sab += va * vb;
                }
            }
            const double mu_a = sa / n;
            const double mu_b = sb / n;
            const double var_a = saa / n - mu_a * mu_a;
            const double var_b = sbb / n - mu_b * mu_b;
            const double cov = sab / n - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += num / den;
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("ssim: no window survives the exclusion mask");
    return total / static_cast<double>(count);
}

} // namespace

std::vector<double> luma_plane(const ImageBuffer& img) {
    std::vector<double> out(static_cast<std::size_t>(img.width) * img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const Rgba c = img.at(x, y);
            out[static_cast<std::size_t>(y) * img.width + x] =
                (0.299 * c.r + 0.587 * c.g + 0.114 * c.b) / 255.0;
        }
    }
    return out;
}

double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimConfig& cfg) {
    return ssim_impl(a, b, cfg, nullptr);
}

double ssim_excluding(const ImageBuffer& a, const ImageBuffer& b, const SegMask& exclude,
                      const SsimConfig& cfg) {
    return ssim_impl(a, b, cfg, &exclude);
}

double dssim(const ImageBuffer& a, const ImageBuffer& b, const SsimConfig& cfg) {
    return 1.0 - ssim(a, b, cfg);
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    check_pair(a, b);
    const std::vector<double> la = luma_plane(a);
    const std::vector<double> lb = luma_plane(b);
    double mse = 0.0;
    for (std::size_t i = 0; i < la.size(); ++i) {
        const double d = la[i] - lb[i];
        mse += d * d;
    }
    mse /= static_cast<double>(la.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

std::string metric_report_json(const ImageBuffer& a, const ImageBuffer& b,
                               const SsimConfig& cfg) {
    const double s = ssim(a, b, cfg);
    const double p = psnr(a, b);
    nlohmann::json j;
    j["ssim"] = s;
    j["dssim"] = 1.0 - s;
    if (std::isinf(p)) {
        j["psnr_db"] = "inf";
    } else {
        j["psnr_db"] = p;
    }
    return j.dump() + "\n";
}

} // namespace vton
