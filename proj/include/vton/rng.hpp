#ifndef VTON_RNG_HPP
#define VTON_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

// Deterministic random primitives. All randomness in the library flows
// through these so that a seed pins every derived artifact byte-for-byte,
// independent of the platform's distribution implementations.

namespace vton {

/// splitmix64 finalizer; used to derive independent per-item seeds from
/// (global seed, item index) so batch order never changes outputs.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform double in [0,1) from the top 53 bits of the engine output.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo,hi).
inline double uniform_in(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

/// Standard normal deviates via Box-Muller, caching the spare draw.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : eng_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform01(eng_);
        } while (u1 <= 0.0);
        const double u2 = uniform01(eng_);
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double two_pi = 6.283185307179586476925286766559;
        spare_ = mag * std::sin(two_pi * u2);
        has_spare_ = true;
        return mag * std::cos(two_pi * u2);
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace vton

#endif
