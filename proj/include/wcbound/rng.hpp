#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace wcb {

// splitmix64 output finalizer (public-domain constants).
inline std::uint64_t sm64_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based stream keyed by (seed, index). Every replicate / multistart
// owns its own stream, so results do not depend on how work is scheduled
// across threads. Two finalizer rounds decorrelate adjacent indices.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t index)
        : state_(sm64_finalize(sm64_finalize(seed + 0x9E3779B97F4A7C15ULL * (index + 1)))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return sm64_finalize(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_uniform(double a, double b) { return a + (b - a) * next_unit(); }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_unit();  // (0, 1]
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Knuth's product method; fine for the small lambdas used here.
    long next_poisson(double lambda) {
        const double limit = std::exp(-lambda);
        long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_unit();
        } while (p > limit);
        return k - 1;
    }

    // Uniform on the unit sphere S^{d-1}: normalized Gaussian vector.
    void next_sphere(int d, std::vector<double>& out) {
        out.resize(static_cast<std::size_t>(d));
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (double& c : out) {
                c = next_normal();
                norm2 += c * c;
            }
        } while (norm2 == 0.0);
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& c : out) c *= inv;
    }

    // Uniform in the unit ball: sphere direction scaled by U^{1/d}.
    void next_ball(int d, std::vector<double>& out) {
        next_sphere(d, out);
        const double rad = std::pow(next_unit(), 1.0 / static_cast<double>(d));
        for (double& c : out) c *= rad;
    }

    // Two-point golden law: phi w.p. 1/(sqrt5 phi), -1/phi w.p. phi/sqrt5.
    double next_golden_z() {
        constexpr double phi = 1.6180339887498948482;
        constexpr double p_plus = 0.27639320225002103036;  // 1/(sqrt5 phi)
        return next_unit() < p_plus ? phi : -1.0 / phi;
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace wcb
