#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

#include "complex2.hpp"

namespace basinforge {

// splitmix64. Hand-rolled so streams are bit-identical on every platform;
// std::uniform_real_distribution makes no such promise.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 mantissa bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    // Uniform on the unit circle.
    cplx phase() {
        double t = 2.0 * M_PI * next_unit();
        return cplx(std::cos(t), std::sin(t));
    }

    cplx unit_disc() {
        double r = std::sqrt(next_unit());
        return r * phase();
    }

    // Derive an independent stream; used so germ n of a sequence is a pure
    // function of (seed, n).
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        Rng r(seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL));
        r.next_u64();
        return r.next_u64();
    }
};

// Additive low-discrepancy sequence in [0,1)^d (generalized golden-ratio
// recurrence). Deterministic, no seed: verification reports are reproducible.
inline double r_sequence_alpha(int dim, int axis) {
    // alpha_i = phi_d^-(i+1), phi_d the positive root of x^(d+1) = x + 1
    double phi = 1.0;
    for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
    return std::fmod(std::pow(1.0 / phi, axis + 1), 1.0);
}

// Quasi-random points of the unit ball in C^2 (boundary-biased radius so
// ratio extrema are probed), plus the index-0..7 deterministic probes at the
// coordinate axes and diagonals where linear-map ratios are attained.
inline std::vector<Vec2> ball_samples(int count) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(count));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Vec2 probes[8] = {
        {{1, 0}, {0, 0}},  {{0, 0}, {1, 0}},  {{0, 1}, {0, 0}},  {{0, 0}, {0, 1}},
        {{inv_sqrt2, 0}, {inv_sqrt2, 0}},
        {{inv_sqrt2, 0}, {-inv_sqrt2, 0}},
        {{0.5, 0.5}, {0.5, -0.5}},
        {{0.1, 0}, {0, 0}},
    };
    for (int i = 0; i < count && i < 8; ++i) pts.push_back(probes[i]);

    static const double a0 = r_sequence_alpha(5, 0), a1 = r_sequence_alpha(5, 1),
                        a2 = r_sequence_alpha(5, 2), a3 = r_sequence_alpha(5, 3),
                        a4 = r_sequence_alpha(5, 4);
    for (int i = 8; i < count; ++i) {
        double u0 = std::fmod(0.5 + a0 * i, 1.0);
        double u1 = std::fmod(0.5 + a1 * i, 1.0);
        double u2 = std::fmod(0.5 + a2 * i, 1.0);
        double u3 = std::fmod(0.5 + a3 * i, 1.0);
        double u4 = std::fmod(0.5 + a4 * i, 1.0);
        // direction from two phases + a mixing angle; r^4 law biases outward
        double th = 0.5 * M_PI * u0;
        cplx pz(std::cos(2 * M_PI * u1) * std::cos(th), std::sin(2 * M_PI * u1) * std::cos(th));
        cplx pw(std::cos(2 * M_PI * (u2 + u4)) * std::sin(th),
                std::sin(2 * M_PI * (u2 + u4)) * std::sin(th));
        double r = std::pow(u3, 0.25);
        pts.push_back({r * pz, r * pw});
    }
    return pts;
}

} // namespace basinforge
