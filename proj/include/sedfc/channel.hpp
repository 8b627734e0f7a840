#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "sedfc/rng.hpp"

namespace sedfc {

// Binary asymmetric channel BAC(p0, p1):
//   p0 = P(Y=1|X=0), p1 = P(Y=0|X=1).
// Regularized form: 0 < p0 < 1/2 and p0 <= p1 <= 1-p0. Any other pair maps
// into this region by swapping input and/or output labels.

enum class Relabel { none, swap_input, swap_output, swap_both };

struct ChannelSpec {
    double p0;       // regularized crossover P(Y=1|X=0)
    double p1;       // regularized crossover P(Y=0|X=1)
    Relabel relabel; // transform that was applied to the original pair

    bool is_bsc() const { return p0 == p1; }

    // P(Y=y | X=x) for the regularized pair
    double likelihood(int y, int x) const {
        if (x == 0) return y == 0 ? 1.0 - p0 : p0;
        return y == 0 ? p1 : 1.0 - p1;
    }

    // the original (pre-regularization) pair; every relabel is an involution
    std::pair<double, double> original() const;
};

inline double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("binary_entropy: p must be in [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// KL divergence D(P||Q) in bits for distributions over {0,1}.
// Conventions: 0*log(0/a) = 0 and b*log(b/0) = +inf for b != 0.
inline double kl_divergence(const std::array<double, 2>& P, const std::array<double, 2>& Q) {
    double d = 0.0;
    for (int y = 0; y < 2; ++y) {
        if (P[y] == 0.0) continue;
        if (Q[y] == 0.0) return std::numeric_limits<double>::infinity();
        d += P[y] * std::log2(P[y] / Q[y]);
    }
    return d;
}

inline std::pair<double, double> apply_relabel(Relabel r, double p0, double p1) {
    switch (r) {
        case Relabel::none: return {p0, p1};
        case Relabel::swap_input: return {1.0 - p1, 1.0 - p0};
        case Relabel::swap_output: return {1.0 - p0, 1.0 - p1};
        case Relabel::swap_both: return {p1, p0};
    }
    return {p0, p1};
}

inline std::pair<double, double> ChannelSpec::original() const {
    return apply_relabel(relabel, p0, p1);
}

inline bool is_regularized_pair(double p0, double p1) {
    return p0 > 0.0 && p0 < 0.5 && p0 <= p1 && p1 <= 1.0 - p0;
}

// Maps (p0, p1) into the regularized region and records the transform used.
// The candidate transforms are tried in a fixed order so the result is
// deterministic when several of them would land in the region.
inline ChannelSpec regularize(double p0, double p1) {
    if (!(p0 > 0.0 && p0 < 1.0 && p1 > 0.0 && p1 < 1.0))
        throw std::domain_error("regularize: crossover probabilities must be in (0,1)");
    if (p0 + p1 == 1.0)
        throw std::domain_error("regularize: zero-capacity channel (p0 + p1 = 1)");

    constexpr Relabel order[] = {Relabel::none, Relabel::swap_input,
                                 Relabel::swap_output, Relabel::swap_both};
    for (Relabel r : order) {
        auto [q0, q1] = apply_relabel(r, p0, p1);
        if (is_regularized_pair(q0, q1)) return ChannelSpec{q0, q1, r};
    }
    // unreachable: one of the four relabelings always lands in the region
    throw std::logic_error("regularize: no relabeling lands in the regularized region");
}

// Derived channel constants (all in bits):
//   C   capacity, closed form
//   C1  max KL divergence between the conditional output distributions
//   C2  max single-step log-likelihood-ratio change, log2((1-p1)/p0)
struct ChannelStats {
    double C;
    double C1;
    double C2;
    double pi0_star;
    double pi1_star;
    double lambda;   // pi1*/pi0*, in (0,1] for regularized channels
    double lambda1;  // min likelihood ratio = 2^-C2
    double z;        // 2^((h(p0)-h(p1))/(1-p0-p1))
};

inline ChannelStats channel_stats(const ChannelSpec& spec) {
    const double p0 = spec.p0, p1 = spec.p1;
    if (!is_regularized_pair(p0, p1))
        throw std::domain_error("channel_stats: spec not regularized");
    const double denom = 1.0 - p0 - p1;
    if (denom == 0.0)
        throw std::domain_error("channel_stats: 1 - p0 - p1 = 0");

    ChannelStats s{};
    s.C2 = std::log2((1.0 - p1) / p0);
    s.lambda1 = std::exp2(-s.C2);
    if (spec.is_bsc()) {
        // symmetric case reduced so the identities pi* = 1/2 and
        // C1 = (1-2p)*C2 hold exactly, not just to rounding
        s.z = 1.0;
        s.C = 1.0 - binary_entropy(p0);
        s.pi0_star = 0.5;
        s.pi1_star = 0.5;
        s.C1 = (1.0 - 2.0 * p0) * s.C2;
    } else {
        s.z = std::exp2((binary_entropy(p0) - binary_entropy(p1)) / denom);
        const double zp1 = 1.0 + s.z;
        s.C = p0 * binary_entropy(p1) / denom - (1.0 - p1) * binary_entropy(p0) / denom +
              std::log2(zp1);
        s.pi0_star = (1.0 - p1 * zp1) / (denom * zp1);
        s.pi1_star = ((1.0 - p0) * zp1 - 1.0) / (denom * zp1);
        s.C1 = kl_divergence({p1, 1.0 - p1}, {1.0 - p0, p0});
    }
    s.lambda = s.pi1_star / s.pi0_star;
    return s;
}

// Mutual information I(pi0) between input with P(X=0)=pi0 and the BAC output;
// strictly concave in pi0 on (0,1).
inline double mutual_information(double pi0, double p0, double p1) {
    return binary_entropy(pi0 * (1.0 - p0 - p1) + p1) -
           pi0 * (binary_entropy(p0) - binary_entropy(p1)) - binary_entropy(p1);
}

// Numeric capacity: coarse grid then golden-section on the concave I(pi0).
// Independent of the closed form in channel_stats, so the two can check
// each other.
inline double capacity_oracle(const ChannelSpec& spec) {
    const double p0 = spec.p0, p1 = spec.p1;
    constexpr int grid_points = 64;
    double best_x = 0.5, best_f = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < grid_points; ++i) {
        const double x = static_cast<double>(i) / grid_points;
        const double f = mutual_information(x, p0, p1);
        if (f > best_f) {
            best_f = f;
            best_x = x;
        }
    }
    double lo = best_x - 1.0 / grid_points;
    double hi = best_x + 1.0 / grid_points;
    lo = std::max(lo, 1e-12);
    hi = std::min(hi, 1.0 - 1e-12);

    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = mutual_information(x1, p0, p1);
    double f2 = mutual_information(x2, p0, p1);
    while (hi - lo > 1e-12) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = mutual_information(x2, p0, p1);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = mutual_information(x1, p0, p1);
        }
    }
    return mutual_information(0.5 * (lo + hi), p0, p1);
}

// One memoryless channel use. Consumes exactly one uniform draw regardless
// of the input symbol, so streams stay aligned across encoder choices.
inline int sample_output(const ChannelSpec& spec, int x, SplitMix64& rng) {
    const double u = rng.next_double();
    if (x == 0) return u < spec.p0 ? 1 : 0;
    return u < spec.p1 ? 0 : 1;
}

} // namespace sedfc
