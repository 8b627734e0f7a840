#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "sedfc/channel.hpp"
#include "sedfc/first_passage.hpp"

namespace sedfc {

// Non-asymptotic average-blocklength bounds for the SED system, plus the
// variable-length-coding converses. Upper bounds hold for any channel with
// the given (C, C1, C2); the refined thm6 form is BSC-only.

// E[tau] <= (log M + log log(M/eps))/C + (log(1/eps) + 1)/C1 + 96*2^(2C2)/(C*C1)
inline double bound_thm1(std::uint64_t M, double epsilon, const ChannelStats& s) {
    if (M < 2) throw std::domain_error("bound_thm1: M must be >= 2");
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::domain_error("bound_thm1: epsilon must be in (0, 1/2)");
    const double log2M = std::log2(static_cast<double>(M));
    const double inner = log2M + std::log2(1.0 / epsilon);
    if (inner <= 1.0) throw std::domain_error("bound_thm1: log2(M/eps) <= 1");
    return (log2M + std::log2(inner)) / s.C + (std::log2(1.0 / epsilon) + 1.0) / s.C1 +
           96.0 * std::exp2(2.0 * s.C2) / (s.C * s.C1);
}

// E[tau] <= log M/C + log((1-eps)/eps)/C1 + 3*C2^2/(C*C1)
inline double bound_cor1(std::uint64_t M, double epsilon, const ChannelStats& s) {
    if (M < 2) throw std::domain_error("bound_cor1: M must be >= 2");
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::domain_error("bound_cor1: epsilon must be in (0, 1/2)");
    return std::log2(static_cast<double>(M)) / s.C +
           std::log2((1.0 - epsilon) / epsilon) / s.C1 + 3.0 * s.C2 * s.C2 / (s.C * s.C1);
}

// Submartingale-synthesis bound for the regularized BAC:
// E[tau] < log M/C + (log((1-eps)/eps) + C2)/C1
//          + C2*(1/C - 1/C1)*(1 - eps/(1-eps)*2^-C2)/(1 - 2^-C2)
inline double bound_thm3_bac(std::uint64_t M, double epsilon, const ChannelStats& s) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::domain_error("bound_thm3_bac: epsilon must be in (0, 1/2)");
    const double t2 = std::exp2(-s.C2);
    return std::log2(static_cast<double>(M)) / s.C +
           (std::log2((1.0 - epsilon) / epsilon) + s.C2) / s.C1 +
           s.C2 * (1.0 / s.C - 1.0 / s.C1) * (1.0 - epsilon / (1.0 - epsilon) * t2) /
               (1.0 - t2);
}

// Refined two-phase bound for the BSC(p): the communication-phase bound plus
// the confirmation-phase first-passage bound.
inline double bound_thm6_bsc(std::uint64_t M, double epsilon, double p) {
    return communication_bound(std::log2(static_cast<double>(M)), p) +
           confirmation_bound(p, epsilon);
}

namespace detail {

inline double f_m(double x, double log2_Mm1) {
    return x * log2_Mm1 + binary_entropy(x);
}

// Objective of the sup-form converse at a given xi.
inline double converse_objective(double xi, double log2M, double log2_Mm1, double epsilon,
                                 const ChannelStats& s) {
    const double first =
        (log2M - f_m(xi, log2_Mm1) -
         std::min(f_m(epsilon, log2_Mm1), epsilon / xi * log2M)) /
        s.C;
    const double second = (1.0 - epsilon) / s.C1 *
                              std::log2(s.lambda1 * xi / (epsilon * (1.0 - xi))) -
                          binary_entropy(epsilon) / s.C1;
    return first + std::max(second, 0.0);
}

} // namespace detail

// Weak converse: E[tau] >= ((1-eps)*log M - h(eps))/C
inline double converse_weak_form(std::uint64_t M, double epsilon, const ChannelStats& s) {
    return ((1.0 - epsilon) * std::log2(static_cast<double>(M)) - binary_entropy(epsilon)) /
           s.C;
}

// Sup-form converse over xi in (0, (M-1)/M]: 1024-point grid, then
// golden-section refinement around the best grid point. The objective is not
// proven unimodal, so the grid guards against local maxima.
inline double converse_sup_form(std::uint64_t M, double epsilon, const ChannelStats& s) {
    if (M < 2) throw std::domain_error("converse: M must be >= 2");
    if (!(epsilon > 0.0 && epsilon <= 1.0 - 1.0 / static_cast<double>(M)))
        throw std::domain_error("converse: epsilon must be in (0, 1-1/M]");

    const double log2M = std::log2(static_cast<double>(M));
    const double log2_Mm1 = std::log2(static_cast<double>(M - 1));
    const double hi = static_cast<double>(M - 1) / static_cast<double>(M);
    auto obj = [&](double xi) {
        return detail::converse_objective(xi, log2M, log2_Mm1, epsilon, s);
    };

    constexpr int grid = 1024;
    const double step = hi / grid;
    double best_xi = step, best_val = obj(step);
    for (int i = 2; i <= grid; ++i) {
        const double xi = step * i;
        const double v = obj(xi);
        if (v > best_val) {
            best_val = v;
            best_xi = xi;
        }
    }

    double lo = std::max(best_xi - step, step * 1e-6);
    double hiR = std::min(best_xi + step, hi);
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hiR - inv_phi * (hiR - lo);
    double x2 = lo + inv_phi * (hiR - lo);
    double f1 = obj(x1), f2 = obj(x2);
    while (hiR - lo > 1e-9) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hiR - lo);
            f2 = obj(x2);
        } else {
            hiR = x2;
            x2 = x1;
            f2 = f1;
            x1 = hiR - inv_phi * (hiR - lo);
            f1 = obj(x1);
        }
    }
    return std::max(best_val, obj(0.5 * (lo + hiR)));
}

// Reported converse: the larger of the two lower bounds, clamped at 0.
inline double converse_vlf(std::uint64_t M, double epsilon, const ChannelStats& s) {
    return std::max({converse_sup_form(M, epsilon, s), converse_weak_form(M, epsilon, s),
                     0.0});
}

// Reliability function E(R) = C1*(1 - R/C) for 0 <= R <= C.
inline double error_exponent(double R, const ChannelStats& s) {
    if (!(R >= 0.0 && R <= s.C))
        throw std::domain_error("error_exponent: R must be in [0, C]");
    return s.C1 * (1.0 - R / s.C);
}

struct BoundSet {
    double log2_M = 0.0;
    double thm1 = 0.0;
    double cor1 = 0.0;
    double thm3_bac = 0.0;
    std::optional<double> thm6_bsc;  // BSC channels only
    double converse_sup = 0.0;
    double converse_weak = 0.0;
    double converse = 0.0;           // max of the two, clamped at 0

    double rate_of(double bound) const { return log2_M / bound; }
};

inline BoundSet bound_set(std::uint64_t M, double epsilon, const ChannelSpec& spec,
                          const ChannelStats& stats) {
    BoundSet b;
    b.log2_M = std::log2(static_cast<double>(M));
    b.thm1 = bound_thm1(M, epsilon, stats);
    b.cor1 = bound_cor1(M, epsilon, stats);
    b.thm3_bac = bound_thm3_bac(M, epsilon, stats);
    if (spec.is_bsc()) b.thm6_bsc = bound_thm6_bsc(M, epsilon, spec.p0);
    b.converse_sup = converse_sup_form(M, epsilon, stats);
    b.converse_weak = converse_weak_form(M, epsilon, stats);
    b.converse = std::max({b.converse_sup, b.converse_weak, 0.0});
    return b;
}

} // namespace sedfc
