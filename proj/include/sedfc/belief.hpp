#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sedfc/channel.hpp"
#include "sedfc/numerics.hpp"

namespace sedfc {

// Posterior over the M candidate messages after t channel outputs.
struct BeliefState {
    std::vector<double> rho;
    std::uint64_t t = 0;

    std::size_t size() const { return rho.size(); }
};

inline BeliefState init_belief(std::size_t M) {
    if (M == 0) throw std::invalid_argument("init_belief: M must be >= 1");
    BeliefState b;
    b.rho.assign(M, 1.0 / static_cast<double>(M));
    b.t = 0;
    return b;
}

// Two-way split of the message set. s0/s1 hold message indices (0-based);
// pi0/pi1 cache the posterior mass of each side.
struct Partition {
    std::vector<std::uint32_t> s0;
    std::vector<std::uint32_t> s1;
    double pi0 = 0.0;
    double pi1 = 0.0;

    // per-message input symbol: mask[i] = 0 if i in s0, 1 if i in s1
    std::vector<std::uint8_t> side_mask(std::size_t M) const {
        std::vector<std::uint8_t> mask(M, 0);
        for (std::uint32_t i : s1) mask[i] = 1;
        return mask;
    }

    int symbol_of(std::uint32_t i) const {
        for (std::uint32_t j : s1)
            if (j == i) return 1;
        return 0;
    }
};

// Builds a partition from explicit index sets, computing the cached masses
// with compensated summation.
inline Partition make_partition(const BeliefState& b, std::vector<std::uint32_t> s0,
                                std::vector<std::uint32_t> s1) {
    Partition p;
    p.s0 = std::move(s0);
    p.s1 = std::move(s1);
    KahanSum m0, m1;
    for (std::uint32_t i : p.s0) m0.add(b.rho[i]);
    for (std::uint32_t i : p.s1) m1.add(b.rho[i]);
    p.pi0 = m0.value();
    p.pi1 = m1.value();
    return p;
}

namespace detail {

// Posterior update factors for output y: the normalizer comes from the
// cached partition masses, so any code path that scales by these factors
// produces bit-identical posteriors.
struct UpdateFactors {
    double f0;
    double f1;
};

inline UpdateFactors update_factors(const Partition& part, int y, const ChannelSpec& spec) {
    const double l0 = spec.likelihood(y, 0);
    const double l1 = spec.likelihood(y, 1);
    const double norm = l0 * part.pi0 + l1 * part.pi1;
    if (!(norm > 0.0))
        throw std::runtime_error("bayes_update: normalizer underflowed to zero");
    return {l0 / norm, l1 / norm};
}

} // namespace detail

// Bayes posterior update for channel output y under the given partition.
inline BeliefState bayes_update(const BeliefState& b, const Partition& part, int y,
                                const ChannelSpec& spec) {
    const auto f = detail::update_factors(part, y, spec);
    BeliefState out;
    out.rho.resize(b.size());
    const auto mask = part.side_mask(b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        out.rho[i] = b.rho[i] * (mask[i] ? f.f1 : f.f0);
    out.t = b.t + 1;
    return out;
}

// log2(rho/(1-rho)); +-inf at the endpoints
inline double llr(double rho) { return std::log2(rho / (1.0 - rho)); }

// Clamped variant for posteriors that may have saturated in double
// precision; `saturated` reports whether clamping occurred.
inline double llr_clamped(double rho, bool& saturated) {
    constexpr double lo = 1e-300;
    constexpr double hi = 1.0 - 1e-16;
    saturated = !(rho >= lo && rho <= hi);
    const double x = rho < lo ? lo : (rho > hi ? hi : rho);
    return std::log2(x / (1.0 - x));
}

// Extrinsic probabilities of message i: the input-group masses recomputed
// with i excluded. Returned as (own symbol, other symbol); the pair sums
// to 1.
inline std::pair<double, double> extrinsic_probs(const BeliefState& b, const Partition& part,
                                                 std::uint32_t i) {
    const double rho_i = b.rho[i];
    if (rho_i >= 1.0) throw std::domain_error("extrinsic_probs: rho_i must be < 1");
    const int x = part.symbol_of(i);
    const double pi_own = x == 0 ? part.pi0 : part.pi1;
    const double pi_other = x == 0 ? part.pi1 : part.pi0;
    return {(pi_own - rho_i) / (1.0 - rho_i), pi_other / (1.0 - rho_i)};
}

// Exact expected one-step increment of U_i given theta = i: the KL
// divergence between P(.|X=x_i) and the extrinsic output mixture.
inline double expected_drift(const BeliefState& b, const Partition& part, std::uint32_t i,
                             const ChannelSpec& spec) {
    const int x = part.symbol_of(i);
    const auto [own, other] = extrinsic_probs(b, part, i);
    const double pi0_ext = x == 0 ? own : other;
    const double pi1_ext = x == 0 ? other : own;
    double d = 0.0;
    for (int y = 0; y < 2; ++y) {
        const double p = spec.likelihood(y, x);
        const double mix = pi0_ext * spec.likelihood(y, 0) + pi1_ext * spec.likelihood(y, 1);
        d += p * std::log2(p / mix);
    }
    return d;
}

// Uniform bound on the one-step LLR change (equals C2).
inline double max_step(const ChannelSpec& spec) {
    return std::log2((1.0 - spec.p1) / spec.p0);
}

} // namespace sedfc
