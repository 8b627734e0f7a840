#pragma once

#include <algorithm>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "sedfc/belief.hpp"
#include "sedfc/channel.hpp"

namespace sedfc {

// Encoder for the regularized BAC. In the communication phase it partitions
// the message set so the weighted posterior-mass difference
// lambda*pi0 - pi1 is bounded by the smallest member posterior on either
// side (the SED condition). Once the top posterior reaches pi1*, the top
// message is assigned input 1 exclusively.
//
// All tie-breaking (argmax, argmin, equal posteriors in sort order) is by
// lowest message index, making partitions deterministic.

enum class SedAlgorithm { original, greedy };

struct EncoderConfig {
    SedAlgorithm algorithm = SedAlgorithm::greedy;
    double lambda = 1.0;    // pi1*/pi0*
    double pi1_star = 0.5;  // confirmation threshold
};

inline EncoderConfig make_encoder_config(const ChannelStats& stats,
                                         SedAlgorithm alg = SedAlgorithm::greedy) {
    return EncoderConfig{alg, stats.lambda, stats.pi1_star};
}

// SED condition: -min_{S1} rho <= lambda*pi0 - pi1 <= lambda*min_{S0} rho,
// with min over an empty side treated as +inf. A 1e-12 slack keeps double
// rounding from flipping exactly-balanced states.
inline bool check_sed_condition(const BeliefState& b, const Partition& part, double lambda) {
    constexpr double slack = 1e-12;
    const double inf = std::numeric_limits<double>::infinity();
    double min0 = inf, min1 = inf;
    for (std::uint32_t i : part.s0) min0 = std::min(min0, b.rho[i]);
    for (std::uint32_t i : part.s1) min1 = std::min(min1, b.rho[i]);
    const double delta = lambda * part.pi0 - part.pi1;
    const double lo = min1 == inf ? -inf : -min1;
    const double hi = min0 == inf ? inf : lambda * min0;
    return delta >= lo - slack && delta <= hi + slack;
}

// Objective of the partition minimization problem whose minimizer provably
// satisfies the SED condition:
//   f(S0) = lambda*(pi1 - lambda*pi0)  if pi1 >= lambda*pi0
//           (lambda*pi0 - pi1)         otherwise
inline double objective_f(std::span<const std::uint32_t> s0, const BeliefState& b,
                          double lambda) {
    std::vector<std::uint8_t> in0(b.size(), 0);
    for (std::uint32_t i : s0) in0[i] = 1;
    KahanSum m0, m1;
    for (std::size_t i = 0; i < b.size(); ++i)
        (in0[i] ? m0 : m1).add(b.rho[i]);
    const double pi0 = m0.value(), pi1 = m1.value();
    if (pi1 >= lambda * pi0) return lambda * (pi1 - lambda * pi0);
    return lambda * pi0 - pi1;
}

namespace detail {

struct SortedEntry {
    double rho;
    std::uint32_t index;
};

inline bool descending(const SortedEntry& a, const SortedEntry& b) {
    return a.rho > b.rho || (a.rho == b.rho && a.index < b.index);
}

// Greedy pass over entries already sorted in descending posterior order.
// Writes the chosen input symbol per position and returns the compensated
// side masses. Shared by the public op and the simulator's hot loop.
inline std::pair<double, double> greedy_assign(std::span<const SortedEntry> sorted,
                                               double lambda, std::uint8_t* side) {
    KahanSum m0, m1;
    for (std::size_t s = 0; s < sorted.size(); ++s) {
        if (s == 0 || m1.value() >= lambda * m0.value()) {
            side[s] = 0;
            m0.add(sorted[s].rho);
        } else {
            side[s] = 1;
            m1.add(sorted[s].rho);
        }
    }
    return {m0.value(), m1.value()};
}

inline std::vector<SortedEntry> sorted_entries(const BeliefState& b) {
    std::vector<SortedEntry> v(b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        v[i] = {b.rho[i], static_cast<std::uint32_t>(i)};
    std::sort(v.begin(), v.end(), descending);
    return v;
}

} // namespace detail

// Greedy SED partitioning: visit messages in decreasing posterior order,
// place the first in S0, then each next one in S0 iff pi1 >= lambda*pi0.
// The result provably satisfies the SED condition.
inline Partition sed_partition_greedy(const BeliefState& b, double lambda) {
    const auto sorted = detail::sorted_entries(b);
    std::vector<std::uint8_t> side(b.size());
    auto [pi0, pi1] = detail::greedy_assign(sorted, lambda, side.data());
    Partition p;
    p.pi0 = pi0;
    p.pi1 = pi1;
    for (std::size_t s = 0; s < sorted.size(); ++s)
        (side[s] ? p.s1 : p.s0).push_back(sorted[s].index);
    return p;
}

// Original SED partitioning: start from S0 = all, S1 = empty, and move the
// minimum-posterior element across the boundary until the SED condition
// holds. The objective f strictly decreases with each move in exact
// arithmetic; the 4M iteration cap is a floating-point cycle guard.
inline Partition sed_partition_original(const BeliefState& b, double lambda) {
    const std::size_t M = b.size();
    using Entry = std::pair<double, std::uint32_t>;
    std::set<Entry> set0, set1;
    KahanSum m0, m1;
    for (std::size_t i = 0; i < M; ++i) {
        set0.insert({b.rho[i], static_cast<std::uint32_t>(i)});
        m0.add(b.rho[i]);
    }

    const std::size_t cap = 4 * M;
    std::size_t iter = 0;
    while (true) {
        const double delta = lambda * m0.value() - m1.value();
        const double min0 = set0.empty() ? std::numeric_limits<double>::infinity()
                                         : set0.begin()->first;
        const double min1 = set1.empty() ? 0.0 : set1.begin()->first;
        const bool move_to_0 = delta < -min1 && !set1.empty();
        const bool move_to_1 = delta > lambda * min0 && !set0.empty();
        if (!move_to_0 && !move_to_1) break;
        if (++iter > cap)
            throw std::runtime_error("sed_partition_original: iteration cap exceeded");
        if (move_to_0) {
            const Entry e = *set1.begin();
            set1.erase(set1.begin());
            set0.insert(e);
            m0.add(e.first);
            m1.add(-e.first);
        } else {
            const Entry e = *set0.begin();
            set0.erase(set0.begin());
            set1.insert(e);
            m0.add(-e.first);
            m1.add(e.first);
        }
    }

    Partition p;
    p.pi0 = m0.value();
    p.pi1 = m1.value();
    for (const auto& e : set0) p.s0.push_back(e.second);
    for (const auto& e : set1) p.s1.push_back(e.second);
    return p;
}

// One encoding step: exclusive assignment of the top message once its
// posterior reaches pi1*, otherwise the configured partitioning algorithm.
inline Partition encode_step(const BeliefState& b, const EncoderConfig& cfg) {
    if (b.size() == 0) throw std::invalid_argument("encode_step: empty belief state");

    std::uint32_t top = 0;
    for (std::uint32_t i = 1; i < b.size(); ++i)
        if (b.rho[i] > b.rho[top]) top = i;

    Partition p;
    if (b.rho[top] >= cfg.pi1_star) {
        p.s1.push_back(top);
        KahanSum m0;
        for (std::uint32_t i = 0; i < b.size(); ++i)
            if (i != top) {
                p.s0.push_back(i);
                m0.add(b.rho[i]);
            }
        p.pi0 = m0.value();
        p.pi1 = b.rho[top];
    } else {
        p = cfg.algorithm == SedAlgorithm::greedy ? sed_partition_greedy(b, cfg.lambda)
                                                  : sed_partition_original(b, cfg.lambda);
        if (!check_sed_condition(b, p, cfg.lambda))
            throw std::logic_error("encode_step: partition violates the SED condition");
    }
    return p;
}

} // namespace sedfc
