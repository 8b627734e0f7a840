#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sedfc/belief.hpp"
#include "sedfc/channel.hpp"
#include "sedfc/rng.hpp"

namespace sedfc::testing {

// Random regularized channel away from the zero-capacity boundary.
inline ChannelSpec random_regularized_channel(SplitMix64& rng) {
    const double p0 = 0.02 + 0.46 * rng.next_double();
    const double hi = std::min(0.96, 1.0 - p0 - 0.02);
    const double p1 = p0 + (hi - p0) * rng.next_double();
    return regularize(p0, p1);
}

// Dirichlet(1)-style random posterior over M messages.
inline BeliefState random_belief(SplitMix64& rng, std::size_t M) {
    BeliefState b;
    b.rho.resize(M);
    double sum = 0.0;
    for (auto& r : b.rho) {
        r = -std::log(1.0 - rng.next_double());
        sum += r;
    }
    for (auto& r : b.rho) r /= sum;
    return b;
}

// Random belief satisfying max rho < pi1_star. M >= 2 messages cannot
// satisfy this for M = 2 (one of two posteriors is always >= 1/2 >= pi1*),
// so M starts at the smallest size that can. If the raw draw violates the
// constraint, the state is mixed toward uniform just enough to fix it.
inline BeliefState random_communication_belief(SplitMix64& rng, double pi1_star,
                                               std::size_t max_M = 64) {
    const auto min_M = static_cast<std::size_t>(std::ceil(1.0 / pi1_star)) + 1;
    const std::size_t lo = std::max<std::size_t>(3, min_M);
    const std::size_t M = lo + rng.next_below(max_M - lo + 1);
    BeliefState b = random_belief(rng, M);
    const double mx = *std::max_element(b.rho.begin(), b.rho.end());
    const double u = 1.0 / static_cast<double>(M);
    if (mx >= pi1_star) {
        const double alpha = 0.9 * (pi1_star - u) / (mx - u);
        for (auto& r : b.rho) r = alpha * r + (1.0 - alpha) * u;
    }
    return b;
}

} // namespace sedfc::testing
