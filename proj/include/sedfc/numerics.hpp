#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace sedfc {

// 95% two-sided normal quantile, used for Wilson score intervals
inline constexpr double kZ95 = 1.959963984540054;

// Kahan compensated accumulator; keeps running partition masses accurate to
// a few ulps independent of the number of terms.
struct KahanSum {
    double sum = 0.0;
    double c = 0.0;

    void add(double x) {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// pairwise (cascade) summation, error O(log n) ulps
inline double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct WilsonInterval {
    double lo;
    double hi;
};

// Wilson score interval for a binomial proportion (z = kZ95)
inline WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n) {
    if (n == 0) return {0.0, 1.0};
    const double z = kZ95;
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(successes) / nn;
    const double denom = 1.0 + z * z / nn;
    const double center = phat + z * z / (2.0 * nn);
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn));
    return {(center - half) / denom, (center + half) / denom};
}

} // namespace sedfc
