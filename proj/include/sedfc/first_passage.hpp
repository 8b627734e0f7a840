#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sedfc/channel.hpp"
#include "sedfc/parallel.hpp"
#include "sedfc/rng.hpp"

namespace sedfc {

// Expected first-passage time of the generalized Markov chain that models
// the confirmation phase: states S_0..S_n, forward probability q = 1-p,
// backward probability p, and a self loop at S_0 of expected weight delta0
// (the fallback excursion into the communication phase). S_n is absorbing.

struct FirstPassageProblem {
    int n = 1;           // forward states before absorption
    double p = 0.1;      // backward probability, in (0, 1/2)
    double delta0 = 1.0; // expected self-loop weight at S_0, >= 1

    void validate() const {
        if (n < 1) throw std::domain_error("first_passage: n must be >= 1");
        if (!(p > 0.0 && p < 0.5))
            throw std::domain_error("first_passage: p must be in (0, 1/2)");
        if (!(delta0 >= 1.0)) throw std::domain_error("first_passage: delta0 must be >= 1");
    }
};

// v0 = n/(1-2p) + p/(1-2p) * (1 - (p/q)^n) * (delta0 - 2q/(1-2p))
inline double v0_closed_form(const FirstPassageProblem& prob) {
    prob.validate();
    const double p = prob.p, q = 1.0 - prob.p;
    const double w = 1.0 - 2.0 * p;
    return prob.n / w +
           p / w * (1.0 - std::pow(p / q, prob.n)) * (prob.delta0 - 2.0 * q / w);
}

// Delta_{n-1} in closed form; equals iterating Delta_i = 2 + (p/q)*Delta_{i-1}
// n-1 times from delta0.
inline double delta_recursion(const FirstPassageProblem& prob) {
    prob.validate();
    const double p = prob.p, q = 1.0 - prob.p;
    const double r = std::pow(p / q, prob.n - 1);
    return r * prob.delta0 + 2.0 * q / (1.0 - 2.0 * p) * (1.0 - r);
}

// Direct tridiagonal solve of the node equations
//   v_{n-1} = 1 + p v_{n-2}
//   v_j     = 1 + p v_{j-1} + q v_{j+1}   (1 <= j <= n-2)
//   v_0     = q + p v_0 + q v_1 + p delta0
// Independent of the closed form, so the two act as mutual oracles.
inline std::vector<double> node_solve(const FirstPassageProblem& prob) {
    prob.validate();
    if (prob.n > 10000) throw std::domain_error("node_solve: n too large");
    const int n = prob.n;
    const double p = prob.p, q = 1.0 - prob.p;

    std::vector<double> diag(n), upper(n, 0.0), rhs(n);
    diag[0] = q;  // 1 - p
    rhs[0] = q + p * prob.delta0;
    if (n > 1) upper[0] = -q;
    for (int j = 1; j < n; ++j) {
        diag[j] = 1.0;
        rhs[j] = 1.0;
        if (j < n - 1) upper[j] = -q;
    }
    for (int j = 1; j < n; ++j) {
        if (std::abs(diag[j - 1]) < 1e-14)
            throw std::runtime_error("node_solve: singular pivot");
        const double w = -p / diag[j - 1];
        diag[j] -= w * upper[j - 1];
        rhs[j] -= w * rhs[j - 1];
    }
    std::vector<double> v(n);
    if (std::abs(diag[n - 1]) < 1e-14) throw std::runtime_error("node_solve: singular pivot");
    v[n - 1] = rhs[n - 1] / diag[n - 1];
    for (int j = n - 2; j >= 0; --j) v[j] = (rhs[j] - upper[j] * v[j + 1]) / diag[j];
    return v;
}

// Communication-phase bound (surrogate submartingale):
//   E[nu] < log M/C + log(2q)/(qC)
inline double communication_bound(double log2_M, double p) {
    if (!(p > 0.0 && p < 0.5))
        throw std::domain_error("communication_bound: p must be in (0, 1/2)");
    const double q = 1.0 - p;
    const double C = 1.0 - binary_entropy(p);
    return log2_M / C + std::log2(2.0 * q) / (q * C);
}

// Confirmation-phase bound for the BSC(p): the first-passage closed form
// with n relaxed to log((1-eps)/eps)/C2 + 1, exactly as in the derivation.
inline double confirmation_bound(double p, double epsilon) {
    if (!(p > 0.0 && p < 0.5))
        throw std::domain_error("confirmation_bound: p must be in (0, 1/2)");
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::domain_error("confirmation_bound: epsilon must be in (0, 1/2)");
    const double q = 1.0 - p;
    const double C = 1.0 - binary_entropy(p);
    const double C2 = std::log2(q / p);
    const double C1 = (1.0 - 2.0 * p) * C2;
    const double t2 = std::exp2(-C2);
    return (std::log2((1.0 - epsilon) / epsilon) + C2) / C1 +
           t2 * C2 * ((1.0 + std::log2(2.0 * q) / (q * C2)) / C - 1.0 / C1) *
               (1.0 - epsilon / (1.0 - epsilon) * t2) / (1.0 - t2);
}

struct McPassageResult {
    double mean = 0.0;
    double se = 0.0;
    std::uint64_t trials = 0;
};

// Stochastic oracle for the chain: forward w.p. q costs one step, backward
// w.p. p costs one step, the S_0 self loop costs delta0 per traversal.
inline McPassageResult mc_first_passage(const FirstPassageProblem& prob, std::uint64_t trials,
                                        std::uint64_t seed, unsigned workers = 1) {
    prob.validate();
    if (trials == 0) throw std::invalid_argument("mc_first_passage: trials must be >= 1");
    const double q = 1.0 - prob.p;

    struct Accum {
        std::uint64_t steps = 0, loops = 0;
        std::uint64_t steps2 = 0, loops2 = 0, cross = 0;
        void merge(const Accum& o) {
            steps += o.steps;
            loops += o.loops;
            steps2 += o.steps2;
            loops2 += o.loops2;
            cross += o.cross;
        }
    };

    auto acc = parallel_accumulate<Accum>(
        trials, workers, [&](std::uint64_t lo, std::uint64_t hi, Accum& a) {
            for (std::uint64_t i = lo; i < hi; ++i) {
                SplitMix64 rng = SplitMix64::substream(seed, i);
                std::uint64_t steps = 0, loops = 0;
                int pos = 0;
                while (pos < prob.n) {
                    if (pos == 0) {
                        if (rng.next_double() < q) {
                            pos = 1;
                            ++steps;
                        } else {
                            ++loops;
                        }
                    } else {
                        ++steps;
                        pos += rng.next_double() < q ? 1 : -1;
                    }
                }
                a.steps += steps;
                a.loops += loops;
                a.steps2 += steps * steps;
                a.loops2 += loops * loops;
                a.cross += steps * loops;
            }
        });

    const double nn = static_cast<double>(trials);
    const double d0 = prob.delta0;
    const double sum = static_cast<double>(acc.steps) + d0 * static_cast<double>(acc.loops);
    const double sum2 = static_cast<double>(acc.steps2) +
                        2.0 * d0 * static_cast<double>(acc.cross) +
                        d0 * d0 * static_cast<double>(acc.loops2);
    McPassageResult r;
    r.trials = trials;
    r.mean = sum / nn;
    if (trials > 1) {
        const double var = (sum2 - nn * r.mean * r.mean) / (nn - 1.0);
        r.se = var > 0.0 ? std::sqrt(var / nn) : 0.0;
    }
    return r;
}

} // namespace sedfc
