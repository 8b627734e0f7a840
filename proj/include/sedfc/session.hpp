#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sedfc/belief.hpp"
#include "sedfc/channel.hpp"
#include "sedfc/numerics.hpp"
#include "sedfc/parallel.hpp"
#include "sedfc/rng.hpp"
#include "sedfc/sed_encoder.hpp"

namespace sedfc {

// Full variable-length transmission sessions: SED encoder + channel + Bayes
// decoder + the max-posterior stopping rule, plus the Monte Carlo ensemble
// with deterministic per-trial substreams.

struct SessionConfig {
    ChannelSpec spec;
    ChannelStats stats;
    unsigned k = 1;          // message bits, M = 2^k
    std::uint64_t M = 2;
    double epsilon = 1e-3;   // target error probability, in (0, 1/2)
    EncoderConfig encoder;
    std::uint64_t max_steps = 0;  // 0 = auto cap (100x the leading bound terms)
};

inline SessionConfig make_session_config(const ChannelSpec& spec, unsigned k, double epsilon,
                                         SedAlgorithm alg = SedAlgorithm::greedy,
                                         std::uint64_t max_steps = 0) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::domain_error("session: epsilon must be in (0, 1/2)");
    if (k > 30) throw std::domain_error("session: k too large");
    SessionConfig cfg;
    cfg.spec = spec;
    cfg.stats = channel_stats(spec);
    cfg.k = k;
    cfg.M = std::uint64_t{1} << k;
    cfg.epsilon = epsilon;
    cfg.encoder = make_encoder_config(cfg.stats, alg);
    cfg.max_steps = max_steps;
    return cfg;
}

inline std::uint64_t resolved_max_steps(const SessionConfig& cfg) {
    if (cfg.max_steps > 0) return cfg.max_steps;
    const double lead = static_cast<double>(cfg.k) / cfg.stats.C +
                        std::log2((1.0 - cfg.epsilon) / cfg.epsilon) / cfg.stats.C1;
    return static_cast<std::uint64_t>(std::ceil(100.0 * lead)) + 1;
}

struct TrialRecord {
    std::uint64_t tau = 0;
    std::uint32_t theta = 0;
    std::uint32_t theta_hat = 0;
    bool correct = false;
    bool capped = false;             // hit max_steps before stopping (bug signal)
    std::optional<std::uint64_t> nu; // first t with rho_theta >= 1/2
    std::uint32_t fallbacks = 0;     // confirmation -> communication returns of theta
    double final_max_rho = 0.0;
};

namespace detail {

struct TrialWorkspace {
    std::vector<SortedEntry> order;  // belief sorted by (rho desc, index asc)
    std::vector<SortedEntry> buf0;
    std::vector<SortedEntry> buf1;
    std::vector<std::uint8_t> side;  // per sorted position
    std::vector<double> rho_by_index;
};

inline UpdateFactors update_factors_masses(double pi0, double pi1, int y,
                                           const ChannelSpec& spec) {
    const double l0 = spec.likelihood(y, 0);
    const double l1 = spec.likelihood(y, 1);
    const double norm = l0 * pi0 + l1 * pi1;
    if (!(norm > 0.0))
        throw std::runtime_error("bayes_update: normalizer underflowed to zero");
    return {l0 / norm, l1 / norm};
}

// Scaling by a common factor is monotone but not strictly: distinct
// posteriors can round to the same product. Runs of equal values must then
// be reordered by index to restore the canonical (rho desc, index asc)
// order that a full sort would produce.
inline void sort_ties_by_index(std::vector<SortedEntry>& v) {
    for (std::size_t i = 1; i < v.size();) {
        if (v[i].rho == v[i - 1].rho) {
            std::size_t j = i + 1;
            while (j < v.size() && v[j].rho == v[i - 1].rho) ++j;
            std::sort(v.begin() + (i - 1), v.begin() + j,
                      [](const SortedEntry& a, const SortedEntry& b) {
                          return a.index < b.index;
                      });
            i = j;
        } else {
            ++i;
        }
    }
}

// Fast greedy-encoder path. Keeps the belief sorted across steps: a Bayes
// update scales each side by a constant, so the two sides stay internally
// sorted and one O(M) merge restores global order. Produces posteriors
// bit-identical to composing encode_step + bayes_update.
inline TrialRecord run_trial_sorted(const SessionConfig& cfg, std::uint32_t theta,
                                    SplitMix64& rng, TrialWorkspace& ws) {
    const std::size_t M = static_cast<std::size_t>(cfg.M);
    const double stop_at = 1.0 - cfg.epsilon;
    const std::uint64_t cap = resolved_max_steps(cfg);
    const double lambda = cfg.encoder.lambda;

    ws.order.resize(M);
    ws.side.resize(M);
    ws.rho_by_index.resize(M);
    ws.buf0.clear();
    ws.buf1.clear();
    const double u = 1.0 / static_cast<double>(M);
    for (std::size_t i = 0; i < M; ++i) {
        ws.order[i] = {u, static_cast<std::uint32_t>(i)};
        ws.rho_by_index[i] = u;
    }

    TrialRecord rec;
    rec.theta = theta;
    double rho_theta = u;
    bool in_confirm = rho_theta >= 0.5;
    if (in_confirm) rec.nu = 0;

    std::uint64_t t = 0;
    while (ws.order[0].rho < stop_at && t < cap) {
        double pi0, pi1;
        int x_theta;
        const bool confirm = ws.order[0].rho >= cfg.encoder.pi1_star;
        if (confirm) {
            const std::uint32_t top = ws.order[0].index;
            pi1 = ws.order[0].rho;
            KahanSum m0;
            for (std::size_t i = 0; i < M; ++i)
                if (i != top) m0.add(ws.rho_by_index[i]);
            pi0 = m0.value();
            x_theta = top == theta ? 1 : 0;
        } else {
            auto masses = greedy_assign({ws.order.data(), M}, lambda, ws.side.data());
            pi0 = masses.first;
            pi1 = masses.second;
            x_theta = 0;
            for (std::size_t pos = 0; pos < M; ++pos)
                if (ws.order[pos].index == theta) {
                    x_theta = ws.side[pos];
                    break;
                }
        }

        const int y = sample_output(cfg.spec, x_theta, rng);
        const auto f = update_factors_masses(pi0, pi1, y, cfg.spec);

        ws.buf0.clear();
        ws.buf1.clear();
        if (confirm) {
            const auto& topE = ws.order[0];
            ws.buf1.push_back({topE.rho * f.f1, topE.index});
            for (std::size_t pos = 1; pos < M; ++pos)
                ws.buf0.push_back({ws.order[pos].rho * f.f0, ws.order[pos].index});
        } else {
            for (std::size_t pos = 0; pos < M; ++pos) {
                const auto& e = ws.order[pos];
                if (ws.side[pos])
                    ws.buf1.push_back({e.rho * f.f1, e.index});
                else
                    ws.buf0.push_back({e.rho * f.f0, e.index});
            }
        }
        sort_ties_by_index(ws.buf0);
        sort_ties_by_index(ws.buf1);
        // merge the two scaled descending halves
        std::size_t a = 0, b = 0, o = 0;
        while (a < ws.buf0.size() && b < ws.buf1.size())
            ws.order[o++] = descending(ws.buf0[a], ws.buf1[b]) ? ws.buf0[a++] : ws.buf1[b++];
        while (a < ws.buf0.size()) ws.order[o++] = ws.buf0[a++];
        while (b < ws.buf1.size()) ws.order[o++] = ws.buf1[b++];
        for (std::size_t pos = 0; pos < M; ++pos)
            ws.rho_by_index[ws.order[pos].index] = ws.order[pos].rho;

        rho_theta *= x_theta ? f.f1 : f.f0;
        ++t;
        const bool conf_now = rho_theta >= 0.5;
        if (conf_now && !rec.nu) rec.nu = t;
        if (in_confirm && !conf_now) ++rec.fallbacks;
        in_confirm = conf_now;
    }

    rec.tau = t;
    rec.theta_hat = ws.order[0].index;
    rec.final_max_rho = ws.order[0].rho;
    rec.correct = rec.theta_hat == theta;
    rec.capped = ws.order[0].rho < stop_at;
    return rec;
}

// Reference path built from the public ops; handles both algorithms.
inline TrialRecord run_trial_generic(const SessionConfig& cfg, std::uint32_t theta,
                                     SplitMix64& rng) {
    const std::size_t M = static_cast<std::size_t>(cfg.M);
    const double stop_at = 1.0 - cfg.epsilon;
    const std::uint64_t cap = resolved_max_steps(cfg);

    BeliefState b = init_belief(M);
    TrialRecord rec;
    rec.theta = theta;
    bool in_confirm = b.rho[theta] >= 0.5;
    if (in_confirm) rec.nu = 0;

    auto max_index = [&]() {
        std::uint32_t best = 0;
        for (std::uint32_t i = 1; i < M; ++i)
            if (b.rho[i] > b.rho[best]) best = i;
        return best;
    };

    while (b.rho[max_index()] < stop_at && b.t < cap) {
        const Partition part = encode_step(b, cfg.encoder);
        const auto mask = part.side_mask(M);
        const int y = sample_output(cfg.spec, mask[theta], rng);
        b = bayes_update(b, part, y, cfg.spec);
        const bool conf_now = b.rho[theta] >= 0.5;
        if (conf_now && !rec.nu) rec.nu = b.t;
        if (in_confirm && !conf_now) ++rec.fallbacks;
        in_confirm = conf_now;
    }

    rec.tau = b.t;
    rec.theta_hat = max_index();
    rec.final_max_rho = b.rho[rec.theta_hat];
    rec.correct = rec.theta_hat == theta;
    rec.capped = rec.final_max_rho < stop_at;
    return rec;
}

} // namespace detail

// One transmission session for a given message. The rng stream is consumed
// as: one uniform per channel use (nothing else), so trials are reproducible
// from (cfg, theta, stream).
inline TrialRecord run_trial(const SessionConfig& cfg, std::uint32_t theta, SplitMix64& rng) {
    if (theta >= cfg.M) throw std::invalid_argument("run_trial: theta out of range");
    if (cfg.encoder.algorithm == SedAlgorithm::greedy) {
        detail::TrialWorkspace ws;
        return detail::run_trial_sorted(cfg, theta, rng, ws);
    }
    return detail::run_trial_generic(cfg, theta, rng);
}

struct SimSummary {
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    std::uint64_t anomalies = 0;   // capped trials; any nonzero count fails the run
    std::uint64_t nu_unset = 0;    // trials where rho_theta never crossed 1/2
    double avg_tau = 0.0;
    double tau_stderr = 0.0;
    double pe_hat = 0.0;
    double pe_lo = 0.0;
    double pe_hi = 0.0;            // Wilson 95% bounds
    double rate = 0.0;             // log2(M) / avg_tau
    double avg_nu = 0.0;
    double nu_stderr = 0.0;
    double avg_confirm = 0.0;      // avg of tau - nu
    double confirm_stderr = 0.0;
    double avg_fallbacks = 0.0;
};

namespace detail {

// Integer accumulators only: sums of u64 are exact and commutative, which
// makes the aggregate independent of worker count and iteration order.
struct TrialAccum {
    std::uint64_t n = 0, errors = 0, capped = 0, nu_unset = 0;
    std::uint64_t sum_tau = 0, sum_tau2 = 0;
    std::uint64_t sum_nu = 0, sum_nu2 = 0;
    std::uint64_t sum_conf = 0, sum_conf2 = 0;
    std::uint64_t sum_fb = 0;

    void add(const TrialRecord& r) {
        ++n;
        if (!r.correct) ++errors;
        if (r.capped) ++capped;
        // a trial whose true message never entered confirmation counts as
        // all communication phase
        const std::uint64_t nu = r.nu ? *r.nu : r.tau;
        if (!r.nu) ++nu_unset;
        const std::uint64_t conf = r.tau - nu;
        sum_tau += r.tau;
        sum_tau2 += r.tau * r.tau;
        sum_nu += nu;
        sum_nu2 += nu * nu;
        sum_conf += conf;
        sum_conf2 += conf * conf;
        sum_fb += r.fallbacks;
    }

    void merge(const TrialAccum& o) {
        n += o.n;
        errors += o.errors;
        capped += o.capped;
        nu_unset += o.nu_unset;
        sum_tau += o.sum_tau;
        sum_tau2 += o.sum_tau2;
        sum_nu += o.sum_nu;
        sum_nu2 += o.sum_nu2;
        sum_conf += o.sum_conf;
        sum_conf2 += o.sum_conf2;
        sum_fb += o.sum_fb;
    }
};

inline double mean_of(std::uint64_t sum, std::uint64_t n) {
    return n ? static_cast<double>(sum) / static_cast<double>(n) : 0.0;
}

inline double stderr_of(std::uint64_t sum, std::uint64_t sum2, std::uint64_t n) {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    const double mean = static_cast<double>(sum) / nn;
    const double var = (static_cast<double>(sum2) - nn * mean * mean) / (nn - 1.0);
    return var > 0.0 ? std::sqrt(var / nn) : 0.0;
}

inline SimSummary summarize(const TrialAccum& a, std::uint64_t M) {
    SimSummary s;
    s.trials = a.n;
    s.errors = a.errors;
    s.anomalies = a.capped;
    s.nu_unset = a.nu_unset;
    s.avg_tau = mean_of(a.sum_tau, a.n);
    s.tau_stderr = stderr_of(a.sum_tau, a.sum_tau2, a.n);
    s.pe_hat = a.n ? static_cast<double>(a.errors) / static_cast<double>(a.n) : 0.0;
    const auto w = wilson_interval(a.errors, a.n);
    s.pe_lo = w.lo;
    s.pe_hi = w.hi;
    s.rate = s.avg_tau > 0.0 ? std::log2(static_cast<double>(M)) / s.avg_tau : 0.0;
    s.avg_nu = mean_of(a.sum_nu, a.n);
    s.nu_stderr = stderr_of(a.sum_nu, a.sum_nu2, a.n);
    s.avg_confirm = mean_of(a.sum_conf, a.n);
    s.confirm_stderr = stderr_of(a.sum_conf, a.sum_conf2, a.n);
    s.avg_fallbacks = mean_of(a.sum_fb, a.n);
    return s;
}

} // namespace detail

// Monte Carlo ensemble. Trial i draws theta and its channel noise from
// substream(seed, i), so the estimate is a pure function of
// (cfg, trials, seed) regardless of worker count or execution order.
inline SimSummary monte_carlo(const SessionConfig& cfg, std::uint64_t trials,
                              std::uint64_t seed, unsigned workers = 0) {
    if (trials == 0) throw std::invalid_argument("monte_carlo: trials must be >= 1");
    auto accum = parallel_accumulate<detail::TrialAccum>(
        trials, workers,
        [&](std::uint64_t lo, std::uint64_t hi, detail::TrialAccum& acc) {
            detail::TrialWorkspace ws;
            for (std::uint64_t i = lo; i < hi; ++i) {
                SplitMix64 rng = SplitMix64::substream(seed, i);
                const auto theta = static_cast<std::uint32_t>(rng.next_below(cfg.M));
                TrialRecord rec = cfg.encoder.algorithm == SedAlgorithm::greedy
                                      ? detail::run_trial_sorted(cfg, theta, rng, ws)
                                      : detail::run_trial_generic(cfg, theta, rng);
                acc.add(rec);
            }
        });
    return detail::summarize(accum, cfg.M);
}

} // namespace sedfc
