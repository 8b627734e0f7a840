#pragma once

#include <chrono>
#include <span>
#include <string>
#include <vector>

#include "sedfc/bounds.hpp"
#include "sedfc/session.hpp"

namespace sedfc {

// One sweep row: simulation estimates joined with every bound at that
// operating point.
struct SweepRow {
    unsigned k = 0;
    std::uint64_t M = 0;
    double epsilon = 0.0;
    std::uint64_t trials = 0;
    SimSummary sim;
    BoundSet bounds;
    double runtime_s = 0.0;  // wall clock; excluded from deterministic output
    std::string error;       // nonempty when this row failed
};

// Runs one Monte Carlo ensemble per config and joins it with the bound set.
// Row r uses the derived seed substream_seed(seed, r); rows are emitted in
// input order and a per-row failure does not stop the sweep.
inline std::vector<SweepRow> sweep(std::span<const SessionConfig> cfgs, std::uint64_t trials,
                                   std::uint64_t seed, unsigned workers = 0) {
    if (cfgs.empty()) throw std::invalid_argument("sweep: config list is empty");
    if (trials == 0) throw std::invalid_argument("sweep: trials must be >= 1");

    std::vector<SweepRow> rows;
    rows.reserve(cfgs.size());
    for (std::size_t r = 0; r < cfgs.size(); ++r) {
        const SessionConfig& cfg = cfgs[r];
        SweepRow row;
        row.k = cfg.k;
        row.M = cfg.M;
        row.epsilon = cfg.epsilon;
        row.trials = trials;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            row.sim = monte_carlo(cfg, trials, SplitMix64::substream_seed(seed, r), workers);
            row.bounds = bound_set(cfg.M, cfg.epsilon, cfg.spec, cfg.stats);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace sedfc
