#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sedfc/report.hpp"

namespace sedfc::cli {

// Exit codes: 0 success, 2 usage error, 3 domain/validation error,
// 4 anomaly (a trial hit the step cap).
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitAnomaly = 4;

namespace detail {

inline std::vector<unsigned> parse_k_range(const std::string& text) {
    const auto dots = text.find("..");
    unsigned lo = 0, hi = 0;
    try {
        if (dots == std::string::npos) {
            lo = hi = static_cast<unsigned>(std::stoul(text));
        } else {
            lo = static_cast<unsigned>(std::stoul(text.substr(0, dots)));
            hi = static_cast<unsigned>(std::stoul(text.substr(dots + 2)));
        }
    } catch (const std::exception&) {
        throw CLI::ValidationError("--k", "expected K or LO..HI, got '" + text + "'");
    }
    if (lo < 1 || hi < lo || hi > 22)
        throw CLI::ValidationError("--k", "k range must satisfy 1 <= lo <= hi <= 22");
    std::vector<unsigned> ks;
    for (unsigned k = lo; k <= hi; ++k) ks.push_back(k);
    return ks;
}

inline unsigned workers_from_env() {
    const char* env = std::getenv("SED_THREADS");
    if (!env || !*env) return 0;  // auto
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0 || v > 1024)
        throw std::domain_error("SED_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* stream = nullptr;

    void open(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "-") {
            stream = &fallback;
            return;
        }
        file.open(path, std::ios::binary);
        if (!file) throw std::domain_error("cannot open output file: " + path);
        stream = &file;
    }
    std::ostream& get() { return *stream; }
};

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"SED-encoder simulator and bound evaluator for binary asymmetric "
                 "channels with feedback"};
    app.require_subcommand(1);

    double p0 = 0.0, p1 = 0.0, epsilon = 1e-3, fp_p = 0.1, fp_delta0 = 1.0;
    // empty format = per-command default: human text for stats, csv elsewhere
    std::string k_text = "1", output, format, algorithm = "greedy";
    std::uint64_t trials = 10000, seed = 1, fp_trials = 1000000, max_steps = 0;
    int fp_n = 1;
    bool emit_runtime = false;

    auto add_channel = [&](CLI::App* c) {
        c->add_option("--p0", p0, "crossover P(Y=1|X=0)")->required();
        c->add_option("--p1", p1, "crossover P(Y=0|X=1)")->required();
    };
    auto add_output = [&](CLI::App* c) {
        c->add_option("--output", output, "output path (default stdout)");
        c->add_option("--format", format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* stats = app.add_subcommand("stats", "channel constants C, C1, C2, pi*");
    add_channel(stats);
    add_output(stats);

    CLI::App* bounds = app.add_subcommand("bounds", "achievability and converse bounds");
    add_channel(bounds);
    bounds->add_option("--k", k_text, "message bits, K or LO..HI")->required();
    bounds->add_option("--epsilon", epsilon, "target error probability");
    add_output(bounds);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo session ensemble");
    add_channel(simulate);
    simulate->add_option("--k", k_text, "message bits")->required();
    simulate->add_option("--epsilon", epsilon, "target error probability");
    simulate->add_option("--trials", trials, "number of trials");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--algorithm", algorithm, "partition algorithm")
        ->check(CLI::IsMember({"greedy", "original"}));
    simulate->add_option("--max-steps", max_steps, "step cap per trial (0 = auto)");
    add_output(simulate);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "simulation vs bounds over a k range");
    add_channel(sweep_cmd);
    sweep_cmd->add_option("--k", k_text, "message bits, K or LO..HI")->required();
    sweep_cmd->add_option("--epsilon", epsilon, "target error probability");
    sweep_cmd->add_option("--trials", trials, "trials per k");
    sweep_cmd->add_option("--seed", seed, "RNG seed");
    sweep_cmd->add_option("--algorithm", algorithm, "partition algorithm")
        ->check(CLI::IsMember({"greedy", "original"}));
    sweep_cmd->add_flag("--emit-runtime", emit_runtime,
                        "fill the runtime_s column (breaks byte-identical reruns)");
    add_output(sweep_cmd);

    CLI::App* fp = app.add_subcommand("firstpassage",
                                      "first-passage triple: closed form / solver / MC");
    fp->add_option("--n", fp_n, "forward states")->required();
    fp->add_option("--p", fp_p, "backward probability")->required();
    fp->add_option("--delta0", fp_delta0, "self-loop weight at state 0")->required();
    fp->add_option("--trials", fp_trials, "MC trials");
    fp->add_option("--seed", seed, "RNG seed");
    add_output(fp);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const unsigned workers = detail::workers_from_env();
        detail::OutputTarget target;
        target.open(output, out);
        const bool json = format == "json";
        const SedAlgorithm alg =
            algorithm == "original" ? SedAlgorithm::original : SedAlgorithm::greedy;

        if (*stats) {
            const ChannelSpec spec = regularize(p0, p1);
            const ChannelStats s = channel_stats(spec);
            if (json)
                write_stats_json(target.get(), spec, s);
            else if (format == "csv")
                write_stats_csv(target.get(), spec, s);
            else
                write_stats_text(target.get(), spec, s);
            return kExitOk;
        }

        if (*bounds) {
            const ChannelSpec spec = regularize(p0, p1);
            const ChannelStats s = channel_stats(spec);
            std::vector<BoundsRow> rows;
            for (unsigned k : detail::parse_k_range(k_text)) {
                BoundsRow r;
                r.k = k;
                r.M = std::uint64_t{1} << k;
                r.epsilon = epsilon;
                r.b = bound_set(r.M, epsilon, spec, s);
                rows.push_back(r);
            }
            json ? write_bounds_json(target.get(), rows)
                 : write_bounds_csv(target.get(), rows);
            return kExitOk;
        }

        if (*simulate) {
            const auto ks = detail::parse_k_range(k_text);
            if (ks.size() != 1)
                throw CLI::ValidationError("--k",
                                           "simulate expects a single k; use sweep for ranges");
            const ChannelSpec spec = regularize(p0, p1);
            SessionConfig cfg = make_session_config(spec, ks.front(), epsilon, alg, max_steps);
            const SimSummary s = monte_carlo(cfg, trials, seed, workers);
            json ? write_simulate_json(target.get(), cfg, trials, seed, s)
                 : write_simulate_csv(target.get(), cfg, trials, seed, s);
            if (s.anomalies > 0) {
                err << "anomaly: " << s.anomalies << " trial(s) hit the step cap\n";
                return kExitAnomaly;
            }
            return kExitOk;
        }

        if (*sweep_cmd) {
            const ChannelSpec spec = regularize(p0, p1);
            std::vector<SessionConfig> cfgs;
            for (unsigned k : detail::parse_k_range(k_text))
                cfgs.push_back(make_session_config(spec, k, epsilon, alg));
            const auto rows = sweep(cfgs, trials, seed, workers);
            json ? write_sweep_json(target.get(), rows, emit_runtime)
                 : write_sweep_csv(target.get(), rows, emit_runtime);
            for (const auto& r : rows) {
                if (!emit_runtime)
                    err << "k=" << r.k << " runtime_s=" << fmt_g6(r.runtime_s) << "\n";
                if (!r.error.empty()) err << "k=" << r.k << " error: " << r.error << "\n";
            }
            std::uint64_t anomalies = 0;
            bool row_error = false;
            for (const auto& r : rows) {
                anomalies += r.sim.anomalies;
                row_error = row_error || !r.error.empty();
            }
            if (anomalies > 0) {
                err << "anomaly: " << anomalies << " trial(s) hit the step cap\n";
                return kExitAnomaly;
            }
            return row_error ? kExitDomain : kExitOk;
        }

        if (*fp) {
            FirstPassageProblem prob{fp_n, fp_p, fp_delta0};
            const double closed = v0_closed_form(prob);
            const double solved = node_solve(prob)[0];
            const auto mc = mc_first_passage(prob, fp_trials, seed, workers);
            json ? write_firstpassage_json(target.get(), prob, closed, solved, mc)
                 : write_firstpassage_csv(target.get(), prob, closed, solved, mc);
            return kExitOk;
        }
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::invalid_argument& e) {
        err << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}

} // namespace sedfc::cli
