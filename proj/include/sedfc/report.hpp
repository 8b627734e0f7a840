#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "sedfc/bounds.hpp"
#include "sedfc/first_passage.hpp"
#include "sedfc/session.hpp"
#include "sedfc/sweep.hpp"

namespace sedfc {

// Machine-readable emission of results. CSV is the primary format: fixed
// column order, floats with 6 significant digits, header always present,
// LF line endings. JSON mirrors the same fields.

inline std::string fmt_g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string fmt_f4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline const char* relabel_name(Relabel r) {
    switch (r) {
        case Relabel::none: return "none";
        case Relabel::swap_input: return "swap_input";
        case Relabel::swap_output: return "swap_output";
        case Relabel::swap_both: return "swap_both";
    }
    return "none";
}

// ---- stats ----

inline void write_stats_text(std::ostream& out, const ChannelSpec& spec,
                             const ChannelStats& s) {
    const auto [op0, op1] = spec.original();
    out << "channel: BAC(" << fmt_g6(op0) << ", " << fmt_g6(op1) << ")";
    if (spec.relabel != Relabel::none)
        out << " regularized to (" << fmt_g6(spec.p0) << ", " << fmt_g6(spec.p1)
            << ") via " << relabel_name(spec.relabel);
    out << "\n";
    out << "C        = " << fmt_f4(s.C) << "\n";
    out << "C1       = " << fmt_f4(s.C1) << "\n";
    out << "C2       = " << fmt_f4(s.C2) << "\n";
    out << "pi0_star = " << fmt_f4(s.pi0_star) << "\n";
    out << "pi1_star = " << fmt_f4(s.pi1_star) << "\n";
    out << "lambda   = " << fmt_f4(s.lambda) << "\n";
    out << "lambda1  = " << fmt_f4(s.lambda1) << "\n";
}

inline void write_stats_csv(std::ostream& out, const ChannelSpec& spec,
                            const ChannelStats& s) {
    out << "p0,p1,relabel,C,C1,C2,pi0_star,pi1_star,lambda,lambda1\n";
    out << fmt_g6(spec.p0) << ',' << fmt_g6(spec.p1) << ',' << relabel_name(spec.relabel)
        << ',' << fmt_g6(s.C) << ',' << fmt_g6(s.C1) << ',' << fmt_g6(s.C2) << ','
        << fmt_g6(s.pi0_star) << ',' << fmt_g6(s.pi1_star) << ',' << fmt_g6(s.lambda) << ','
        << fmt_g6(s.lambda1) << '\n';
}

inline void write_stats_json(std::ostream& out, const ChannelSpec& spec,
                             const ChannelStats& s) {
    nlohmann::ordered_json j;
    j["p0"] = spec.p0;
    j["p1"] = spec.p1;
    j["relabel"] = relabel_name(spec.relabel);
    j["C"] = s.C;
    j["C1"] = s.C1;
    j["C2"] = s.C2;
    j["pi0_star"] = s.pi0_star;
    j["pi1_star"] = s.pi1_star;
    j["lambda"] = s.lambda;
    j["lambda1"] = s.lambda1;
    out << j.dump(2) << '\n';
}

// ---- bounds ----

struct BoundsRow {
    unsigned k = 0;
    std::uint64_t M = 0;
    double epsilon = 0.0;
    BoundSet b;
};

inline void write_bounds_csv(std::ostream& out, const std::vector<BoundsRow>& rows) {
    out << "k,M,epsilon,bound_thm1,bound_cor1,bound_thm3,bound_thm6,converse_sup,"
           "converse_weak,converse\n";
    for (const auto& r : rows) {
        out << r.k << ',' << r.M << ',' << fmt_g6(r.epsilon) << ',' << fmt_g6(r.b.thm1)
            << ',' << fmt_g6(r.b.cor1) << ',' << fmt_g6(r.b.thm3_bac) << ',';
        if (r.b.thm6_bsc) out << fmt_g6(*r.b.thm6_bsc);
        out << ',' << fmt_g6(r.b.converse_sup) << ',' << fmt_g6(r.b.converse_weak) << ','
            << fmt_g6(r.b.converse) << '\n';
    }
}

inline void write_bounds_json(std::ostream& out, const std::vector<BoundsRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["k"] = r.k;
        j["M"] = r.M;
        j["epsilon"] = r.epsilon;
        j["bound_thm1"] = r.b.thm1;
        j["bound_cor1"] = r.b.cor1;
        j["bound_thm3"] = r.b.thm3_bac;
        if (r.b.thm6_bsc)
            j["bound_thm6"] = *r.b.thm6_bsc;
        else
            j["bound_thm6"] = nullptr;
        j["converse_sup"] = r.b.converse_sup;
        j["converse_weak"] = r.b.converse_weak;
        j["converse"] = r.b.converse;
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
}

// ---- simulate ----

inline void write_simulate_csv(std::ostream& out, const SessionConfig& cfg,
                               std::uint64_t trials, std::uint64_t seed,
                               const SimSummary& s) {
    out << "k,M,epsilon,trials,seed,avg_tau,tau_stderr,rate,pe_hat,pe_ci_lo,pe_ci_hi,"
           "avg_nu,nu_stderr,avg_confirm,confirm_stderr,avg_fallbacks,errors,anomalies\n";
    out << cfg.k << ',' << cfg.M << ',' << fmt_g6(cfg.epsilon) << ',' << trials << ','
        << seed << ',' << fmt_g6(s.avg_tau) << ',' << fmt_g6(s.tau_stderr) << ','
        << fmt_g6(s.rate) << ',' << fmt_g6(s.pe_hat) << ',' << fmt_g6(s.pe_lo) << ','
        << fmt_g6(s.pe_hi) << ',' << fmt_g6(s.avg_nu) << ',' << fmt_g6(s.nu_stderr) << ','
        << fmt_g6(s.avg_confirm) << ',' << fmt_g6(s.confirm_stderr) << ','
        << fmt_g6(s.avg_fallbacks) << ',' << s.errors << ',' << s.anomalies << '\n';
}

inline void write_simulate_json(std::ostream& out, const SessionConfig& cfg,
                                std::uint64_t trials, std::uint64_t seed,
                                const SimSummary& s) {
    nlohmann::ordered_json j;
    j["k"] = cfg.k;
    j["M"] = cfg.M;
    j["epsilon"] = cfg.epsilon;
    j["trials"] = trials;
    j["seed"] = seed;
    j["avg_tau"] = s.avg_tau;
    j["tau_stderr"] = s.tau_stderr;
    j["rate"] = s.rate;
    j["pe_hat"] = s.pe_hat;
    j["pe_ci_lo"] = s.pe_lo;
    j["pe_ci_hi"] = s.pe_hi;
    j["avg_nu"] = s.avg_nu;
    j["nu_stderr"] = s.nu_stderr;
    j["avg_confirm"] = s.avg_confirm;
    j["confirm_stderr"] = s.confirm_stderr;
    j["avg_fallbacks"] = s.avg_fallbacks;
    j["errors"] = s.errors;
    j["anomalies"] = s.anomalies;
    out << j.dump(2) << '\n';
}

// ---- sweep ----

inline constexpr const char* kSweepCsvHeader =
    "k,M,epsilon,trials,avg_tau,tau_stderr,rate,pe_hat,pe_ci_hi,bound_thm1,bound_cor1,"
    "bound_thm3,bound_thm6,converse,runtime_s";

// runtime_s is wall clock and would break byte-identical reruns, so the
// column is left empty unless explicitly requested.
inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                            bool emit_runtime = false) {
    out << kSweepCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.k << ',' << r.M << ',' << fmt_g6(r.epsilon) << ',' << r.trials << ',';
        if (r.error.empty()) {
            out << fmt_g6(r.sim.avg_tau) << ',' << fmt_g6(r.sim.tau_stderr) << ','
                << fmt_g6(r.sim.rate) << ',' << fmt_g6(r.sim.pe_hat) << ','
                << fmt_g6(r.sim.pe_hi) << ',' << fmt_g6(r.bounds.thm1) << ','
                << fmt_g6(r.bounds.cor1) << ',' << fmt_g6(r.bounds.thm3_bac) << ',';
            if (r.bounds.thm6_bsc) out << fmt_g6(*r.bounds.thm6_bsc);
            out << ',' << fmt_g6(r.bounds.converse) << ',';
        } else {
            out << ",,,,,,,,,,";
        }
        if (emit_runtime) out << fmt_g6(r.runtime_s);
        out << '\n';
    }
}

inline void write_sweep_json(std::ostream& out, const std::vector<SweepRow>& rows,
                             bool emit_runtime = false) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["k"] = r.k;
        j["M"] = r.M;
        j["epsilon"] = r.epsilon;
        j["trials"] = r.trials;
        if (!r.error.empty()) {
            j["error"] = r.error;
        } else {
            j["avg_tau"] = r.sim.avg_tau;
            j["tau_stderr"] = r.sim.tau_stderr;
            j["rate"] = r.sim.rate;
            j["pe_hat"] = r.sim.pe_hat;
            j["pe_ci_hi"] = r.sim.pe_hi;
            j["bound_thm1"] = r.bounds.thm1;
            j["bound_cor1"] = r.bounds.cor1;
            j["bound_thm3"] = r.bounds.thm3_bac;
            if (r.bounds.thm6_bsc)
                j["bound_thm6"] = *r.bounds.thm6_bsc;
            else
                j["bound_thm6"] = nullptr;
            j["converse"] = r.bounds.converse;
        }
        if (emit_runtime) j["runtime_s"] = r.runtime_s;
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
}

// ---- firstpassage ----

inline void write_firstpassage_csv(std::ostream& out, const FirstPassageProblem& prob,
                                   double closed, double solved,
                                   const McPassageResult& mc) {
    out << "n,p,delta0,v0_closed,v0_solve,v0_mc,mc_stderr,trials\n";
    out << prob.n << ',' << fmt_g6(prob.p) << ',' << fmt_g6(prob.delta0) << ','
        << fmt_g6(closed) << ',' << fmt_g6(solved) << ',' << fmt_g6(mc.mean) << ','
        << fmt_g6(mc.se) << ',' << mc.trials << '\n';
}

inline void write_firstpassage_json(std::ostream& out, const FirstPassageProblem& prob,
                                    double closed, double solved,
                                    const McPassageResult& mc) {
    nlohmann::ordered_json j;
    j["n"] = prob.n;
    j["p"] = prob.p;
    j["delta0"] = prob.delta0;
    j["v0_closed"] = closed;
    j["v0_solve"] = solved;
    j["v0_mc"] = mc.mean;
    j["mc_stderr"] = mc.se;
    j["trials"] = mc.trials;
    out << j.dump(2) << '\n';
}

} // namespace sedfc
