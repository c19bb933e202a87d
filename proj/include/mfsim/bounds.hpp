// Copyright 2026 The mfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MFSIM_BOUNDS_HPP
#define MFSIM_BOUNDS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfsim/dilation.hpp"
#include "mfsim/protocols.hpp"

namespace mfsim {

enum class BoundKind {
    main,             // D <= (2M + M0) v (T + T0)
    estp,             // D <= (2M+1)(T-1) + 1
    clifford,         // D <= (2M+1) v (T + T0)
    generic,          // D <~ 2(M+1) v T
    adaptive,         // D <= 2(M+1)(vT + (dim-1) log2 D), implicit
    spacing,          // ell <= 2 v (T + T0)
    ghz,              // D <= 2(M+1) v T
    dicke,            // D <= 2(M+1)(vT + (3 dim - 1) log2 D + C), implicit
    w,                // N <= 3(M+1) v T
    critical,         // D <= 2(M+1)(vT + (alpha + dim - 1) log2 D), implicit
    squeeze,          // M T^dim >= N^((1+nu)/2), predicate
    multiq,           // D <~ (1 + Nobs/Q) v T
    multiq_adaptive,  // D <= 2(floor(Nobs/Q)+1)(vT + (dim-1) log2 D), implicit
    sre,              // D <= 2(M + M0' + 1) v (T + T0')
    multiq_sre,       // D <= (2 Nobs + Nobs0) v (T + T0) / Q
    code,             // T >= d^(1/dim) / (2 v M)  ->  d_max = (2 v M T)^dim
    bell,             // D <= 2(M+1)(T-1) + 1
    css,              // D^dim = max(dX, dZ)
};

inline const char *bound_name(BoundKind k) {
    switch (k) {
        case BoundKind::main: return "main";
        case BoundKind::estp: return "estp";
        case BoundKind::clifford: return "clifford";
        case BoundKind::generic: return "generic";
        case BoundKind::adaptive: return "adaptive";
        case BoundKind::spacing: return "spacing";
        case BoundKind::ghz: return "ghz";
        case BoundKind::dicke: return "dicke";
        case BoundKind::w: return "w";
        case BoundKind::critical: return "critical";
        case BoundKind::squeeze: return "squeeze";
        case BoundKind::multiq: return "multiq";
        case BoundKind::multiq_adaptive: return "multiq_adaptive";
        case BoundKind::sre: return "sre";
        case BoundKind::multiq_sre: return "multiq_sre";
        case BoundKind::code: return "code";
        case BoundKind::bell: return "bell";
        case BoundKind::css: return "css";
    }
    return "?";
}

/// Everything a bound formula may consume. Fields irrelevant to a kind are
/// ignored; missing required fields throw. For the sre kinds, m0/t0/nobs0
/// hold the primed preparation offsets.
struct BoundParams {
    std::optional<int64_t> m;      // measurement regions
    std::optional<int64_t> m0;     // region offset
    std::optional<int64_t> t;      // depth
    std::optional<int64_t> t0;     // depth offset
    double v = 1.0;                // velocity in sites per layer
    std::optional<int64_t> d;      // task distance (for predicates)
    std::optional<int64_t> q;      // logical qubits
    std::optional<int64_t> n_obs;  // outcomes used for correction
    std::optional<int64_t> nobs0;  // outcome offset
    int dim = 1;                   // spatial dimension
    std::optional<double> alpha;   // correlation exponent
    std::optional<double> nu;      // squeezing exponent
    std::optional<int64_t> dx, dz; // CSS distances
    std::optional<int64_t> n;      // qubit count for w/squeeze kinds
    double c_dicke = 0;            // finite constant in the Dicke bound
};

struct BoundResult {
    BoundKind kind;
    bool is_predicate = false;
    int64_t d_max = 0;        // tight integer bound (when not a predicate)
    bool predicate = false;   // truth value (when is_predicate)
    bool asymptotic = false;  // stated up to O(1) offsets; no saturation claims
    std::string note;
};

namespace bounds_detail {

inline int64_t req(const std::optional<int64_t> &f, const char *what) {
    if (!f) throw std::invalid_argument(std::string("missing bound parameter: ") + what);
    return *f;
}

inline double reqd(const std::optional<double> &f, const char *what) {
    if (!f) throw std::invalid_argument(std::string("missing bound parameter: ") + what);
    return *f;
}

inline int64_t floor_nonneg(double x) {
    if (x < 0) return 0;
    return int64_t(std::floor(x + 1e-9));
}

/// Largest integer D >= 0 with D <= rhs(D), for rhs nondecreasing and
/// sublinear in D (log corrections), found by doubling then bisection. The
/// predicate region is an interval starting at 0 for such forms.
template <typename Rhs>
int64_t solve_implicit(Rhs &&rhs) {
    auto ok = [&](int64_t dd) { return double(dd) <= rhs(dd) + 1e-9; };
    if (!ok(1)) return 0;
    int64_t lo = 1, hi = 2;
    while (ok(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > (int64_t{1} << 40)) {
            throw std::runtime_error("implicit bound does not close");
        }
    }
    while (lo + 1 < hi) {
        int64_t mid = lo + (hi - lo) / 2;
        if (ok(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

inline double log2d(int64_t dd) { return dd <= 1 ? 0.0 : std::log2(double(dd)); }

}  // namespace bounds_detail

inline BoundResult evaluate_bound(BoundKind kind, const BoundParams &p) {
    using namespace bounds_detail;
    BoundResult r;
    r.kind = kind;
    switch (kind) {
        case BoundKind::main: {
            int64_t m = req(p.m, "m"), m0 = req(p.m0, "m0"), t = req(p.t, "t"), t0 = req(p.t0, "t0");
            r.d_max = floor_nonneg(double(2 * m + m0) * p.v * double(t + t0));
            break;
        }
        case BoundKind::estp: {
            int64_t m = req(p.m, "m"), t = req(p.t, "t");
            r.d_max = (2 * m + 1) * (t - 1) + 1;
            break;
        }
        case BoundKind::clifford: {
            int64_t m = req(p.m, "m"), t = req(p.t, "t"), t0 = req(p.t0, "t0");
            r.d_max = floor_nonneg(double(2 * m + 1) * p.v * double(t + t0));
            break;
        }
        case BoundKind::generic: {
            int64_t m = req(p.m, "m"), t = req(p.t, "t");
            r.d_max = floor_nonneg(2.0 * double(m + 1) * p.v * double(t));
            r.asymptotic = true;
            break;
        }
        case BoundKind::adaptive: {
            int64_t m = req(p.m, "m"), t = req(p.t, "t");
            double a = 2.0 * double(m + 1);
            int b = p.dim - 1;
            r.d_max = solve_implicit([&](int64_t dd) { return a * (p.v * double(t) + b * log2d(dd)); });
            break;
        }
        case BoundKind::spacing: {
            int64_t t = req(p.t, "t"), t0 = req(p.t0, "t0");
            r.d_max = floor_nonneg(2.0 * p.v * double(t + t0));
            break;
        }
        case BoundKind::ghz: {
            int64_t m = req(p.m, "m"), t = req(p.t, "t");
            r.d_max = floor_nonneg(2.0 * double(m + 1) * p.v * double(t));
            break;
        }
        case BoundKind::dicke: {
            int64_t m = req(p.m, "m"), t = req(p.t, "t");
            double a = 2.0 * double(m + 1);
            double b = 3.0 * p.dim - 1;
            r.d_max = solve_implicit(
                [&](int64_t dd) { return a * (p.v * double(t) + b * log2d(dd) + p.c_dicke); });
            r.note = "constant C = " + std::to_string(p.c_dicke);
            break;
        }
        case BoundKind::w: {
            int64_t m = req(p.m, "m"), t = req(p.t, "t");
            r.d_max = floor_nonneg(3.0 * double(m + 1) * p.v * double(t));
            if (p.n) {
                r.is_predicate = true;
                r.predicate = *p.n <= r.d_max;
            }
            break;
        }
        case BoundKind::critical: {
            int64_t m = req(p.m, "m"), t = req(p.t, "t");
            double a = 2.0 * double(m + 1);
            double b = reqd(p.alpha, "alpha") + p.dim - 1;
            r.d_max = solve_implicit([&](int64_t dd) { return a * (p.v * double(t) + b * log2d(dd)); });
            break;
        }
        case BoundKind::squeeze: {
            int64_t m = req(p.m, "m"), t = req(p.t, "t"), n = req(p.n, "n");
            double nu = reqd(p.nu, "nu");
            r.is_predicate = true;
            r.predicate = double(m) * std::pow(double(t), p.dim) >=
                          std::pow(double(n), (1.0 + nu) / 2.0) - 1e-9;
            r.asymptotic = true;
            break;
        }
        case BoundKind::multiq: {
            int64_t nobs = req(p.n_obs, "n_obs"), q = req(p.q, "q"), t = req(p.t, "t");
            r.d_max = floor_nonneg((1.0 + double(nobs) / double(q)) * p.v * double(t));
            r.asymptotic = true;
            break;
        }
        case BoundKind::multiq_adaptive: {
            int64_t nobs = req(p.n_obs, "n_obs"), q = req(p.q, "q"), t = req(p.t, "t");
            double a = 2.0 * double(nobs / q + 1);
            int b = p.dim - 1;
            r.d_max = solve_implicit([&](int64_t dd) { return a * (p.v * double(t) + b * log2d(dd)); });
            break;
        }
        case BoundKind::sre: {
            int64_t m = req(p.m, "m"), m0p = req(p.m0, "m0"), t = req(p.t, "t"), t0p = req(p.t0, "t0");
            r.d_max = floor_nonneg(2.0 * double(m + m0p + 1) * p.v * double(t + t0p));
            break;
        }
        case BoundKind::multiq_sre: {
            int64_t nobs = req(p.n_obs, "n_obs"), nobs0 = req(p.nobs0, "nobs0"),
                    t = req(p.t, "t"), t0 = req(p.t0, "t0"), q = req(p.q, "q");
            r.d_max = floor_nonneg(double(2 * nobs + nobs0) * p.v * double(t + t0) / double(q));
            break;
        }
        case BoundKind::code: {
            int64_t m = req(p.m, "m"), t = req(p.t, "t");
            r.d_max = floor_nonneg(std::pow(2.0 * p.v * double(m) * double(t), p.dim));
            break;
        }
        case BoundKind::bell: {
            int64_t m = req(p.m, "m"), t = req(p.t, "t");
            r.d_max = 2 * (m + 1) * (t - 1) + 1;
            break;
        }
        case BoundKind::css: {
            int64_t dx = req(p.dx, "dx"), dz = req(p.dz, "dz");
            int64_t big = std::max(dx, dz);
            // largest D with D^dim <= max(dX, dZ)
            int64_t dd = floor_nonneg(std::pow(double(big), 1.0 / p.dim));
            while (std::pow(double(dd + 1), p.dim) <= double(big) + 1e-9) dd++;
            while (dd > 0 && std::pow(double(dd), p.dim) > double(big) + 1e-9) dd--;
            r.d_max = dd;
            break;
        }
    }
    return r;
}

/// Audited resources and verdicts of one protocol run against every
/// applicable bound.
struct BoundCheck {
    BoundResult result;
    int64_t compared_value = 0;  // D_achieved, ell, or N as appropriate
    bool satisfied = false;
    bool saturated = false;
};

struct BoundReport {
    int audited_m = 0;
    int audited_nobs = 0;
    int audited_depth = 0;
    int64_t audited_distance = 0;
    int64_t measured_ell = 0;  // 0 when fewer than two regions
    std::vector<BoundCheck> checks;
    bool task_passed = false;
    bool inconsistent = false;  // task passed but an exact bound is violated
    std::optional<int> formula_m;      // builder's closed-form expectation
    std::optional<int> formula_depth;
    bool formula_mismatch = false;
};

/// Recomputes M, N_obs, depth, achieved distance and region spacing from
/// the circuit (metadata is never trusted), evaluates the applicable bound
/// kinds, and flags saturation and inconsistencies.
inline BoundReport audit_protocol(const ProtocolInstance &inst, bool task_passed) {
    const auto &md = inst.metadata;
    BoundReport rep;
    rep.task_passed = task_passed;
    uint32_t ti = md.in_site, tf = md.out_site;
    if (md.task == TaskKind::multi_teleport && !md.lane_sites.empty()) {
        ti = md.lane_sites[0].first;
        tf = md.lane_sites[0].second;
    }
    auto rc = count_regions_outcomes(inst.circuit, ti, tf);
    rep.audited_m = rc.m;
    rep.audited_nobs = rc.n_obs;
    rep.audited_depth = inst.circuit.depth();
    rep.audited_distance = inst.circuit.geom.distance(ti, tf);
    // Region spacing: largest gap between consecutive region left edges of
    // the measured regions, in execution order along the chain.
    if (rc.regions.size() >= 2) {
        std::vector<int64_t> starts;
        for (auto &r : rc.regions) starts.push_back(r.front());
        std::sort(starts.begin(), starts.end());
        for (size_t i = 1; i < starts.size(); i++) {
            rep.measured_ell = std::max(rep.measured_ell, starts[i] - starts[i - 1]);
        }
    }

    BoundParams p;
    p.m = rep.audited_m;
    p.m0 = md.m0;
    p.t = rep.audited_depth;
    p.t0 = md.t0;
    p.n_obs = rep.audited_nobs;
    p.q = md.q_param;
    p.dim = inst.circuit.geom.spatial_dim();
    p.n = int64_t(inst.circuit.n_physical);
    p.d = rep.audited_distance;

    auto push = [&](BoundKind kind, int64_t compared) {
        BoundCheck chk;
        chk.result = evaluate_bound(kind, p);
        chk.compared_value = compared;
        if (chk.result.is_predicate) {
            chk.satisfied = chk.result.predicate;
            chk.saturated = false;
        } else {
            chk.satisfied = compared <= chk.result.d_max;
            chk.saturated = compared == chk.result.d_max;
        }
        rep.checks.push_back(chk);
    };

    switch (md.task) {
        case TaskKind::teleport: {
            push(BoundKind::main, rep.audited_distance);
            push(BoundKind::clifford, rep.audited_distance);
            push(BoundKind::generic, rep.audited_distance);
            if (rep.measured_ell > 0) {
                push(BoundKind::spacing, rep.measured_ell);
            }
            if (md.name == "estp") {
                BoundParams pe = p;
                pe.t = md.t_param;  // the construction's depth budget
                BoundCheck chk;
                chk.result = evaluate_bound(BoundKind::estp, pe);
                chk.compared_value = rep.audited_distance;
                chk.satisfied = rep.audited_distance <= chk.result.d_max;
                chk.saturated = rep.audited_distance == chk.result.d_max;
                rep.checks.push_back(chk);
            }
            break;
        }
        case TaskKind::bell_pair: {
            push(BoundKind::bell, rep.audited_distance);
            break;
        }
        case TaskKind::ghz: {
            push(BoundKind::ghz, rep.audited_distance);
            break;
        }
        case TaskKind::w_state: {
            push(BoundKind::w, int64_t(inst.circuit.n_physical));
            break;
        }
        case TaskKind::multi_teleport: {
            push(BoundKind::multiq, rep.audited_distance);
            push(BoundKind::multiq_adaptive, rep.audited_distance);
            break;
        }
    }

    rep.formula_m = md.formula_m;
    rep.formula_depth = md.formula_depth;
    if (md.formula_m && *md.formula_m != rep.audited_m) rep.formula_mismatch = true;
    if (md.formula_depth && *md.formula_depth != rep.audited_depth) rep.formula_mismatch = true;

    if (task_passed) {
        for (const auto &chk : rep.checks) {
            if (!chk.result.asymptotic && !chk.satisfied) rep.inconsistent = true;
        }
    }
    return rep;
}

}  // namespace mfsim

#endif
