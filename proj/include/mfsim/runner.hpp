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

#ifndef MFSIM_RUNNER_HPP
#define MFSIM_RUNNER_HPP

#include <cmath>
#include <string>

#include "mfsim/bounds.hpp"
#include "mfsim/heisenberg.hpp"
#include "mfsim/protocols.hpp"
#include "mfsim/serialize.hpp"
#include "mfsim/sim_dense.hpp"
#include "mfsim/sim_stabilizer.hpp"

namespace mfsim {

enum class Backend { stabilizer, dense, both };
enum class RunMode { trajectory, enumerate_all, explicit_dilation };

struct RunConfig {
    Backend backend = Backend::stabilizer;
    RunMode mode = RunMode::enumerate_all;
    uint64_t seed = 0;
    size_t max_branches = size_t{1} << 16;
    size_t qubit_budget = kDefaultQubitBudget;
};

struct TaskVerdict {
    bool passed = false;
    std::string detail;
    ProcessMatrix ptm{};       // teleport tasks
    bool per_branch_ok = true;
    std::array<double, 3> averaged_bloch_out{0, 0, 0};
    double min_fidelity = 1.0;  // state-preparation tasks
    size_t branches = 0;
};

namespace runner_detail {

inline StateVector analytic_w_vector(uint32_t n) {
    StateVector s(n);
    s.amplitudes()[0] = 0;
    double r = 1.0 / std::sqrt(double(n));
    for (uint32_t j = 0; j < n; j++) s.amplitudes()[size_t{1} << j] = r;
    return s;
}

inline StateVector ghz_vector(uint32_t n) {
    StateVector s(n);
    double r = 1.0 / std::sqrt(2.0);
    s.amplitudes()[0] = r;
    s.amplitudes()[s.dim() - 1] = r;
    return s;
}

inline bool ghz_stabilizer_checks(const Tableau &t) {
    size_t n = t.n_qubits();
    PauliString all_x(n);
    for (uint32_t q = 0; q < n; q++) all_x.set_letter(q, 'X');
    if (t.expectation(all_x) != +1) return false;
    for (uint32_t q = 0; q + 1 < n; q++) {
        if (t.expectation(PauliString::from_terms(n, {{q, 'Z'}, {q + 1, 'Z'}})) != +1) {
            return false;
        }
    }
    return true;
}

/// One sampled trajectory per eigenstate input: checks that the out-site
/// Bloch vector reproduces the prepared axis on that branch.
inline bool sampled_teleport_check(const DilatedCircuit &circuit, uint32_t in, uint32_t out,
                                   uint64_t seed) {
    const char axes[3] = {'X', 'Y', 'Z'};
    for (int b = 0; b < 3; b++) {
        for (int sgn : {+1, -1}) {
            DilatedCircuit prepped = circuit;
            std::vector<Op> ops;
            for (auto &g : eigenstate_prep(in, axes[b], sgn)) ops.push_back(GateOp{g});
            ops.insert(ops.end(), circuit.ops.begin(), circuit.ops.end());
            prepped.ops = std::move(ops);
            OutcomeSource src(seed ^ (uint64_t(b) << 8) ^ uint64_t(sgn + 1));
            auto rec = run_trajectory(prepped, Tableau(circuit.n_physical), src);
            for (int a = 0; a < 3; a++) {
                int want = (a == b) ? sgn : 0;
                if (rec.final_tableau.expectation(PauliString::single(
                        circuit.n_physical, out, axes[a])) != want) {
                    return false;
                }
            }
        }
    }
    return true;
}

}  // namespace runner_detail

/// Task verification on the stabilizer backend. Enumerate mode is
/// exhaustive and authoritative; trajectory mode samples one branch per
/// prepared input with the configured seed.
inline TaskVerdict verify_task_stabilizer(const ProtocolInstance &inst, const RunConfig &cfg) {
    const auto &md = inst.metadata;
    const uint32_t n = inst.circuit.n_physical;
    TaskVerdict v;
    if (cfg.mode == RunMode::explicit_dilation) {
        throw std::invalid_argument("explicit-dilation is a dense-backend mode");
    }
    const bool sample = cfg.mode == RunMode::trajectory;
    switch (md.task) {
        case TaskKind::teleport: {
            if (sample) {
                v.passed = runner_detail::sampled_teleport_check(inst.circuit, md.in_site,
                                                                 md.out_site, cfg.seed);
                v.branches = 1;
                v.detail = v.passed ? "sampled branches teleport" : "a sampled branch failed";
                break;
            }
            bool per_branch = false;
            v.ptm = teleport_process_matrix(inst.circuit, md.in_site, md.out_site,
                                            cfg.max_branches, &per_branch);
            v.per_branch_ok = per_branch;
            v.passed = v.ptm.is_identity() && per_branch;
            v.detail = v.passed ? "process matrix identity in every branch"
                                : "process matrix deviates from identity";
            auto records = enumerate_trajectories(inst.circuit, Tableau(n), cfg.max_branches);
            v.branches = records.size();
            v.averaged_bloch_out = averaged_bloch(records, md.out_site);
            break;
        }
        case TaskKind::bell_pair: {
            std::vector<RunRecord> records;
            if (sample) {
                OutcomeSource src(cfg.seed);
                records.push_back(run_trajectory(inst.circuit, Tableau(n), src));
            } else {
                records = enumerate_trajectories(inst.circuit, Tableau(n), cfg.max_branches);
            }
            v.branches = records.size();
            auto xx = PauliString::from_terms(n, {{md.in_site, 'X'}, {md.out_site, 'X'}});
            auto zz = PauliString::from_terms(n, {{md.in_site, 'Z'}, {md.out_site, 'Z'}});
            int sx = records[0].final_tableau.expectation(xx);
            int sz = records[0].final_tableau.expectation(zz);
            v.passed = sx != 0 && sz != 0;
            for (const auto &rec : records) {
                if (rec.final_tableau.expectation(xx) != sx ||
                    rec.final_tableau.expectation(zz) != sz) {
                    v.passed = false;
                }
            }
            v.detail = v.passed ? "definite Bell pair in every branch" : "pair checks failed";
            break;
        }
        case TaskKind::ghz: {
            std::vector<RunRecord> records;
            if (sample) {
                OutcomeSource src(cfg.seed);
                records.push_back(run_trajectory(inst.circuit, Tableau(n), src));
            } else {
                records = enumerate_trajectories(inst.circuit, Tableau(n), cfg.max_branches);
            }
            v.branches = records.size();
            v.passed = true;
            for (const auto &rec : records) {
                if (!runner_detail::ghz_stabilizer_checks(rec.final_tableau)) v.passed = false;
            }
            v.detail = v.passed ? "GHZ stabilizer checks pass in every branch"
                                : "GHZ stabilizer checks failed";
            break;
        }
        case TaskKind::w_state: {
            throw std::invalid_argument("w_state requires the dense backend");
        }
        case TaskKind::multi_teleport: {
            v.passed = true;
            for (auto [in, out] : md.lane_sites) {
                if (sample) {
                    if (!runner_detail::sampled_teleport_check(inst.circuit, in, out, cfg.seed)) {
                        v.passed = false;
                    }
                    continue;
                }
                bool per_branch = false;
                auto ptm =
                    teleport_process_matrix(inst.circuit, in, out, cfg.max_branches, &per_branch);
                if (!ptm.is_identity() || !per_branch) v.passed = false;
            }
            v.detail = v.passed ? "every lane teleports" : "at least one lane fails";
            break;
        }
    }
    return v;
}

namespace runner_detail {

/// Dense analogue of the sampled teleport check (single Born-ruled run per
/// eigenstate input).
inline bool sampled_teleport_check_dense(const DilatedCircuit &circuit, uint32_t in, uint32_t out,
                                         uint64_t seed, size_t budget) {
    const char axes[3] = {'X', 'Y', 'Z'};
    for (int b = 0; b < 3; b++) {
        for (int sgn : {+1, -1}) {
            DilatedCircuit prepped = circuit;
            std::vector<Op> ops;
            for (auto &g : eigenstate_prep(in, axes[b], sgn)) ops.push_back(GateOp{g});
            ops.insert(ops.end(), circuit.ops.begin(), circuit.ops.end());
            prepped.ops = std::move(ops);
            OutcomeSource src(seed ^ (uint64_t(b) << 8) ^ uint64_t(sgn + 1));
            auto rec = apply_circuit(prepped, StateVector(circuit.n_physical),
                                     DenseMode::trajectory, src, budget);
            for (int a = 0; a < 3; a++) {
                double want = (a == b) ? sgn : 0;
                double got = rec.state.expectation_pauli(
                    PauliString::single(circuit.n_physical, out, axes[a]));
                if (std::abs(got - want) > 1e-9) return false;
            }
        }
    }
    return true;
}

/// Explicit-dilation teleport check: the reduced physical state at the out
/// site of the dilated run carries the prepared eigenstate, because the
/// coherent corrections make every register branch output it.
inline ProcessMatrix explicit_process_matrix(const DilatedCircuit &circuit, uint32_t in,
                                             uint32_t out, size_t budget) {
    const char axes[3] = {'X', 'Y', 'Z'};
    ProcessMatrix ptm;
    for (int b = 0; b < 3; b++) {
        std::array<std::array<double, 3>, 2> bloch{};
        for (int s = 0; s < 2; s++) {
            DilatedCircuit prepped = circuit;
            std::vector<Op> ops;
            for (auto &g : eigenstate_prep(in, axes[b], s == 0 ? +1 : -1)) {
                ops.push_back(GateOp{g});
            }
            ops.insert(ops.end(), circuit.ops.begin(), circuit.ops.end());
            prepped.ops = std::move(ops);
            OutcomeSource src(0);
            auto rec = apply_circuit(prepped, StateVector(circuit.n_physical),
                                     DenseMode::explicit_dilation, src, budget);
            auto rho = reduced_density(rec.state, {out});
            bloch[s][0] = 2 * rho.at(0, 1).real();
            bloch[s][1] = -2 * rho.at(0, 1).imag();
            bloch[s][2] = (rho.at(0, 0) - rho.at(1, 1)).real();
        }
        for (int a = 0; a < 3; a++) {
            ptm.m[a][b] = (bloch[0][a] - bloch[1][a]) / 2.0;
        }
    }
    return ptm;
}

}  // namespace runner_detail

/// Task verification on the dense backend under the configured mode.
inline TaskVerdict verify_task_dense(const ProtocolInstance &inst, const RunConfig &cfg) {
    const auto &md = inst.metadata;
    const uint32_t n = inst.circuit.n_physical;
    TaskVerdict v;
    const bool sample = cfg.mode == RunMode::trajectory;
    const bool dilated = cfg.mode == RunMode::explicit_dilation;
    switch (md.task) {
        case TaskKind::teleport:
        case TaskKind::multi_teleport: {
            v.passed = true;
            auto lanes = md.task == TaskKind::teleport
                             ? std::vector<std::pair<uint32_t, uint32_t>>{{md.in_site, md.out_site}}
                             : md.lane_sites;
            for (auto [in, out] : lanes) {
                if (sample) {
                    if (!runner_detail::sampled_teleport_check_dense(inst.circuit, in, out,
                                                                     cfg.seed, cfg.qubit_budget)) {
                        v.passed = false;
                    }
                    continue;
                }
                auto ptm = dilated ? runner_detail::explicit_process_matrix(inst.circuit, in, out,
                                                                            cfg.qubit_budget)
                                   : dense_process_matrix(inst.circuit, in, out, cfg.max_branches);
                v.ptm = ptm;
                if (!ptm.is_identity(1e-9)) v.passed = false;
            }
            v.detail = v.passed ? "dense process matrix identity" : "dense process matrix off";
            break;
        }
        case TaskKind::bell_pair:
        case TaskKind::ghz:
        case TaskKind::w_state: {
            StateVector target = md.task == TaskKind::w_state ? runner_detail::analytic_w_vector(n)
                                                              : runner_detail::ghz_vector(n);
            double tol = md.task == TaskKind::w_state ? 1e-10 : 1e-12;
            auto collect = [&]() {
                std::vector<DenseRunResult> records;
                if (sample || dilated) {
                    OutcomeSource src(cfg.seed);
                    records.push_back(apply_circuit(
                        inst.circuit, StateVector(n),
                        dilated ? DenseMode::explicit_dilation : DenseMode::trajectory, src,
                        cfg.qubit_budget));
                } else {
                    records = enumerate_dense(inst.circuit, StateVector(n), cfg.max_branches,
                                              cfg.qubit_budget);
                }
                return records;
            };
            if (md.task == TaskKind::bell_pair) {
                // the distilled pair lives on (in_site, out_site); check via
                // reduced fidelity with the two-qubit Bell vector
                auto records = collect();
                v.branches = records.size();
                v.passed = true;
                for (const auto &rec : records) {
                    auto rho = reduced_density(rec.state, {md.in_site, md.out_site});
                    // largest Bell-state overlap must be 1
                    double best = 0;
                    for (int b = 0; b < 4; b++) {
                        std::array<cplx, 4> vec{};
                        double r = 1.0 / std::sqrt(2.0);
                        if (b == 0) { vec[0] = r; vec[3] = r; }
                        if (b == 1) { vec[0] = r; vec[3] = -r; }
                        if (b == 2) { vec[1] = r; vec[2] = r; }
                        if (b == 3) { vec[1] = r; vec[2] = -r; }
                        cplx acc = 0;
                        for (int rr = 0; rr < 4; rr++) {
                            for (int cc = 0; cc < 4; cc++) {
                                acc += std::conj(vec[rr]) * rho.at(rr, cc) * vec[cc];
                            }
                        }
                        best = std::max(best, acc.real());
                    }
                    v.min_fidelity = std::min(v.min_fidelity, best);
                    if (best < 1 - 1e-10) v.passed = false;
                }
                v.detail = "distilled pair fidelity";
                break;
            }
            auto records = collect();
            v.branches = records.size();
            v.passed = true;
            for (const auto &rec : records) {
                // fidelity traces the explicit registers first when present
                double f = fidelity(rec.state, target);
                v.min_fidelity = std::min(v.min_fidelity, f);
                if (f < 1 - tol) v.passed = false;
            }
            v.detail = v.passed ? "target-state fidelity 1 in every branch" : "fidelity lost";
            break;
        }
    }
    return v;
}

struct RunReport {
    TaskVerdict stabilizer;
    TaskVerdict dense;
    bool ran_stabilizer = false;
    bool ran_dense = false;
    bool backends_agree = true;
    BoundReport bounds;
    bool task_passed = false;
    int exit_code = 0;  // 0 pass, 2 task fail, 3 bound inconsistency
};

inline RunReport run_and_audit(const ProtocolInstance &inst, const RunConfig &cfg) {
    RunReport rep;
    bool want_stab = cfg.backend != Backend::dense;
    bool want_dense = cfg.backend != Backend::stabilizer;
    if (inst.metadata.task == TaskKind::w_state) {
        want_stab = false;  // non-Clifford gates
        want_dense = true;
    }
    if (want_stab) {
        rep.stabilizer = verify_task_stabilizer(inst, cfg);
        rep.ran_stabilizer = true;
    }
    if (want_dense) {
        rep.dense = verify_task_dense(inst, cfg);
        rep.ran_dense = true;
    }
    if (rep.ran_stabilizer && rep.ran_dense) {
        rep.backends_agree = rep.stabilizer.passed == rep.dense.passed;
    }
    rep.task_passed = (rep.ran_stabilizer ? rep.stabilizer.passed : true) &&
                      (rep.ran_dense ? rep.dense.passed : true);
    rep.bounds = audit_protocol(inst, rep.task_passed);
    if (!rep.task_passed) {
        rep.exit_code = 2;
    } else if (rep.bounds.inconsistent || !rep.backends_agree) {
        rep.exit_code = 3;
    } else {
        rep.exit_code = 0;
    }
    return rep;
}

inline json run_report_to_json(const ProtocolInstance &inst, const RunConfig &cfg,
                               const RunReport &rep) {
    json j;
    j["protocol"] = inst.metadata.name;
    j["task_kind"] = task_name(inst.metadata.task);
    j["params"] = metadata_to_json(inst.metadata)["params"];
    j["seed"] = cfg.seed;
    json task;
    task["passed"] = rep.task_passed;
    if (rep.ran_stabilizer) {
        json s;
        s["passed"] = rep.stabilizer.passed;
        s["detail"] = rep.stabilizer.detail;
        s["branches"] = rep.stabilizer.branches;
        s["ptm"] = rep.stabilizer.ptm.m;
        s["averaged_bloch_out"] = rep.stabilizer.averaged_bloch_out;
        task["stabilizer"] = s;
    }
    if (rep.ran_dense) {
        json d;
        d["passed"] = rep.dense.passed;
        d["detail"] = rep.dense.detail;
        d["branches"] = rep.dense.branches;
        d["min_fidelity"] = rep.dense.min_fidelity;
        task["dense"] = d;
    }
    task["backends_agree"] = rep.backends_agree;
    j["task"] = task;
    j["bounds"] = bound_report_to_json(rep.bounds);
    j["exit_code"] = rep.exit_code;
    return j;
}

}  // namespace mfsim

#endif
