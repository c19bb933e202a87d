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

#ifndef MFSIM_SIM_STABILIZER_HPP
#define MFSIM_SIM_STABILIZER_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mfsim/circuit.hpp"
#include "mfsim/dilation.hpp"
#include "mfsim/outcome.hpp"
#include "mfsim/tableau.hpp"

namespace mfsim {

/// One executed trajectory on the tableau backend. Stinespring registers
/// are classical outcome bits here; that is exactly equivalent to dilated
/// qubits for projective measurements and keeps the tableau at the physical
/// size.
struct RunRecord {
    Tableau final_tableau;
    Trajectory trajectory;
    int depth_executed = 0;
    size_t n_random_measurements = 0;
};

namespace detail {

inline int parity_of(const std::vector<uint8_t> &outcomes, const std::vector<uint32_t> &regs) {
    int p = 0;
    for (auto r : regs) {
        if (r >= outcomes.size()) {
            throw std::invalid_argument("conditioned gate reads an unallocated register");
        }
        p ^= outcomes[r];
    }
    return p;
}

}  // namespace detail

inline RunRecord run_trajectory(const DilatedCircuit &circuit, const Tableau &initial,
                                OutcomeSource &src) {
    RunRecord rec{initial, {}, circuit.depth(), 0};
    auto &outcomes = rec.trajectory.outcomes;
    DilatedIndexMap regmap;
    regmap.n_physical = circuit.n_physical;
    for (const auto &op : circuit.ops) {
        if (auto *g = std::get_if<GateOp>(&op)) {
            rec.final_tableau.apply(g->gate);
        } else if (auto *m = std::get_if<MeasureOp>(&op)) {
            regmap.allocate(m->reg);
            auto r = rec.final_tableau.measure(m->obs.dense(circuit.n_physical), src);
            if (!r.deterministic) rec.n_random_measurements++;
            if (outcomes.size() <= m->reg) outcomes.resize(m->reg + 1, 0);
            outcomes[m->reg] = uint8_t(r.outcome);
        } else if (std::get_if<WeakMeasureOp>(&op)) {
            throw std::invalid_argument("weak measurement on the tableau backend");
        } else if (auto *c = std::get_if<CondOp>(&op)) {
            if (detail::parity_of(outcomes, c->parity_regs)) {
                if (c->is_pauli) {
                    rec.final_tableau.apply_pauli_string(c->pauli.dense(circuit.n_physical));
                } else {
                    rec.final_tableau.apply(c->gate);
                }
            }
        }
    }
    rec.trajectory.probability = src.branch_probability();
    return rec;
}

/// Exhaustive depth-first enumeration by forcing outcomes, 0-branch first in
/// register allocation order. Branch weights are exact dyadic rationals, so
/// the probabilities sum to 1 exactly. Deterministic measurements do not
/// branch. Each branch replays the circuit; protocol circuits are cheap.
inline std::vector<RunRecord> enumerate_trajectories(const DilatedCircuit &circuit,
                                                     const Tableau &initial, size_t max_branches) {
    std::vector<RunRecord> out;
    std::vector<int> forced;
    while (true) {
        auto src = OutcomeSource::discovery(forced);
        RunRecord rec = run_trajectory(circuit, initial, src);
        if (rec.n_random_measurements < 63 &&
            (size_t{1} << rec.n_random_measurements) > max_branches) {
            throw std::invalid_argument("trajectory branch budget exceeded");
        }
        const auto flags = src.random_flags();
        const auto bits = rec.trajectory.outcomes;  // ordinal == register order
        out.push_back(std::move(rec));
        // Backtrack: deepest random choice still at 0 flips to 1 and the
        // tail is re-discovered, i.e. plain DFS over the outcome tree.
        size_t flip = bits.size();
        for (size_t i = bits.size(); i-- > 0;) {
            if (flags[i] && bits[i] == 0) {
                flip = i;
                break;
            }
        }
        if (flip == bits.size()) break;
        forced.assign(bits.begin(), bits.begin() + flip);
        forced.push_back(1);
    }
    return out;
}

/// Probability-weighted expectation of X, Y, Z at one site over enumerated
/// trajectories: the outcome-averaged Bloch vector.
inline std::array<double, 3> averaged_bloch(const std::vector<RunRecord> &records, uint32_t site) {
    if (records.empty()) {
        throw std::invalid_argument("averaged_bloch needs at least one record");
    }
    std::array<double, 3> acc{0, 0, 0};
    const char axes[3] = {'X', 'Y', 'Z'};
    for (const auto &rec : records) {
        size_t n = rec.final_tableau.n_qubits();
        for (int a = 0; a < 3; a++) {
            acc[a] += rec.trajectory.probability *
                      rec.final_tableau.expectation(PauliString::single(n, site, axes[a]));
        }
    }
    return acc;
}

/// 3x3 Pauli transfer matrix of the circuit viewed as a channel from
/// in_site to out_site: column b is the averaged Bloch vector difference
/// between the +- eigenstates of P_b prepared at in_site. Identity means
/// every logical state crosses intact; the zero matrix is a full twirl.
struct ProcessMatrix {
    std::array<std::array<double, 3>, 3> m{};  // m[a][b]

    bool is_identity(double tol = 0) const {
        for (int a = 0; a < 3; a++) {
            for (int b = 0; b < 3; b++) {
                double want = a == b ? 1.0 : 0.0;
                if (std::abs(m[a][b] - want) > tol) return false;
            }
        }
        return true;
    }

    bool is_zero(double tol = 0) const {
        for (auto &row : m) {
            for (auto v : row) {
                if (std::abs(v) > tol) return false;
            }
        }
        return true;
    }
};

/// Gate prefix preparing the +-1 eigenstate of axis 'X'/'Y'/'Z' at a site
/// of |0...0>.
inline std::vector<Gate> eigenstate_prep(uint32_t site, char axis, int eigen_sign) {
    std::vector<Gate> gates;
    if (eigen_sign < 0) gates.push_back(Gate{GateKind::X, site, 0});
    if (axis == 'X') {
        gates.push_back(Gate{GateKind::H, site, 0});
    } else if (axis == 'Y') {
        gates.push_back(Gate{GateKind::H, site, 0});
        gates.push_back(Gate{GateKind::S, site, 0});
    }
    return gates;
}

inline ProcessMatrix teleport_process_matrix(const DilatedCircuit &circuit, uint32_t in_site,
                                             uint32_t out_site, size_t max_branches = 1 << 20,
                                             bool *per_branch_identity = nullptr) {
    if (in_site >= circuit.n_physical || out_site >= circuit.n_physical) {
        throw std::invalid_argument("process matrix sites out of range");
    }
    const char axes[3] = {'X', 'Y', 'Z'};
    ProcessMatrix ptm;
    if (per_branch_identity) *per_branch_identity = true;
    for (int b = 0; b < 3; b++) {
        std::array<std::array<double, 3>, 2> bloch{};  // per eigen sign
        for (int s = 0; s < 2; s++) {
            int eigen_sign = s == 0 ? +1 : -1;
            DilatedCircuit prepped = circuit;
            std::vector<Op> ops;
            for (auto &g : eigenstate_prep(in_site, axes[b], eigen_sign)) {
                ops.push_back(GateOp{g});
            }
            ops.insert(ops.end(), circuit.ops.begin(), circuit.ops.end());
            prepped.ops = std::move(ops);
            auto records = enumerate_trajectories(prepped, Tableau(circuit.n_physical), max_branches);
            bloch[s] = averaged_bloch(records, out_site);
            if (per_branch_identity) {
                for (const auto &rec : records) {
                    size_t n = rec.final_tableau.n_qubits();
                    for (int a = 0; a < 3; a++) {
                        int want = (a == b) ? eigen_sign : 0;
                        if (rec.final_tableau.expectation(
                                PauliString::single(n, out_site, axes[a])) != want) {
                            *per_branch_identity = false;
                        }
                    }
                }
            }
        }
        for (int a = 0; a < 3; a++) {
            ptm.m[a][b] = (bloch[0][a] - bloch[1][a]) / 2.0;
        }
    }
    return ptm;
}

}  // namespace mfsim

#endif
