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

#ifndef MFSIM_SIM_DENSE_HPP
#define MFSIM_SIM_DENSE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mfsim/circuit.hpp"
#include "mfsim/dilation.hpp"
#include "mfsim/outcome.hpp"
#include "mfsim/sim_stabilizer.hpp"
#include "mfsim/statevector.hpp"

namespace mfsim {

enum class DenseMode { trajectory, explicit_dilation };

struct DenseRunResult {
    StateVector state;
    Trajectory trajectory;  // empty outcomes in explicit-dilation mode
    int depth_executed = 0;
    size_t n_random_measurements = 0;
};

constexpr size_t kDefaultQubitBudget = 26;

/// Runs a dilated circuit on the dense backend. In trajectory mode
/// measurements project-and-renormalize with Born weights and record their
/// outcomes; in explicit-dilation mode every register becomes a real qubit
/// and the measurement unitaries entangle it with the system, never
/// projecting.
inline DenseRunResult apply_circuit(const DilatedCircuit &circuit, const StateVector &initial,
                                    DenseMode mode, OutcomeSource &src,
                                    size_t qubit_budget = kDefaultQubitBudget) {
    if (initial.n_qubits() != circuit.n_physical) {
        throw std::invalid_argument("initial state size does not match the circuit");
    }
    size_t n_regs = circuit.n_registers();
    size_t total = circuit.n_physical + (mode == DenseMode::explicit_dilation ? n_regs : 0);
    if (total > qubit_budget) {
        throw std::invalid_argument("amplitude budget exceeded");
    }
    DenseRunResult res{initial, {}, circuit.depth(), 0};
    if (mode == DenseMode::explicit_dilation) {
        res.state.extend(n_regs);
    }
    auto &outcomes = res.trajectory.outcomes;
    DilatedIndexMap regmap;
    regmap.n_physical = circuit.n_physical;

    auto reg_qubit = [&](uint32_t reg) { return uint32_t(circuit.n_physical + reg); };

    for (const auto &op : circuit.ops) {
        if (auto *g = std::get_if<GateOp>(&op)) {
            res.state.apply_gate(g->gate);
        } else if (auto *m = std::get_if<MeasureOp>(&op)) {
            regmap.allocate(m->reg);
            auto obs = m->obs.dense(circuit.n_physical);
            auto u = measurement_unitary(obs, m->reg);
            if (mode == DenseMode::explicit_dilation) {
                auto wide = m->obs.dense(res.state.n_qubits());
                res.state.apply_measure_unitary(wide, reg_qubit(u.reg));
            } else {
                double p1 = res.state.minus_probability(obs);
                int outcome;
                if (p1 < 1e-12) {
                    outcome = src.deterministic_bit(0);
                } else if (p1 > 1.0 - 1e-12) {
                    outcome = src.deterministic_bit(1);
                } else {
                    outcome = src.random_bit(p1);
                    res.n_random_measurements++;
                }
                res.state.project_pauli(obs, outcome);
                if (outcomes.size() <= m->reg) outcomes.resize(m->reg + 1, 0);
                outcomes[m->reg] = uint8_t(outcome);
            }
        } else if (auto *w = std::get_if<WeakMeasureOp>(&op)) {
            regmap.allocate(w->reg);
            auto obs = w->obs.dense(circuit.n_physical);
            auto wu = weak_measurement_unitary(obs, w->reg, w->angle);
            if (mode == DenseMode::explicit_dilation) {
                auto wide = w->obs.dense(res.state.n_qubits());
                res.state.apply_weak_unitary(wide, reg_qubit(wu.reg), wu.angle);
            } else {
                // Kraus branches of the fresh-register channel:
                // K0 = P+ + cos(a) P-, K1 = i sin(a) P-.
                double pm = res.state.minus_probability(obs);
                double p1 = std::sin(w->angle) * std::sin(w->angle) * pm;
                int outcome;
                if (p1 < 1e-12) {
                    outcome = src.deterministic_bit(0);
                } else if (p1 > 1.0 - 1e-12) {
                    outcome = src.deterministic_bit(1);
                } else {
                    outcome = src.random_bit(p1);
                    res.n_random_measurements++;
                }
                StateVector minus = res.state;
                minus.apply_pauli(obs);
                if (outcome == 1) {
                    // i sin(a) (psi - P psi)/2, then renormalize
                    auto &a = res.state.amplitudes();
                    const auto &b = minus.amplitudes();
                    cplx f = cplx(0, 1) * std::sin(w->angle) * 0.5;
                    for (size_t i = 0; i < a.size(); i++) a[i] = f * (a[i] - b[i]);
                } else {
                    auto &a = res.state.amplitudes();
                    const auto &b = minus.amplitudes();
                    double c = std::cos(w->angle);
                    for (size_t i = 0; i < a.size(); i++) {
                        a[i] = 0.5 * (a[i] + b[i]) + c * 0.5 * (a[i] - b[i]);
                    }
                }
                res.state.renormalize();
                if (outcomes.size() <= w->reg) outcomes.resize(w->reg + 1, 0);
                outcomes[w->reg] = uint8_t(outcome);
            }
        } else if (auto *c = std::get_if<CondOp>(&op)) {
            if (mode == DenseMode::explicit_dilation) {
                std::vector<uint32_t> reg_qubits;
                reg_qubits.reserve(c->parity_regs.size());
                for (auto r : c->parity_regs) reg_qubits.push_back(reg_qubit(r));
                if (c->is_pauli) {
                    res.state.apply_parity_controlled_pauli(c->pauli.dense(res.state.n_qubits()),
                                                            reg_qubits);
                } else {
                    res.state.apply_parity_controlled_gate(c->gate, reg_qubits);
                }
            } else {
                if (detail::parity_of(outcomes, c->parity_regs)) {
                    if (c->is_pauli) {
                        res.state.apply_pauli(c->pauli.dense(circuit.n_physical));
                    } else {
                        res.state.apply_gate(c->gate);
                    }
                }
            }
        }
    }
    res.trajectory.probability = src.branch_probability();
    return res;
}

/// Depth-first branch enumeration on the dense backend (trajectory mode),
/// 0-branch first. Branches below the probability floor are not expanded.
inline std::vector<DenseRunResult> enumerate_dense(const DilatedCircuit &circuit,
                                                   const StateVector &initial,
                                                   size_t max_branches,
                                                   size_t qubit_budget = kDefaultQubitBudget) {
    std::vector<DenseRunResult> out;
    std::vector<int> forced;
    while (true) {
        auto src = OutcomeSource::discovery(forced);
        DenseRunResult rec = apply_circuit(circuit, initial, DenseMode::trajectory, src, qubit_budget);
        if (out.size() + 1 > max_branches) {
            throw std::invalid_argument("trajectory branch budget exceeded");
        }
        const auto flags = src.random_flags();
        const auto bits = rec.trajectory.outcomes;
        out.push_back(std::move(rec));
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

/// |<target|s>|^2. A target smaller than s is treated as the state of the
/// low (physical) qubits and the rest of s is traced out first.
inline double fidelity(const StateVector &s, const StateVector &target) {
    if (target.n_qubits() == s.n_qubits()) {
        return std::norm(s.inner(target));
    }
    if (target.n_qubits() > s.n_qubits()) {
        throw std::invalid_argument("fidelity target larger than the state");
    }
    size_t dlow = size_t{1} << target.n_qubits();
    size_t denv = s.dim() / dlow;
    // <t| tr_env(|s><s|) |t> = sum_e |<t, e|s>|^2
    double f = 0;
    for (size_t e = 0; e < denv; e++) {
        cplx a = 0;
        for (size_t b = 0; b < dlow; b++) {
            a += std::conj(target.amp(b)) * s.amp(e * dlow + b);
        }
        f += std::norm(a);
    }
    return f;
}

/// Reduced density matrix on a qubit subset, row-major over the subset's
/// bit order (first listed qubit = least significant).
struct ReducedDensity {
    std::vector<uint32_t> subset;
    std::vector<cplx> matrix;  // dim 2^|subset| square

    size_t dim() const { return size_t{1} << subset.size(); }
    cplx at(size_t r, size_t c) const { return matrix[r * dim() + c]; }
    double trace_real() const {
        double t = 0;
        for (size_t i = 0; i < dim(); i++) t += at(i, i).real();
        return t;
    }
};

inline ReducedDensity reduced_density(const StateVector &s, const std::vector<uint32_t> &subset) {
    for (auto q : subset) {
        if (q >= s.n_qubits()) {
            throw std::invalid_argument("reduced density subset out of range");
        }
    }
    ReducedDensity rd;
    rd.subset = subset;
    size_t d = size_t{1} << subset.size();
    rd.matrix.assign(d * d, cplx(0, 0));
    size_t env_bits = s.n_qubits() - subset.size();
    // enumerate environment configurations by scattering bits
    std::vector<uint32_t> env;
    {
        std::vector<bool> in_sub(s.n_qubits(), false);
        for (auto q : subset) in_sub[q] = true;
        for (uint32_t q = 0; q < s.n_qubits(); q++) {
            if (!in_sub[q]) env.push_back(q);
        }
    }
    auto scatter = [](const std::vector<uint32_t> &qs, size_t bits) {
        size_t v = 0;
        for (size_t i = 0; i < qs.size(); i++) {
            if ((bits >> i) & 1) v |= size_t{1} << qs[i];
        }
        return v;
    };
    for (size_t e = 0; e < (size_t{1} << env_bits); e++) {
        size_t ebits = scatter(env, e);
        for (size_t r = 0; r < d; r++) {
            cplx ar = s.amp(ebits | scatter(subset, r));
            if (ar == cplx(0, 0)) continue;
            for (size_t c = 0; c < d; c++) {
                cplx ac = s.amp(ebits | scatter(subset, c));
                rd.matrix[r * d + c] += ar * std::conj(ac);
            }
        }
    }
    return rd;
}

/// Connected correlator between single-site observables in a post-selected
/// trajectory state: <Oi Of> - <Oi><Of>. The raw trajectory-weighted form
/// is this value times the trajectory probability.
inline double connected_correlation(const StateVector &s, uint32_t i, uint32_t f, char obs_i,
                                    char obs_f) {
    size_t n = s.n_qubits();
    auto oi = PauliString::single(n, i, obs_i);
    auto of = PauliString::single(n, f, obs_f);
    double joint = s.expectation_pauli(multiply(oi, of));
    return joint - s.expectation_pauli(oi) * s.expectation_pauli(of);
}

struct CorrelationResult {
    double connected = 0;          // normalized within the trajectory state
    double trajectory_weighted = 0;  // times the trajectory probability
    char best_i = 'Z', best_f = 'Z';
};

/// Correlation of a trajectory state with its probability attached; with
/// scan_axes the single-qubit Pauli pair maximizing |connected| is chosen.
inline CorrelationResult correlation(const StateVector &s, double trajectory_probability,
                                     uint32_t i, uint32_t f, char obs_i = 'Z', char obs_f = 'Z',
                                     bool scan_axes = false) {
    if (trajectory_probability <= 0) {
        throw std::invalid_argument("zero-probability trajectory");
    }
    CorrelationResult r;
    if (!scan_axes) {
        r.connected = connected_correlation(s, i, f, obs_i, obs_f);
        r.best_i = obs_i;
        r.best_f = obs_f;
    } else {
        const char axes[3] = {'X', 'Y', 'Z'};
        double best = -1;
        for (char a : axes) {
            for (char b : axes) {
                double v = connected_correlation(s, i, f, a, b);
                if (std::abs(v) > best) {
                    best = std::abs(v);
                    r.connected = v;
                    r.best_i = a;
                    r.best_f = b;
                }
            }
        }
    }
    r.trajectory_weighted = r.connected * trajectory_probability;
    return r;
}

struct SqueezingStats {
    std::array<double, 3> mean_spin{0, 0, 0};
    std::array<double, 3> variance{0, 0, 0};  // along x, y, z
    double min_transverse_variance = 0;
    double xi2 = 0;
    bool degenerate_axis = false;  // <S> = 0: squeezing frame undefined
    double average_correlation = 0;
};

/// Collective-spin statistics: S_a = sum_j sigma_a^j / 2, the transverse
/// minimization frame, xi^2 = N min_var / |<S>|^2, and the summed pair
/// correlations along the anti-squeezed transverse axis.
inline SqueezingStats squeezing_stats(const StateVector &s) {
    SqueezingStats st;
    size_t n = s.n_qubits();
    const char axes[3] = {'X', 'Y', 'Z'};
    // <S_a> and <S_a S_b>
    std::array<std::array<double, 3>, 3> sab{};
    std::array<double, 3> sa{};
    std::vector<std::array<double, 3>> site_exp(n);
    for (uint32_t j = 0; j < n; j++) {
        for (int a = 0; a < 3; a++) {
            site_exp[j][a] = s.expectation_pauli(PauliString::single(n, j, axes[a]));
        }
    }
    // pair expectations
    std::array<std::array<std::vector<std::vector<double>>, 3>, 3> pair;
    for (int a = 0; a < 3; a++) {
        for (int b = 0; b < 3; b++) {
            pair[a][b].assign(n, std::vector<double>(n, 0));
        }
    }
    for (uint32_t u = 0; u < n; u++) {
        for (uint32_t v = 0; v < n; v++) {
            for (int a = 0; a < 3; a++) {
                for (int b = 0; b < 3; b++) {
                    if (u == v) continue;
                    auto p = multiply(PauliString::single(n, u, axes[a]),
                                      PauliString::single(n, v, axes[b]));
                    pair[a][b][u][v] = s.expectation_pauli(p);
                }
            }
        }
    }
    for (int a = 0; a < 3; a++) {
        sa[a] = 0;
        for (uint32_t j = 0; j < n; j++) sa[a] += 0.5 * site_exp[j][a];
        for (int b = 0; b < 3; b++) {
            double acc = 0;
            for (uint32_t u = 0; u < n; u++) {
                for (uint32_t v = 0; v < n; v++) {
                    if (u == v) continue;
                    acc += 0.25 * pair[a][b][u][v];
                }
            }
            if (a == b) acc += 0.25 * double(n);  // sigma^2 = 1 on the diagonal
            sab[a][b] = acc;
        }
    }
    st.mean_spin = sa;
    for (int a = 0; a < 3; a++) {
        st.variance[a] = sab[a][a] - sa[a] * sa[a];
    }
    double s2 = sa[0] * sa[0] + sa[1] * sa[1] + sa[2] * sa[2];
    if (s2 < 1e-18) {
        st.degenerate_axis = true;
        return st;
    }
    // Orthonormal frame (e1, e2) transverse to <S>.
    std::array<double, 3> zhat{sa[0] / std::sqrt(s2), sa[1] / std::sqrt(s2), sa[2] / std::sqrt(s2)};
    std::array<double, 3> ref{1, 0, 0};
    if (std::abs(zhat[0]) > 0.9) ref = {0, 1, 0};
    auto cross = [](std::array<double, 3> a, std::array<double, 3> b) {
        return std::array<double, 3>{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                                     a[0] * b[1] - a[1] * b[0]};
    };
    auto normed = [](std::array<double, 3> a) {
        double l = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
        return std::array<double, 3>{a[0] / l, a[1] / l, a[2] / l};
    };
    auto e1 = normed(cross(zhat, ref));
    auto e2 = normed(cross(zhat, e1));
    // 2x2 covariance of (S.e1, S.e2); <S.e_i> = 0 by construction.
    auto cov = [&](const std::array<double, 3> &u, const std::array<double, 3> &v) {
        double acc = 0;
        for (int a = 0; a < 3; a++) {
            for (int b = 0; b < 3; b++) {
                acc += u[a] * v[b] * 0.5 * (sab[a][b] + sab[b][a]);
            }
        }
        double su = u[0] * sa[0] + u[1] * sa[1] + u[2] * sa[2];
        double sv = v[0] * sa[0] + v[1] * sa[1] + v[2] * sa[2];
        return acc - su * sv;
    };
    double c11 = cov(e1, e1), c22 = cov(e2, e2), c12 = cov(e1, e2);
    double tr = c11 + c22, disc = std::sqrt((c11 - c22) * (c11 - c22) + 4 * c12 * c12);
    st.min_transverse_variance = 0.5 * (tr - disc);
    double max_var = 0.5 * (tr + disc);
    st.xi2 = double(n) * st.min_transverse_variance / s2;
    // Summed pair correlations along the anti-squeezed transverse axis.
    double ct = (disc > 1e-15) ? (c11 - c22) / disc : 1.0;
    double stt = (disc > 1e-15) ? 2 * c12 / disc : 0.0;
    double cth = std::sqrt(std::max(0.0, (1 + ct) / 2));
    double sth = (cth > 1e-12) ? stt / (2 * cth) : 1.0;
    std::array<double, 3> emax{};
    for (int a = 0; a < 3; a++) emax[a] = cth * e1[a] + sth * e2[a];
    (void)max_var;
    double acc = 0;
    for (uint32_t u = 0; u < n; u++) {
        for (uint32_t v = 0; v < n; v++) {
            if (u == v) continue;
            double joint = 0, mu = 0, mv = 0;
            for (int a = 0; a < 3; a++) {
                mu += emax[a] * site_exp[u][a];
                mv += emax[a] * site_exp[v][a];
                for (int b = 0; b < 3; b++) {
                    joint += emax[a] * emax[b] * pair[a][b][u][v];
                }
            }
            acc += joint - mu * mv;
        }
    }
    st.average_correlation = acc;
    return st;
}

/// Dense-backend Pauli transfer matrix by eigenstate preparation and
/// trajectory enumeration, matching the stabilizer-backend convention.
inline ProcessMatrix dense_process_matrix(const DilatedCircuit &circuit, uint32_t in_site,
                                          uint32_t out_site, size_t max_branches = 1 << 16) {
    const char axes[3] = {'X', 'Y', 'Z'};
    ProcessMatrix ptm;
    for (int b = 0; b < 3; b++) {
        std::array<std::array<double, 3>, 2> bloch{};
        for (int sgn = 0; sgn < 2; sgn++) {
            DilatedCircuit prepped = circuit;
            std::vector<Op> ops;
            for (auto &g : eigenstate_prep(in_site, axes[b], sgn == 0 ? +1 : -1)) {
                ops.push_back(GateOp{g});
            }
            ops.insert(ops.end(), circuit.ops.begin(), circuit.ops.end());
            prepped.ops = std::move(ops);
            auto recs = enumerate_dense(prepped, StateVector(circuit.n_physical), max_branches);
            for (const auto &rec : recs) {
                for (int a = 0; a < 3; a++) {
                    bloch[sgn][a] += rec.trajectory.probability *
                                     rec.state.expectation_pauli(PauliString::single(
                                         circuit.n_physical, out_site, axes[a]));
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
