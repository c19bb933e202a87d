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

#ifndef MFSIM_HEISENBERG_HPP
#define MFSIM_HEISENBERG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mfsim/circuit.hpp"
#include "mfsim/dilation.hpp"
#include "mfsim/tableau.hpp"

namespace mfsim {

/// The X/Z logical operator pair for one encoded qubit, carried through the
/// dilated circuit. The pair anticommutes and each member squares to
/// identity at every step.
struct LogicalPair {
    DilatedPauli x_logical;
    DilatedPauli z_logical;

    static LogicalPair at_site(size_t n, uint32_t site) {
        return {DilatedPauli::physical(PauliString::single(n, site, 'X')),
                DilatedPauli::physical(PauliString::single(n, site, 'Z'))};
    }
};

/// Per-step support intervals of the evolving logicals, for plotting
/// operator light cones.
struct LightconeStep {
    size_t op_index;       // index into circuit.ops, walked in reverse
    int layer;             // ASAP two-site layer of that op (0 if none)
    uint32_t x_lo, x_hi;   // physical support interval of X_L
    uint32_t z_lo, z_hi;   // and of Z_L
};

using LightconeReport = std::vector<LightconeStep>;

namespace detail {

inline std::pair<uint32_t, uint32_t> support_interval(const PauliString &p) {
    uint32_t lo = 0, hi = 0;
    bool any = false;
    for (uint32_t q = 0; q < p.n; q++) {
        if (p.letter_at(q) != 'I') {
            if (!any) lo = q;
            hi = q;
            any = true;
        }
    }
    if (!any) return {0, 0};
    return {lo, hi};
}

inline DilatedPauli conjugate_reverse_step(const DilatedPauli &a, const Op &op, uint32_t n_physical) {
    if (auto *g = std::get_if<GateOp>(&op)) {
        DilatedPauli r = a;
        r.phys.conjugate(g->gate);  // g^dag P g
        return r;
    }
    if (auto *m = std::get_if<MeasureOp>(&op)) {
        return conjugate_through_measurement(a, m->obs.dense(n_physical), m->reg);
    }
    if (std::get_if<WeakMeasureOp>(&op)) {
        throw std::invalid_argument("Heisenberg evolution through a weak measurement is not Clifford");
    }
    const auto &c = std::get<CondOp>(op);
    if (c.is_pauli) {
        return conjugate_through_conditioned(a, c.parity_regs, c.pauli.dense(n_physical));
    }
    if (!gate_is_clifford(c.gate.kind)) {
        throw std::invalid_argument("conditioned non-Clifford gate in Heisenberg evolution");
    }
    return conjugate_through_conditioned_gate(a, c.parity_regs, c.gate);
}

/// Evaluates the leftover Stinespring factors in the default |0...0>
/// apparatus state: Z~ factors read +1 and drop; X~ or Y~ factors signal
/// feedback that is not of parity form.
inline void evaluate_default_registers(DilatedPauli &a) {
    for (auto &[reg, letter] : a.ss) {
        if (letter == 'X' || letter == 'Y') {
            throw std::runtime_error("residual X~/Y~ Stinespring factor at evaluation");
        }
    }
    a.ss.clear();
}

}  // namespace detail

/// Conjugates the logical pair backward through the circuit: feedback and
/// measurement channels first (they act last on states), then the unitaries
/// in reverse. Terminal Z~ factors evaluate to +1 in the default register
/// state and are dropped.
inline LogicalPair evolve_logical(const DilatedCircuit &circuit, const LogicalPair &pair,
                                  LightconeReport *report = nullptr) {
    LogicalPair cur = pair;
    std::vector<int> layers;
    if (report) layers = circuit.two_site_layers();
    for (size_t i = circuit.ops.size(); i-- > 0;) {
        cur.x_logical = detail::conjugate_reverse_step(cur.x_logical, circuit.ops[i], circuit.n_physical);
        cur.z_logical = detail::conjugate_reverse_step(cur.z_logical, circuit.ops[i], circuit.n_physical);
        if (report) {
            auto [xl, xh] = detail::support_interval(cur.x_logical.phys);
            auto [zl, zh] = detail::support_interval(cur.z_logical.phys);
            report->push_back({i, layers[i], xl, xh, zl, zh});
        }
    }
    detail::evaluate_default_registers(cur.x_logical);
    detail::evaluate_default_registers(cur.z_logical);
    return cur;
}

/// The extremal-coordinate site where the pair's single-site factors
/// anticommute. On a chain this is the paper's front j*.
inline uint32_t anticommutation_front(const LogicalPair &pair, const Geometry &geom) {
    const PauliString &x = pair.x_logical.phys;
    const PauliString &z = pair.z_logical.phys;
    bool found = false;
    uint32_t best = 0;
    int64_t best_key = 0;
    for (uint32_t q = 0; q < x.n; q++) {
        bool anti = (x.x_bit(q) && z.z_bit(q)) != (x.z_bit(q) && z.x_bit(q));
        if (!anti) continue;
        auto [r, c] = geom.coord(q);
        int64_t key = r + c;
        if (!found || key > best_key) {
            best = q;
            best_key = key;
            found = true;
        }
    }
    if (!found) {
        throw std::invalid_argument("logical pair commutes everywhere: not a valid pair");
    }
    return best;
}

/// True iff the evolved pair factors as (X_site * s1, Z_site * s2) with s1
/// and s2 positive-sign members of the initial stabilizer group, i.e. the
/// pair acts on the initial state exactly as the logical operators at the
/// site.
inline bool verify_logical_action(const Tableau &initial_stabilizers, const LogicalPair &pair_T,
                                  uint32_t site) {
    if (!pair_T.x_logical.ss.empty() || !pair_T.z_logical.ss.empty()) {
        throw std::invalid_argument("logical pair still carries Stinespring factors");
    }
    if (pair_T.x_logical.phase4 % 2 != 0 || pair_T.z_logical.phase4 % 2 != 0) {
        return false;
    }
    size_t n = initial_stabilizers.n_qubits();
    auto check = [&](const DilatedPauli &op, char axis) {
        auto [s, k] = multiply_with_phase(PauliString::single(n, site, axis), op.phys);
        if (k % 2 != 0) return false;
        int8_t sgn = int8_t((k == 2 ? -1 : 1) * s.sign * (op.phase4 == 2 ? -1 : 1));
        s.sign = sgn;
        return initial_stabilizers.expectation(s) == +1;
    };
    return check(pair_T.x_logical, 'X') && check(pair_T.z_logical, 'Z');
}

}  // namespace mfsim

#endif
