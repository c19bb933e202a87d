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

#ifndef MFSIM_CIRCUIT_HPP
#define MFSIM_CIRCUIT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mfsim/pauli.hpp"

namespace mfsim {

/// Site coordinates for distance accounting: a 1D chain or a 2D grid with
/// Manhattan distance.
struct Geometry {
    enum class Kind { chain, grid };
    Kind kind = Kind::chain;
    std::vector<uint32_t> dims;  // chain: {n}; grid: {rows, cols}

    static Geometry chain(uint32_t n) { return {Kind::chain, {n}}; }
    static Geometry grid(uint32_t rows, uint32_t cols) { return {Kind::grid, {rows, cols}}; }

    size_t sites() const {
        size_t s = 1;
        for (auto d : dims) s *= d;
        return s;
    }

    int spatial_dim() const { return kind == Kind::chain ? 1 : 2; }

    std::pair<int64_t, int64_t> coord(uint32_t site) const {
        if (kind == Kind::chain) return {int64_t(site), 0};
        return {int64_t(site / dims[1]), int64_t(site % dims[1])};
    }

    int64_t distance(uint32_t a, uint32_t b) const {
        auto [ar, ac] = coord(a);
        auto [br, bc] = coord(b);
        return std::llabs(ar - br) + std::llabs(ac - bc);
    }
};

/// Sparse signed Pauli word, the form observables take inside circuit ops.
struct SparsePauli {
    std::vector<std::pair<uint32_t, char>> terms;  // (site, letter), sites strictly increasing
    int8_t sign = +1;

    static SparsePauli single(uint32_t site, char letter, int8_t sgn = +1) {
        return {{{site, letter}}, sgn};
    }

    PauliString dense(size_t n) const {
        PauliString p(n);
        for (auto &[q, c] : terms) p.set_letter(q, c);
        p.sign = sign;
        return p;
    }

    std::vector<uint32_t> support() const {
        std::vector<uint32_t> s;
        s.reserve(terms.size());
        for (auto &[q, c] : terms) s.push_back(q);
        return s;
    }

    uint32_t max_site() const {
        uint32_t m = 0;
        for (auto &[q, c] : terms) m = std::max(m, q);
        return m;
    }
};

struct GateOp {
    Gate gate;
};

/// Projective measurement of an involutory observable into a Stinespring
/// register. `region` is the measurement channel's declared region of
/// support for resource accounting; it defaults to the observable support
/// and may be widened by a builder (e.g. to a decoded Bell pair).
struct MeasureOp {
    SparsePauli obs;
    uint32_t reg = 0;
    std::vector<uint32_t> region;
};

/// Weak measurement, dense backend only. angle in [0, pi/2]; pi/2 is a
/// projective measurement up to phase, 0 the identity channel.
struct WeakMeasureOp {
    SparsePauli obs;
    uint32_t reg = 0;
    double angle = 0;
    std::vector<uint32_t> region;
};

/// Unitary conditioned on the parity of a register set: acts as the gate on
/// the odd-parity subspace, identity on even. The gate is either a Pauli
/// word (possibly multi-site) or a named 1-2 site gate.
struct CondOp {
    std::vector<uint32_t> parity_regs;
    bool is_pauli = true;
    SparsePauli pauli;  // used when is_pauli
    Gate gate{};        // used otherwise
};

using Op = std::variant<GateOp, MeasureOp, WeakMeasureOp, CondOp>;

/// Ordered ops over physical sites plus Stinespring registers.
struct DilatedCircuit {
    uint32_t n_physical = 0;
    Geometry geom;
    std::vector<Op> ops;

    static DilatedCircuit on_chain(uint32_t n) {
        DilatedCircuit c;
        c.n_physical = n;
        c.geom = Geometry::chain(n);
        return c;
    }

    static DilatedCircuit on_grid(uint32_t rows, uint32_t cols) {
        DilatedCircuit c;
        c.n_physical = rows * cols;
        c.geom = Geometry::grid(rows, cols);
        return c;
    }

    void gate(GateKind k, uint32_t a) { ops.push_back(GateOp{Gate{k, a, 0}}); }
    void gate(GateKind k, uint32_t a, uint32_t b) { ops.push_back(GateOp{Gate{k, a, b}}); }

    uint32_t measure(SparsePauli obs, std::vector<uint32_t> region = {}) {
        uint32_t reg = next_reg_++;
        if (region.empty()) region = obs.support();
        ops.push_back(MeasureOp{std::move(obs), reg, std::move(region)});
        return reg;
    }

    uint32_t weak_measure(SparsePauli obs, double angle) {
        uint32_t reg = next_reg_++;
        auto region = obs.support();
        ops.push_back(WeakMeasureOp{std::move(obs), reg, angle, std::move(region)});
        return reg;
    }

    void cond_pauli(std::vector<uint32_t> parity_regs, SparsePauli p) {
        ops.push_back(CondOp{std::move(parity_regs), true, std::move(p), Gate{}});
    }

    void cond_gate(std::vector<uint32_t> parity_regs, Gate g) {
        ops.push_back(CondOp{std::move(parity_regs), false, SparsePauli{}, g});
    }

    size_t n_registers() const {
        size_t r = next_reg_;
        for (const auto &op : ops) {
            if (auto *m = std::get_if<MeasureOp>(&op)) r = std::max(r, size_t(m->reg) + 1);
            if (auto *w = std::get_if<WeakMeasureOp>(&op)) r = std::max(r, size_t(w->reg) + 1);
        }
        return r;
    }

    /// ASAP layer of each op's two-site gate, 0 for ops that add no depth.
    /// Single-site gates are free; measurements pin their support to the
    /// layer they complete after; conditioned ops cannot precede the
    /// measurements they read (classical communication is instantaneous but
    /// ordered), so they raise their targets' frontiers to that layer.
    std::vector<int> two_site_layers() const {
        std::vector<int> frontier(n_physical, 0);
        std::vector<int> reg_time;
        std::vector<int> layers(ops.size(), 0);
        auto advance = [&](uint32_t a, uint32_t b, size_t i) {
            int layer = std::max(frontier[a], frontier[b]) + 1;
            frontier[a] = frontier[b] = layer;
            layers[i] = layer;
        };
        auto pin_measurement = [&](const SparsePauli &obs, uint32_t reg) {
            int t = 0;
            for (auto &[q, c] : obs.terms) t = std::max(t, frontier[q]);
            for (auto &[q, c] : obs.terms) frontier[q] = t;
            if (reg_time.size() <= reg) reg_time.resize(reg + 1, 0);
            reg_time[reg] = t;
        };
        for (size_t i = 0; i < ops.size(); i++) {
            if (auto *g = std::get_if<GateOp>(&ops[i])) {
                if (g->gate.two_site()) advance(g->gate.q0, g->gate.q1, i);
            } else if (auto *m = std::get_if<MeasureOp>(&ops[i])) {
                pin_measurement(m->obs, m->reg);
            } else if (auto *w = std::get_if<WeakMeasureOp>(&ops[i])) {
                pin_measurement(w->obs, w->reg);
            } else if (auto *c = std::get_if<CondOp>(&ops[i])) {
                int t = 0;
                for (auto r : c->parity_regs) {
                    if (r < reg_time.size()) t = std::max(t, reg_time[r]);
                }
                if (c->is_pauli) {
                    for (auto &[q, l] : c->pauli.terms) frontier[q] = std::max(frontier[q], t);
                } else {
                    frontier[c->gate.q0] = std::max(frontier[c->gate.q0], t);
                    if (c->gate.two_site()) {
                        frontier[c->gate.q1] = std::max(frontier[c->gate.q1], t);
                        advance(c->gate.q0, c->gate.q1, i);
                    }
                }
            }
        }
        return layers;
    }

    /// Two-site-gate depth; see two_site_layers for the counting rules.
    int depth() const {
        int d = 0;
        for (int l : two_site_layers()) d = std::max(d, l);
        return d;
    }

  private:
    uint32_t next_reg_ = 0;
};

/// A single assignment of outcomes to the allocated registers, with its
/// probability. Exhaustive enumerations sum to 1 (exactly so for Clifford
/// circuits, whose branch weights are dyadic).
struct Trajectory {
    std::vector<uint8_t> outcomes;
    double probability = 1.0;
};

}  // namespace mfsim

#endif
