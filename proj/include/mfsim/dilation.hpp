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

#ifndef MFSIM_DILATION_HPP
#define MFSIM_DILATION_HPP

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mfsim/circuit.hpp"
#include "mfsim/pauli.hpp"
#include "mfsim/statevector.hpp"

namespace mfsim {

/// Physical and Stinespring index bookkeeping: registers are allocated in
/// the order measurements execute, one register per measurement.
struct DilatedIndexMap {
    uint32_t n_physical = 0;
    uint32_t n_stinespring = 0;
    std::vector<uint32_t> register_of_measurement;  // measurement ordinal -> register

    uint32_t allocate(uint32_t declared_reg) {
        if (declared_reg != n_stinespring) {
            throw std::invalid_argument("registers must be declared in allocation order");
        }
        register_of_measurement.push_back(declared_reg);
        n_stinespring++;
        return declared_reg;
    }
};

/// A Pauli on the physical factor tensored with single-register Pauli
/// letters on the Stinespring factor, times i^phase4. The operator currency
/// of Heisenberg evolution through measurement and feedback channels.
struct DilatedPauli {
    PauliString phys;
    std::map<uint32_t, char> ss;  // register -> 'X','Y','Z' (absent = identity)
    int phase4 = 0;               // exponent of i

    static DilatedPauli physical(PauliString p) { return {std::move(p), {}, 0}; }

    char ss_letter(uint32_t reg) const {
        auto it = ss.find(reg);
        return it == ss.end() ? 'I' : it->second;
    }

    void set_ss(uint32_t reg, char letter) {
        if (letter == 'I') {
            ss.erase(reg);
        } else {
            ss[reg] = letter;
        }
    }

    int8_t folded_sign() const {
        if (phase4 % 2 != 0) {
            throw std::logic_error("dilated operator carries an unpaired factor of i");
        }
        return int8_t(phase4 == 2 ? -phys.sign : phys.sign);
    }

    bool anticommutes_with(const DilatedPauli &o) const {
        bool anti = !phys.commutes_with(o.phys);
        for (auto &[reg, c] : ss) {
            char oc = o.ss_letter(reg);
            if (oc != 'I' && oc != c) anti = !anti;
        }
        return anti;
    }
};

/// One weighted term of a conjugation result; pure-Pauli rows of the lookup
/// table produce a single term with coefficient 1.
struct DilatedTerm {
    std::complex<double> coeff{1.0, 0.0};
    DilatedPauli op;
    // Projector letters on registers: entries here mean the term carries
    // |n><n| on that register rather than a Pauli letter.
    std::map<uint32_t, int> ss_projectors;
};

/// Structured description of the unitary measurement channel
/// U = (1+S)/2 x I~ + (1-S)/2 x X~ acting on observable S and one register.
struct MeasurementUnitary {
    PauliString observable;
    uint32_t reg;
};

inline MeasurementUnitary measurement_unitary(const PauliString &observable, uint32_t reg) {
    // Every signed Pauli word squares to +1, so the two-projector form is
    // always valid; the check guards against future observable kinds.
    auto [sq, k] = multiply_with_phase(observable, observable);
    if (!sq.is_identity() || sq.sign != +1 || k != 0) {
        throw std::invalid_argument("measurement observable must square to +identity");
    }
    return {observable, reg};
}

struct WeakMeasurementUnitary {
    PauliString observable;
    uint32_t reg;
    double angle;
};

inline WeakMeasurementUnitary weak_measurement_unitary(const PauliString &observable, uint32_t reg,
                                                       double angle) {
    if (!(angle >= 0.0 && angle <= std::acos(-1.0) / 2 + 1e-12)) {
        throw std::invalid_argument("weak measurement angle must lie in [0, pi/2]");
    }
    measurement_unitary(observable, reg);
    return {observable, reg, angle};
}

/// Conjugation of A x A~ through the measurement unitary of S: the lookup
/// table realized on pure Pauli inputs. Commuting physical part keeps or
/// converts the register letter; anticommuting swaps I~ <-> X~ and rotates
/// Y~ <-> Z~ while attaching S to the physical part.
inline DilatedPauli conjugate_through_measurement(const DilatedPauli &a, const PauliString &s,
                                                  uint32_t reg) {
    DilatedPauli r = a;
    bool comm = a.phys.commutes_with(s);
    char t = a.ss_letter(reg);
    auto attach_s = [&]() { r.phase4 = (r.phase4 + r.phys.mul_right_phase(s)) % 4;
                            r.phys.sign = int8_t(r.phys.sign * s.sign); };
    if (comm) {
        switch (t) {
            case 'I':
            case 'X':
                break;  // unchanged
            case 'Y':
            case 'Z':
                attach_s();
                break;
        }
    } else {
        switch (t) {
            case 'I':
                r.set_ss(reg, 'X');
                break;
            case 'X':
                r.set_ss(reg, 'I');
                break;
            case 'Y':
                attach_s();
                r.set_ss(reg, 'Z');
                r.phase4 = (r.phase4 + 1) % 4;  // +i
                break;
            case 'Z':
                attach_s();
                r.set_ss(reg, 'Y');
                r.phase4 = (r.phase4 + 3) % 4;  // -i
                break;
        }
    }
    return r;
}

/// The projector rows of the lookup table: A x |n><n| splits into two terms.
inline std::vector<DilatedTerm> conjugate_projector_through_measurement(const PauliString &a,
                                                                        int projector_outcome,
                                                                        const PauliString &s,
                                                                        uint32_t reg) {
    double sgn = projector_outcome == 0 ? +1.0 : -1.0;  // P(+-) = (I +- Z)/2
    bool comm = a.commutes_with(s);
    std::vector<DilatedTerm> out;
    if (comm) {
        // (1/2) A (1 x I +- S x Z)
        out.push_back({0.5, DilatedPauli::physical(a), {}});
        auto [as, k] = multiply_with_phase(a, s);
        DilatedPauli second{as, {{reg, 'Z'}}, k};
        out.push_back({0.5 * sgn, second, {}});
    } else {
        // (1/2) A (1 x X -+ i S x Y)
        DilatedPauli first{a, {{reg, 'X'}}, 0};
        out.push_back({0.5, first, {}});
        auto [as, k] = multiply_with_phase(a, s);
        DilatedPauli second{as, {{reg, 'Y'}}, k};
        out.push_back({std::complex<double>(0, -0.5 * sgn), second, {}});
    }
    return out;
}

/// Conjugation of a dilated Pauli through a parity-conditioned gate. For a
/// Pauli-word gate G on registers R the result stays a single Pauli:
///   - physical part commutes with G, register part parity-diagonal on R:
///     unchanged;
///   - anticommutes, parity-diagonal: attach Z~ on R;
///   - commutes, parity-flipping: multiply by G;
///   - anticommutes, parity-flipping: multiply by G and attach Z~ on R.
inline DilatedPauli conjugate_through_conditioned(const DilatedPauli &a,
                                                  const std::vector<uint32_t> &parity_regs,
                                                  const PauliString &gate_pauli) {
    bool flips_parity = false;
    for (auto reg : parity_regs) {
        char c = a.ss_letter(reg);
        if (c == 'X' || c == 'Y') flips_parity = !flips_parity;
    }
    bool comm = a.phys.commutes_with(gate_pauli);
    DilatedPauli r = a;
    if (flips_parity) {
        r.phase4 = (r.phase4 + r.phys.mul_right_phase(gate_pauli)) % 4;
        r.phys.sign = int8_t(r.phys.sign * gate_pauli.sign);
    }
    if (!comm) {
        for (auto reg : parity_regs) {
            char c = r.ss_letter(reg);
            // multiply the register letter by Z~
            switch (c) {
                case 'I': r.set_ss(reg, 'Z'); break;
                case 'Z': r.set_ss(reg, 'I'); break;
                case 'X': r.set_ss(reg, 'Y'); r.phase4 = (r.phase4 + 1) % 4; break;
                case 'Y': r.set_ss(reg, 'X'); r.phase4 = (r.phase4 + 3) % 4; break;
            }
        }
    }
    return r;
}

/// Clifford-gate form of the conditioned conjugation. Requires the gate's
/// conjugation action on the physical part to reproduce +-A; anything else
/// would need a two-term combination and is rejected.
inline DilatedPauli conjugate_through_conditioned_gate(const DilatedPauli &a,
                                                       const std::vector<uint32_t> &parity_regs,
                                                       const Gate &g) {
    for (auto reg : parity_regs) {
        char c = a.ss_letter(reg);
        if (c == 'X' || c == 'Y') {
            throw std::invalid_argument(
                "conditioned non-Pauli gate with a parity-flipping register operator");
        }
    }
    PauliString conj = conjugate_by_clifford(a.phys, g);
    DilatedPauli r = a;
    if (conj.same_support(a.phys) && conj.sign == a.phys.sign) {
        return r;  // commuting action
    }
    if (conj.same_support(a.phys) && conj.sign == -a.phys.sign) {
        for (auto reg : parity_regs) {
            char c = r.ss_letter(reg);
            r.set_ss(reg, c == 'Z' ? 'I' : 'Z');
        }
        return r;
    }
    throw std::invalid_argument("conditioned gate does not act as +-1 on the operator");
}

/// Projector onto a fixed assignment of register outcomes.
struct TrajectoryProjector {
    std::vector<uint8_t> outcomes;  // indexed by register
};

inline TrajectoryProjector trajectory_projector(const Trajectory &traj, size_t n_allocated) {
    if (traj.outcomes.size() > n_allocated) {
        for (size_t r = n_allocated; r < traj.outcomes.size(); r++) {
            if (traj.outcomes[r] != 0) {
                throw std::invalid_argument("nonzero outcome requested on an unallocated register");
            }
        }
    }
    TrajectoryProjector p;
    p.outcomes.assign(traj.outcomes.begin(), traj.outcomes.end());
    p.outcomes.resize(n_allocated, 0);
    return p;
}

/// Expectation of the outcome projector in an explicitly dilated state whose
/// registers live above `n_physical`.
inline double trajectory_probability(const StateVector &dilated, uint32_t n_physical,
                                     const TrajectoryProjector &proj) {
    size_t want = 0, mask = 0;
    for (size_t r = 0; r < proj.outcomes.size(); r++) {
        mask |= size_t{1} << (n_physical + r);
        if (proj.outcomes[r]) want |= size_t{1} << (n_physical + r);
    }
    double p = 0;
    for (size_t i = 0; i < dilated.dim(); i++) {
        if ((i & mask) == want) p += std::norm(dilated.amp(i));
    }
    return p;
}

/// Projects an explicitly dilated state onto a trajectory and renormalizes,
/// returning the probability mass that was kept.
inline double project_onto_trajectory(StateVector &dilated, uint32_t n_physical,
                                      const TrajectoryProjector &proj) {
    size_t want = 0, mask = 0;
    for (size_t r = 0; r < proj.outcomes.size(); r++) {
        mask |= size_t{1} << (n_physical + r);
        if (proj.outcomes[r]) want |= size_t{1} << (n_physical + r);
    }
    double p = 0;
    for (size_t i = 0; i < dilated.dim(); i++) {
        if ((i & mask) == want) {
            p += std::norm(dilated.amp(i));
        } else {
            dilated.amplitudes()[i] = 0;
        }
    }
    dilated.renormalize();
    return p;
}

struct RegionCount {
    int m = 0;       // measurement regions after anchoring the task sites
    int n_obs = 0;   // registers feeding any conditioned gate
    std::vector<std::vector<uint32_t>> regions;  // the counted set, in append order
};

/// Region accounting: walk the measurements in execution order and append
/// each region of support unless it is already present or a proper subset
/// of a counted region. Task sites i and f anchor two regions of their own
/// unless a counted region already contains them. M is the set size minus
/// the two anchors. Our circuits fix measurement locations up front, so one
/// pass covers every trajectory.
inline RegionCount count_regions_outcomes(const DilatedCircuit &circuit, uint32_t task_i,
                                          uint32_t task_f) {
    if (task_i >= circuit.geom.sites() || task_f >= circuit.geom.sites()) {
        throw std::invalid_argument("task sites outside the geometry");
    }
    RegionCount rc;
    std::vector<std::set<uint32_t>> regions;
    auto add_region = [&](const std::vector<uint32_t> &sites) {
        std::set<uint32_t> r(sites.begin(), sites.end());
        for (const auto &have : regions) {
            if (have == r) return;  // duplicate
            if (std::includes(have.begin(), have.end(), r.begin(), r.end()) && r.size() < have.size()) {
                return;  // proper subset of a counted region
            }
        }
        regions.push_back(std::move(r));
    };
    std::set<uint32_t> cond_regs;
    for (const auto &op : circuit.ops) {
        if (auto *m = std::get_if<MeasureOp>(&op)) {
            add_region(m->region);
        } else if (auto *w = std::get_if<WeakMeasureOp>(&op)) {
            add_region(w->region);
        } else if (auto *c = std::get_if<CondOp>(&op)) {
            cond_regs.insert(c->parity_regs.begin(), c->parity_regs.end());
        }
    }
    int anchors = 0;
    auto contains = [&](uint32_t site) {
        for (auto &r : regions) {
            if (r.count(site)) return true;
        }
        return false;
    };
    if (!contains(task_i)) anchors++;
    if (!contains(task_f)) anchors++;
    rc.m = int(regions.size()) + anchors - 2;
    if (rc.m < 0) rc.m = 0;
    rc.n_obs = int(cond_regs.size());
    for (auto &r : regions) rc.regions.emplace_back(r.begin(), r.end());
    return rc;
}

}  // namespace mfsim

#endif
