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

#ifndef MFSIM_PROTOCOLS_HPP
#define MFSIM_PROTOCOLS_HPP

#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfsim/circuit.hpp"

namespace mfsim {

enum class TaskKind { teleport, bell_pair, ghz, w_state, multi_teleport };

inline const char *task_name(TaskKind t) {
    switch (t) {
        case TaskKind::teleport: return "teleport";
        case TaskKind::bell_pair: return "bell_pair";
        case TaskKind::ghz: return "ghz";
        case TaskKind::w_state: return "w_state";
        case TaskKind::multi_teleport: return "multi_teleport";
    }
    return "?";
}

/// Site roles of one measurement region: the measured pad pair (A, B) and
/// the Bell-encoded pair (C, D) it consumes.
struct RegionRoles {
    uint32_t a = 0, b = 0, c = 0, d = 0;
};

struct ProtocolMetadata {
    TaskKind task = TaskKind::teleport;
    std::string name;
    std::string mode;  // w_state: "unitary" or "estp"

    uint32_t in_site = 0, out_site = 0;                       // teleport / bell tasks
    std::vector<std::pair<uint32_t, uint32_t>> lane_sites;    // multi_teleport
    int64_t claimed_distance = 0;

    std::vector<RegionRoles> regions;
    int ell = 0;

    int claimed_m = 0;
    int claimed_nobs = 0;
    int claimed_depth = 0;

    // Offsets under which the protocol family's main-form bound is stated.
    int m0 = 1;
    int t0 = 0;

    // Builder parameters, kept so sabotage transforms can rebuild.
    int m_param = 0, t_param = 0, q_param = 1, ell_param = 0, n_param = 0;
    int stretch_extra = 0;
    bool bell_basis = false;
    bool flip_a = false;

    // Closed-form resource expectations, when the construction has them;
    // the auditor reports disagreements rather than reconciling.
    std::optional<int> formula_m;
    std::optional<int> formula_depth;

    std::vector<std::string> sabotage_tags;
};

struct ProtocolInstance {
    DilatedCircuit circuit;
    ProtocolMetadata metadata;
};

/// Three-qubit teleportation: logical at 0, Bell pair on (1, 2), Bell
/// decode on (0, 1), Z measurements, and the lookup-table correction on 2.
inline ProtocolInstance build_stp() {
    ProtocolInstance inst;
    auto &c = inst.circuit = DilatedCircuit::on_chain(3);
    c.gate(GateKind::H, 1);
    c.gate(GateKind::CNOT, 1, 2);
    c.gate(GateKind::CNOT, 0, 1);
    c.gate(GateKind::H, 0);
    uint32_t ra = c.measure(SparsePauli::single(0, 'Z'), {0, 1});
    uint32_t rb = c.measure(SparsePauli::single(1, 'Z'), {0, 1});
    c.cond_pauli({ra}, SparsePauli::single(2, 'Z'));
    c.cond_pauli({rb}, SparsePauli::single(2, 'X'));

    auto &md = inst.metadata;
    md.task = TaskKind::teleport;
    md.name = "stp";
    md.in_site = 0;
    md.out_site = 2;
    md.claimed_distance = 2;
    md.regions.push_back({0, 1, 1, 2});
    md.claimed_m = 0;  // the measured pair contains the input site, so it anchors it
    md.claimed_nobs = 2;
    md.claimed_depth = 2;
    md.m0 = 1;
    md.t0 = 0;
    md.t_param = 2;
    return inst;
}

struct EstpOptions {
    bool bell_basis = false;  // measure XX/ZZ on the pads instead of decoded Z/Z
    int stretch_extra = 0;    // sabotage: widen regions without extending transport
};

/// Entanglement-swapping teleportation over M repeating regions of size
/// 2(T-1): Bell pairs encoded at the region centers, swap staircases carry
/// them to the pads, Bell decode + Z measurements on the pads, and a parity
/// correction on the final site. M = 0 degenerates to a swap staircase.
inline ProtocolInstance build_estp(int m, int t, EstpOptions opts = {}) {
    if (m < 0 || t < 3) {
        throw std::invalid_argument("estp needs M >= 0 and T >= 3");
    }
    const int e = opts.stretch_extra;
    if (e < 0 || (e > 0 && m == 0)) {
        throw std::invalid_argument("stretch_regions needs at least one region");
    }
    const int ell = 2 * (t - 1) + 2 * e;
    const uint32_t n = uint32_t((t - 1) + m * ell + 1);
    ProtocolInstance inst;
    auto &c = inst.circuit = DilatedCircuit::on_chain(n);
    auto &md = inst.metadata;

    if (m == 0) {
        // Measurement-free limit: a staircase moving site 0 to site T-1.
        for (int j = 0; j + 1 < t; j++) {
            c.gate(GateKind::SWAP, uint32_t(j), uint32_t(j + 1));
        }
        md.t0 = 0;  // staircase saturates D <= v T at its measured depth
    } else {
        std::vector<uint32_t> apad(m + 1), bpad(m + 1), cenc(m + 1), denc(m + 1);
        for (int s = 1; s <= m; s++) {
            uint32_t base = uint32_t((t - 1) + (s - 1) * ell);
            bpad[s] = base;
            cenc[s] = base + uint32_t(ell / 2 - 1);
            denc[s] = cenc[s] + 1;
            apad[s] = (s == 1) ? uint32_t(t - 2) : uint32_t(base - 1);
        }
        uint32_t final_site = n - 1;
        // Bell encode at region centers.
        for (int s = 1; s <= m; s++) {
            c.gate(GateKind::H, cenc[s]);
            c.gate(GateKind::CNOT, cenc[s], denc[s]);
        }
        // Logical staircase 0 -> T-2 runs alongside the encode layer.
        for (int j = 0; j + 2 < t; j++) {
            c.gate(GateKind::SWAP, uint32_t(j), uint32_t(j + 1));
        }
        // Transport staircases, T-2 layers regardless of stretching.
        for (int step = 1; step <= t - 2; step++) {
            for (int s = 1; s <= m; s++) {
                c.gate(GateKind::SWAP, cenc[s] - uint32_t(step - 1), cenc[s] - uint32_t(step));
                c.gate(GateKind::SWAP, denc[s] + uint32_t(step - 1), denc[s] + uint32_t(step));
            }
        }
        // Pad decode plus the far-right edge swap that lands the last Bell
        // half on the final site, all in one layer.
        if (!opts.bell_basis) {
            for (int s = 1; s <= m; s++) {
                c.gate(GateKind::CNOT, apad[s], bpad[s]);
                c.gate(GateKind::H, apad[s]);
            }
        }
        c.gate(GateKind::SWAP, n - 2, n - 1);
        std::vector<uint32_t> a_regs, b_regs;
        for (int s = 1; s <= m; s++) {
            std::vector<uint32_t> region{apad[s], bpad[s]};
            if (!opts.bell_basis) {
                a_regs.push_back(c.measure(SparsePauli::single(apad[s], 'Z'), region));
                b_regs.push_back(c.measure(SparsePauli::single(bpad[s], 'Z'), region));
            } else {
                a_regs.push_back(c.measure(
                    SparsePauli{{{apad[s], 'X'}, {bpad[s], 'X'}}, +1}, region));
                b_regs.push_back(c.measure(
                    SparsePauli{{{apad[s], 'Z'}, {bpad[s], 'Z'}}, +1}, region));
            }
        }
        c.cond_pauli(a_regs, SparsePauli::single(final_site, 'Z'));
        c.cond_pauli(b_regs, SparsePauli::single(final_site, 'X'));
        for (int s = 1; s <= m; s++) {
            md.regions.push_back({apad[s], bpad[s], cenc[s], denc[s]});
        }
        md.t0 = -1;
    }

    md.task = TaskKind::teleport;
    md.name = "estp";
    md.in_site = 0;
    md.out_site = n - 1;
    md.claimed_distance = int64_t(n) - 1;
    md.ell = ell;
    md.claimed_m = m;
    md.claimed_nobs = 2 * m;
    md.claimed_depth = (m == 0) ? t - 1 : t;
    md.m0 = 1;
    md.m_param = m;
    md.ell_param = ell;
    md.t_param = t;
    md.bell_basis = opts.bell_basis;
    md.stretch_extra = e;
    if (e > 0) md.sabotage_tags.push_back("stretch_regions");
    return inst;
}

/// Bell pair distillation: the ESTP with the leftmost block removed. M+1
/// encode regions feed M measured pads; the distilled pair lands on sites
/// (0, N-1) with N = 2(M+1)(T-1) + 2. flip_a inverts the sign convention of
/// the A-outcome correction, selecting a different Bell state.
inline ProtocolInstance build_bell_distill(int m, int t, bool flip_a = false) {
    if (m < 0 || t < 3) {
        throw std::invalid_argument("bell distillation needs M >= 0 and T >= 3");
    }
    const int ell = 2 * (t - 1);
    const uint32_t n = uint32_t((m + 1) * ell + 2);
    ProtocolInstance inst;
    auto &c = inst.circuit = DilatedCircuit::on_chain(n);
    auto &md = inst.metadata;

    std::vector<uint32_t> start(m + 2), cenc(m + 2), denc(m + 2);
    for (int r = 1; r <= m + 1; r++) {
        start[r] = uint32_t(1 + (r - 1) * ell);
        cenc[r] = start[r] + uint32_t(t - 2);
        denc[r] = cenc[r] + 1;
    }
    for (int r = 1; r <= m + 1; r++) {
        c.gate(GateKind::H, cenc[r]);
        c.gate(GateKind::CNOT, cenc[r], denc[r]);
    }
    for (int step = 1; step <= t - 2; step++) {
        for (int r = 1; r <= m + 1; r++) {
            c.gate(GateKind::SWAP, cenc[r] - uint32_t(step - 1), cenc[r] - uint32_t(step));
            c.gate(GateKind::SWAP, denc[r] + uint32_t(step - 1), denc[r] + uint32_t(step));
        }
    }
    // Decode layer with the two edge swaps run in parallel.
    c.gate(GateKind::SWAP, 1, 0);
    c.gate(GateKind::SWAP, n - 2, n - 1);
    for (int r = 2; r <= m + 1; r++) {
        uint32_t a = start[r] - 1, b = start[r];
        c.gate(GateKind::CNOT, a, b);
        c.gate(GateKind::H, a);
    }
    std::vector<uint32_t> a_regs, b_regs;
    for (int r = 2; r <= m + 1; r++) {
        uint32_t a = start[r] - 1, b = start[r];
        a_regs.push_back(c.measure(SparsePauli::single(a, 'Z'), {a, b}));
        b_regs.push_back(c.measure(SparsePauli::single(b, 'Z'), {a, b}));
        md.regions.push_back({a, b, cenc[r], denc[r]});
    }
    if (m > 0) {
        c.cond_pauli(a_regs, SparsePauli::single(n - 1, 'Z'));
        c.cond_pauli(b_regs, SparsePauli::single(n - 1, 'X'));
    }
    if (flip_a) {
        c.gate(GateKind::Z, n - 1);
    }

    md.task = TaskKind::bell_pair;
    md.name = "bell_distill";
    md.in_site = 0;
    md.out_site = n - 1;
    md.claimed_distance = int64_t(n) - 1;
    md.ell = ell;
    md.claimed_m = m;
    md.claimed_nobs = 2 * m;
    md.claimed_depth = t;
    md.m0 = 2;   // D <= 2(M+1)(T-1)+1 is main's form with M0 = 2, T0 = -1, +1 edge
    md.t0 = -1;
    md.m_param = m;
    md.t_param = t;
    md.ell_param = ell;
    md.flip_a = flip_a;
    return inst;
}

/// 1D GHZ preparation on (M+1) patches of even size ell: Bell-encode the
/// central pair of each patch, grow outward with CNOTs, then merge patches
/// with a boundary CNOT, a Z measurement, an outcome-conditioned X on the
/// downstream patch (cumulative parity), a reset, and the boundary CNOT
/// again.
inline ProtocolInstance build_ghz_1d(int m, int ell) {
    if (m < 0 || ell < 2 || ell % 2 != 0) {
        throw std::invalid_argument("ghz needs M >= 0 and even ell >= 2");
    }
    const uint32_t n = uint32_t((m + 1) * ell);
    ProtocolInstance inst;
    auto &c = inst.circuit = DilatedCircuit::on_chain(n);
    auto &md = inst.metadata;

    for (int p = 0; p <= m; p++) {
        uint32_t left = uint32_t(p * ell + ell / 2 - 1);
        c.gate(GateKind::H, left);
        c.gate(GateKind::CNOT, left, left + 1);
    }
    for (int g = 1; g <= ell / 2 - 1; g++) {
        for (int p = 0; p <= m; p++) {
            uint32_t cl = uint32_t(p * ell + ell / 2 - 1);
            c.gate(GateKind::CNOT, cl - uint32_t(g - 1), cl - uint32_t(g));
            c.gate(GateKind::CNOT, cl + uint32_t(g), cl + uint32_t(g + 1));
        }
    }
    std::vector<uint32_t> regs;
    for (int p = 0; p + 1 <= m; p++) {
        uint32_t u = uint32_t((p + 1) * ell - 1), w = u + 1;
        c.gate(GateKind::CNOT, u, w);
    }
    for (int p = 0; p + 1 <= m; p++) {
        uint32_t w = uint32_t((p + 1) * ell);
        regs.push_back(c.measure(SparsePauli::single(w, 'Z'), {w}));
    }
    for (int p = 0; p + 1 <= m; p++) {
        uint32_t w = uint32_t((p + 1) * ell);
        // Downstream patch follows the cumulative boundary parity; the
        // measured qubit resets to |0> from its own outcome alone.
        std::vector<uint32_t> cumulative(regs.begin(), regs.begin() + p + 1);
        SparsePauli patch_x;
        for (int q = 1; q < ell; q++) {
            patch_x.terms.push_back({w + uint32_t(q), 'X'});
        }
        c.cond_pauli(cumulative, patch_x);
        c.cond_pauli({regs[p]}, SparsePauli::single(w, 'X'));
    }
    for (int p = 0; p + 1 <= m; p++) {
        uint32_t u = uint32_t((p + 1) * ell - 1), w = u + 1;
        c.gate(GateKind::CNOT, u, w);
    }

    md.task = TaskKind::ghz;
    md.name = "ghz_1d";
    md.in_site = 0;
    md.out_site = n - 1;
    md.claimed_distance = int64_t(n) - 1;
    md.ell = ell;
    md.claimed_m = m;
    md.claimed_nobs = m;
    md.claimed_depth = (m == 0) ? ell / 2 : ell / 2 + 2;
    md.m0 = 2;
    md.t0 = 0;
    md.m_param = m;
    md.ell_param = ell;
    return inst;
}

enum class WMode { unitary, estp };

namespace wdetail {

struct GarbagePair {
    uint32_t u, v;      // measured pair, u the inner (control) site
    uint32_t rx, rz;    // XX and ZZ outcome registers
};

}  // namespace wdetail

/// W state on N = 2^n chain sites by n doubling rounds: each participant
/// spawns a partner through the two-gate doubling primitive (CH then CNOT
/// back), and the new partners spread outward by 2^(n-k)-1 sites, either by
/// swap staircases (unitary mode) or through chained Bell pairs measured in
/// the Bell basis (estp mode, middle rounds only). Measured pairs are
/// decoded back to |00> at the start of the next round so their sites can
/// be reused.
inline ProtocolInstance build_w_state(int n_log, WMode mode) {
    if (n_log < 1) {
        throw std::invalid_argument("w state needs n >= 1");
    }
    const uint32_t n = uint32_t{1} << n_log;
    ProtocolInstance inst;
    auto &c = inst.circuit = DilatedCircuit::on_chain(n);
    auto &md = inst.metadata;

    // Round 1: a two-site W (a Bell pair with one excitation) at the center.
    uint32_t cl = n / 2 - 1, cr = n / 2;
    c.gate(GateKind::H, cl);
    c.gate(GateKind::CNOT, cl, cr);
    c.gate(GateKind::X, cl);

    std::vector<uint32_t> participants{cl, cr};
    std::vector<wdetail::GarbagePair> garbage;

    for (int k = 2; k <= n_log; k++) {
        const int d = (1 << (n_log - k)) - 1;
        const bool teleport_round = mode == WMode::estp && k >= 2 && k <= n_log - 2 && d >= 3;
        // Reset the previous round's measured pairs before their sites are
        // reused: Bell decode back to the computational basis, then
        // outcome-conditioned bit flips.
        for (const auto &g : garbage) {
            c.gate(GateKind::CNOT, g.u, g.v);
            c.gate(GateKind::H, g.u);
            c.cond_pauli({g.rx}, SparsePauli::single(g.u, 'X'));
            c.cond_pauli({g.rz}, SparsePauli::single(g.v, 'X'));
        }
        garbage.clear();

        // Doubling gates: CH(parent -> child), CNOT(child -> parent).
        std::vector<std::pair<uint32_t, int>> children;  // (spawn site, direction)
        for (uint32_t a : participants) {
            int dir = (a < n / 2) ? -1 : +1;
            uint32_t b = uint32_t(int64_t(a) + dir);
            c.gate(GateKind::CH, a, b);
            children.push_back({b, dir});
        }
        for (auto [b, dir] : children) {
            uint32_t a = uint32_t(int64_t(b) - dir);
            c.gate(GateKind::CNOT, b, a);
        }

        std::vector<uint32_t> new_positions;
        if (!teleport_round) {
            for (int step = 1; step <= d; step++) {
                for (auto [b, dir] : children) {
                    uint32_t from = uint32_t(int64_t(b) + int64_t(dir) * (step - 1));
                    uint32_t to = uint32_t(int64_t(from) + dir);
                    c.gate(GateKind::SWAP, from, to);
                }
            }
            for (auto [b, dir] : children) {
                new_positions.push_back(uint32_t(int64_t(b) + int64_t(dir) * d));
            }
        } else {
            // d odd: one swap, then (d-1)/2 Bell-pair hops per child.
            const int q = (d - 1) / 2;
            for (auto [b, dir] : children) {
                uint32_t p0 = uint32_t(int64_t(b) + dir);
                for (int i = 1; i <= q; i++) {
                    uint32_t e = uint32_t(int64_t(p0) + dir * (2 * i - 1));
                    uint32_t f = uint32_t(int64_t(p0) + dir * (2 * i));
                    c.gate(GateKind::H, e);
                    c.gate(GateKind::CNOT, e, f);
                }
            }
            for (auto [b, dir] : children) {
                c.gate(GateKind::SWAP, b, uint32_t(int64_t(b) + dir));
            }
            for (auto [b, dir] : children) {
                uint32_t p0 = uint32_t(int64_t(b) + dir);
                uint32_t target = uint32_t(int64_t(b) + int64_t(dir) * d);
                std::vector<uint32_t> xx_regs, zz_regs;
                for (int i = 1; i <= q; i++) {
                    uint32_t u = uint32_t(int64_t(p0) + dir * (2 * i - 2));
                    uint32_t v = uint32_t(int64_t(p0) + dir * (2 * i - 1));
                    std::vector<uint32_t> region{std::min(u, v), std::max(u, v)};
                    uint32_t rx = c.measure(SparsePauli{{{std::min(u, v), 'X'}, {std::max(u, v), 'X'}}, +1}, region);
                    uint32_t rz = c.measure(SparsePauli{{{std::min(u, v), 'Z'}, {std::max(u, v), 'Z'}}, +1}, region);
                    xx_regs.push_back(rx);
                    zz_regs.push_back(rz);
                    garbage.push_back({u, v, rx, rz});
                }
                c.cond_pauli(xx_regs, SparsePauli::single(target, 'Z'));
                c.cond_pauli(zz_regs, SparsePauli::single(target, 'X'));
                new_positions.push_back(target);
            }
        }
        for (auto p : new_positions) participants.push_back(p);
        std::sort(participants.begin(), participants.end());
    }
    // Any garbage from a final teleport round would be left unreset, but
    // teleport rounds stop at n-2 and the last two rounds are unitary.
    assert(garbage.empty());
    assert(participants.size() == n);

    md.task = TaskKind::w_state;
    md.name = "w_state";
    md.mode = mode == WMode::unitary ? "unitary" : "estp";
    md.in_site = 0;
    md.out_site = n - 1;
    md.claimed_distance = int64_t(n) - 1;
    md.claimed_depth = c.depth();
    md.claimed_m = 0;
    md.claimed_nobs = int(c.n_registers());
    md.n_param = n_log;
    md.m0 = 2;
    md.t0 = 0;
    if (mode == WMode::unitary) {
        md.formula_depth = int(n / 2) + n_log - 1;
    } else {
        md.formula_depth = 3 * n_log - 3;
        md.formula_m = int(n / 2) - 2 * n_log + 2;
    }
    return inst;
}

/// Q parallel ESTP lanes on a Q-row grid. With share_measurement, every
/// lane's corrections read lane 0's outcomes; the other lanes' measurements
/// still happen but their outcomes go unused.
inline ProtocolInstance build_multiqubit_estp(int q, int m, int t, bool share_measurement = false) {
    if (q < 1) {
        throw std::invalid_argument("multiqubit estp needs Q >= 1");
    }
    if (share_measurement && q != 2) {
        throw std::invalid_argument("share_measurement is defined for Q = 2");
    }
    ProtocolInstance lane0 = build_estp(m, t);
    const uint32_t ncol = lane0.circuit.n_physical;
    ProtocolInstance inst;
    inst.circuit = DilatedCircuit::on_grid(uint32_t(q), ncol);
    auto &c = inst.circuit;
    auto &md = inst.metadata;

    uint32_t regs_per_lane = uint32_t(lane0.circuit.n_registers());
    for (int lane = 0; lane < q; lane++) {
        uint32_t site_off = uint32_t(lane) * ncol;
        uint32_t reg_off = uint32_t(lane) * regs_per_lane;
        for (const auto &op : lane0.circuit.ops) {
            if (auto *g = std::get_if<GateOp>(&op)) {
                Gate gg = g->gate;
                gg.q0 += site_off;
                if (gg.two_site()) gg.q1 += site_off;
                c.ops.push_back(GateOp{gg});
            } else if (auto *mo = std::get_if<MeasureOp>(&op)) {
                MeasureOp mm = *mo;
                for (auto &[site, letter] : mm.obs.terms) site += site_off;
                for (auto &site : mm.region) site += site_off;
                mm.reg += reg_off;
                c.ops.push_back(mm);
            } else if (auto *co = std::get_if<CondOp>(&op)) {
                CondOp cc = *co;
                for (auto &[site, letter] : cc.pauli.terms) site += site_off;
                uint32_t feed_off = share_measurement ? 0 : reg_off;
                for (auto &r : cc.parity_regs) r += feed_off;
                c.ops.push_back(cc);
            }
        }
        md.lane_sites.push_back({site_off, site_off + ncol - 1});
        for (auto roles : lane0.metadata.regions) {
            md.regions.push_back(
                {roles.a + site_off, roles.b + site_off, roles.c + site_off, roles.d + site_off});
        }
    }
    // Interleave nothing: lanes are sequential in op order but disjoint in
    // sites, so the depth matches a single lane.
    md.task = TaskKind::multi_teleport;
    md.name = "multiq_estp";
    md.claimed_distance = int64_t(ncol) - 1;
    md.ell = lane0.metadata.ell;
    md.claimed_m = q * m;
    md.claimed_nobs = share_measurement ? 2 * m : q * 2 * m;
    md.claimed_depth = lane0.metadata.claimed_depth;
    md.m0 = 1;
    md.t0 = lane0.metadata.t0;
    md.m_param = m;
    md.t_param = t;
    md.q_param = q;
    if (share_measurement) md.sabotage_tags.push_back("share_measurement");
    return inst;
}

enum class Sabotage { strip_feedback, stretch_regions, share_measurement };

/// Negative-control transforms. strip_feedback deletes every conditioned
/// gate; stretch_regions rebuilds the instance with regions widened beyond
/// what the transport layers can span; share_measurement rebuilds a Q = 2
/// instance with both lanes reading one lane's outcomes.
inline ProtocolInstance sabotage(const ProtocolInstance &inst, Sabotage transform, int extra = 1) {
    switch (transform) {
        case Sabotage::strip_feedback: {
            ProtocolInstance out = inst;
            std::vector<Op> kept;
            for (const auto &op : out.circuit.ops) {
                if (!std::holds_alternative<CondOp>(op)) kept.push_back(op);
            }
            out.circuit.ops = std::move(kept);
            out.metadata.sabotage_tags.push_back("strip_feedback");
            out.metadata.claimed_nobs = 0;
            return out;
        }
        case Sabotage::stretch_regions: {
            if (inst.metadata.name != "estp") {
                throw std::invalid_argument("stretch_regions applies to estp instances");
            }
            EstpOptions opts;
            opts.bell_basis = inst.metadata.bell_basis;
            opts.stretch_extra = extra;
            return build_estp(inst.metadata.m_param, inst.metadata.t_param, opts);
        }
        case Sabotage::share_measurement: {
            if (inst.metadata.name != "multiq_estp") {
                throw std::invalid_argument("share_measurement applies to multiq_estp instances");
            }
            return build_multiqubit_estp(inst.metadata.q_param, inst.metadata.m_param,
                                         inst.metadata.t_param, true);
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace mfsim

#endif
