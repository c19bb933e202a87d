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

#include <catch2/catch_amalgamated.hpp>

#include "mfsim/protocols.hpp"
#include "mfsim/sim_dense.hpp"
#include "support/dense_reference.hpp"

using namespace mfsim;

namespace {

StateVector amplitude_state(std::vector<cplx> amps) {
    size_t n = 0;
    while ((size_t{1} << n) < amps.size()) n++;
    StateVector s(n);
    s.amplitudes() = std::move(amps);
    return s;
}

}  // namespace

TEST_CASE("bell circuit", "[sim_dense]") {
    auto c = DilatedCircuit::on_chain(2);
    c.gate(GateKind::H, 0);
    c.gate(GateKind::CNOT, 0, 1);
    OutcomeSource src(0);
    auto out = apply_circuit(c, StateVector(2), DenseMode::trajectory, src);
    const double r = 1.0 / std::sqrt(2.0);
    REQUIRE(std::abs(out.state.amp(0b00) - cplx(r, 0)) < 1e-12);
    REQUIRE(std::abs(out.state.amp(0b11) - cplx(r, 0)) < 1e-12);
}

TEST_CASE("explicit Z measurements on a Bell pair entangle the registers", "[sim_dense][dilation]") {
    auto c = DilatedCircuit::on_chain(2);
    c.gate(GateKind::H, 0);
    c.gate(GateKind::CNOT, 0, 1);
    c.measure(SparsePauli::single(0, 'Z'));
    c.measure(SparsePauli::single(1, 'Z'));
    OutcomeSource src(0);
    auto out = apply_circuit(c, StateVector(2), DenseMode::explicit_dilation, src);
    // (|00,00> + |11,11>)/sqrt(2), registers on the high bits
    const double r = 1.0 / std::sqrt(2.0);
    REQUIRE(out.state.n_qubits() == 4);
    REQUIRE(std::abs(out.state.amp(0b0000) - cplx(r, 0)) < 1e-12);
    REQUIRE(std::abs(out.state.amp(0b1111) - cplx(r, 0)) < 1e-12);
    double rest = 0;
    for (size_t i = 0; i < 16; i++) {
        if (i != 0 && i != 15) rest += std::norm(out.state.amp(i));
    }
    REQUIRE(rest < 1e-24);
}

TEST_CASE("measurement in the state's own eigenbasis leaves amplitudes intact",
          "[sim_dense][dilation]") {
    // The Bell pair written in the Z (x) X basis: rotate qubit 1 by H, then
    // both measurement channels act as CNOTs onto the registers and each
    // basis amplitude just gets tagged.
    auto c = DilatedCircuit::on_chain(2);
    c.gate(GateKind::H, 0);
    c.gate(GateKind::CNOT, 0, 1);
    c.gate(GateKind::H, 1);  // to the measurement basis
    c.measure(SparsePauli::single(0, 'Z'));
    c.measure(SparsePauli::single(1, 'Z'));
    OutcomeSource src(0);
    auto out = apply_circuit(c, StateVector(2), DenseMode::explicit_dilation, src);
    // Pre-measurement amplitudes (|00>+|01>+|10>-|11>)/2 reappear on the
    // diagonal |b, b> of the dilated state.
    for (size_t b = 0; b < 4; b++) {
        double want = (b == 3) ? -0.5 : 0.5;
        REQUIRE(std::abs(out.state.amp(b | (b << 2)) - cplx(want, 0)) < 1e-12);
    }
    // Single-qubit reduced states are untouched by the tagging.
    auto before = DilatedCircuit::on_chain(2);
    before.gate(GateKind::H, 0);
    before.gate(GateKind::CNOT, 0, 1);
    before.gate(GateKind::H, 1);
    OutcomeSource src2(0);
    auto pre = apply_circuit(before, StateVector(2), DenseMode::trajectory, src2);
    for (uint32_t q = 0; q < 2; q++) {
        auto a = reduced_density(pre.state, {q});
        auto b = reduced_density(out.state, {q});
        for (size_t i = 0; i < 4; i++) {
            REQUIRE(std::abs(a.matrix[i] - b.matrix[i]) < 1e-12);
        }
    }
}

TEST_CASE("trajectory projector on the measured Bell pair", "[sim_dense][dilation]") {
    auto c = DilatedCircuit::on_chain(2);
    c.gate(GateKind::H, 0);
    c.gate(GateKind::CNOT, 0, 1);
    c.measure(SparsePauli::single(0, 'Z'));
    c.measure(SparsePauli::single(1, 'Z'));
    OutcomeSource src(0);
    auto out = apply_circuit(c, StateVector(2), DenseMode::explicit_dilation, src);

    Trajectory tr;
    tr.outcomes = {0, 0};
    auto proj = trajectory_projector(tr, 2);
    REQUIRE(std::abs(trajectory_probability(out.state, 2, proj) - 0.5) < 1e-12);
    StateVector projected = out.state;
    double kept = project_onto_trajectory(projected, 2, proj);
    REQUIRE(std::abs(kept - 0.5) < 1e-12);
    REQUIRE(std::abs(projected.amp(0b0000) - cplx(1, 0)) < 1e-12);

    // all-zeros before any measurement has probability 1
    StateVector fresh(3);
    Trajectory none;
    REQUIRE(std::abs(trajectory_probability(fresh, 3, trajectory_projector(none, 0)) - 1.0) <
            1e-12);

    // nonzero outcome on an unallocated register is rejected
    Trajectory bad;
    bad.outcomes = {0, 0, 1};
    REQUIRE_THROWS_AS(trajectory_projector(bad, 2), std::invalid_argument);
}

TEST_CASE("explicit dilation matches trajectory mode after projection", "[sim_dense][dilation]") {
    auto inst = build_stp();
    DilatedCircuit prepped = inst.circuit;
    std::vector<Op> ops{GateOp{Gate{GateKind::H, 0, 0}}, GateOp{Gate{GateKind::S, 0, 0}}};
    ops.insert(ops.end(), inst.circuit.ops.begin(), inst.circuit.ops.end());
    prepped.ops = std::move(ops);

    OutcomeSource dsrc(0);
    auto dilated = apply_circuit(prepped, StateVector(3), DenseMode::explicit_dilation, dsrc);
    auto records = enumerate_dense(prepped, StateVector(3), 64);
    REQUIRE(records.size() == 4);
    double total = 0;
    for (const auto &rec : records) {
        total += rec.trajectory.probability;
        auto proj = trajectory_projector(rec.trajectory, 2);
        StateVector cut = dilated.state;
        double p = project_onto_trajectory(cut, 3, proj);
        REQUIRE(std::abs(p - rec.trajectory.probability) < 1e-12);
        // the projected dilated state equals the trajectory state on the
        // physical factor (registers are pinned to the outcome pattern)
        StateVector target = rec.state;
        REQUIRE(std::abs(fidelity(cut, target) - 1.0) < 1e-12);
    }
    REQUIRE(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("outcome-averaged density equals the dilated partial trace", "[sim_dense][dilation]") {
    auto inst = build_stp();
    DilatedCircuit prepped = inst.circuit;
    std::vector<Op> ops{GateOp{Gate{GateKind::H, 0, 0}}};
    ops.insert(ops.end(), inst.circuit.ops.begin(), inst.circuit.ops.end());
    prepped.ops = std::move(ops);

    OutcomeSource dsrc(0);
    auto dilated = apply_circuit(prepped, StateVector(3), DenseMode::explicit_dilation, dsrc);
    auto rho_ss = reduced_density(dilated.state, {0, 1, 2});
    auto records = enumerate_dense(prepped, StateVector(3), 64);
    std::vector<cplx> avg(64, cplx(0, 0));
    for (const auto &rec : records) {
        auto rho = reduced_density(rec.state, {0, 1, 2});
        for (size_t i = 0; i < avg.size(); i++) {
            avg[i] += rec.trajectory.probability * rho.matrix[i];
        }
    }
    for (size_t i = 0; i < avg.size(); i++) {
        REQUIRE(std::abs(avg[i] - rho_ss.matrix[i]) < 1e-12);
    }
}

TEST_CASE("measurement unitary is Hermitian and involutory", "[sim_dense][dilation]") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; trial++) {
        auto c = DilatedCircuit::on_chain(3);
        for (int i = 0; i < 6; i++) {
            c.gate(mfref::random_clifford_gate(rng, 3).kind, uint32_t(rng() % 3));
        }
        auto obs = mfref::random_pauli(rng, 3, false);
        if (obs.is_identity()) continue;
        StateVector psi(4, rng() % 8);  // 3 physical + 1 register, random basis state
        StateVector twice = psi;
        auto wide = obs;
        wide = PauliString(4);
        for (uint32_t q = 0; q < 3; q++) wide.set_letter(q, obs.letter_at(q));
        twice.apply_measure_unitary(wide, 3);
        twice.apply_measure_unitary(wide, 3);
        for (size_t i = 0; i < psi.dim(); i++) {
            REQUIRE(std::abs(twice.amp(i) - psi.amp(i)) < 1e-12);
        }
    }
}

TEST_CASE("commuting measurement channels commute", "[sim_dense][dilation]") {
    // U_A then U_B equals U_B then U_A on any state, for commuting
    // observables writing to distinct registers.
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; trial++) {
        auto pa = mfref::random_pauli(rng, 2, false);
        auto pb = mfref::random_pauli(rng, 2, false);
        if (pa.is_identity() || pb.is_identity() || !commutes(pa, pb)) continue;
        PauliString wa(4), wb(4);
        for (uint32_t q = 0; q < 2; q++) {
            wa.set_letter(q, pa.letter_at(q));
            wb.set_letter(q, pb.letter_at(q));
        }
        StateVector psi(4);
        psi.apply_gate(Gate{GateKind::H, 0, 0});
        psi.apply_gate(Gate{GateKind::CNOT, 0, 1});
        psi.apply_gate(Gate{GateKind::S, 1, 0});
        StateVector ab = psi, ba = psi;
        ab.apply_measure_unitary(wa, 2);
        ab.apply_measure_unitary(wb, 3);
        ba.apply_measure_unitary(wb, 3);
        ba.apply_measure_unitary(wa, 2);
        for (size_t i = 0; i < ab.dim(); i++) {
            REQUIRE(std::abs(ab.amp(i) - ba.amp(i)) < 1e-12);
        }
    }
}

TEST_CASE("weak measurement limits", "[sim_dense][dilation]") {
    const double pi = std::acos(-1.0);

    SECTION("alpha = 0 is the identity channel") {
        StateVector psi(2);
        psi.apply_gate(Gate{GateKind::H, 0, 0});
        StateVector out = psi;
        out.apply_weak_unitary(PauliString::single(2, 0, 'Z'), 1, 0.0);
        for (size_t i = 0; i < psi.dim(); i++) {
            REQUIRE(std::abs(out.amp(i) - psi.amp(i)) < 1e-12);
        }
    }

    SECTION("alpha = pi/2 on |1> flips the register with phase i") {
        StateVector psi(2, 0b01);  // qubit 0 = |1>, register qubit 1 = |0>
        psi.apply_weak_unitary(PauliString::single(2, 0, 'Z'), 1, pi / 2);
        REQUIRE(std::abs(psi.amp(0b11) - cplx(0, 1)) < 1e-12);
    }

    SECTION("alpha = pi/4 leaves a register superposition") {
        StateVector psi(2, 0b01);
        psi.apply_weak_unitary(PauliString::single(2, 0, 'Z'), 1, pi / 4);
        REQUIRE(std::abs(psi.amp(0b01) - cplx(std::cos(pi / 4), 0)) < 1e-12);
        REQUIRE(std::abs(psi.amp(0b11) - cplx(0, std::sin(pi / 4))) < 1e-12);
    }

    SECTION("angle validation") {
        REQUIRE_THROWS_AS(weak_measurement_unitary(PauliString::single(1, 0, 'Z'), 0, -0.1),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(weak_measurement_unitary(PauliString::single(1, 0, 'Z'), 0, 2.0),
                          std::invalid_argument);
    }

    SECTION("weak trajectory branches agree with the dilated state") {
        auto c = DilatedCircuit::on_chain(1);
        c.gate(GateKind::H, 0);
        c.weak_measure(SparsePauli::single(0, 'Z'), pi / 3);
        auto records = enumerate_dense(c, StateVector(1), 8);
        REQUIRE(records.size() == 2);
        OutcomeSource src(0);
        auto dilated = apply_circuit(c, StateVector(1), DenseMode::explicit_dilation, src);
        double total = 0;
        for (const auto &rec : records) {
            auto proj = trajectory_projector(rec.trajectory, 1);
            StateVector cut = dilated.state;
            double p = project_onto_trajectory(cut, 1, proj);
            REQUIRE(std::abs(p - rec.trajectory.probability) < 1e-12);
            REQUIRE(std::abs(fidelity(cut, rec.state) - 1.0) < 1e-12);
            total += p;
        }
        REQUIRE(std::abs(total - 1.0) < 1e-12);
    }
}

TEST_CASE("fidelity and reduced density basics", "[sim_dense]") {
    StateVector bell(2);
    bell.apply_gate(Gate{GateKind::H, 0, 0});
    bell.apply_gate(Gate{GateKind::CNOT, 0, 1});
    REQUIRE(std::abs(fidelity(bell, bell) - 1.0) < 1e-12);
    auto rho = reduced_density(bell, {0});
    REQUIRE(std::abs(rho.at(0, 0) - cplx(0.5, 0)) < 1e-12);
    REQUIRE(std::abs(rho.at(1, 1) - cplx(0.5, 0)) < 1e-12);
    REQUIRE(std::abs(rho.at(0, 1)) < 1e-12);
    REQUIRE_THROWS_AS(fidelity(bell, StateVector(3)), std::invalid_argument);
}

TEST_CASE("correlations", "[sim_dense]") {
    SECTION("product state has no connected correlations") {
        StateVector s(3);
        s.apply_gate(Gate{GateKind::H, 0, 0});
        const char axes[3] = {'X', 'Y', 'Z'};
        for (char a : axes) {
            for (char b : axes) {
                REQUIRE(std::abs(connected_correlation(s, 0, 2, a, b)) < 1e-12);
            }
        }
    }

    SECTION("GHZ has unit ZZ correlation") {
        StateVector s(4);
        s.apply_gate(Gate{GateKind::H, 0, 0});
        for (uint32_t q = 0; q + 1 < 4; q++) s.apply_gate(Gate{GateKind::CNOT, q, q + 1});
        REQUIRE(std::abs(connected_correlation(s, 0, 3, 'Z', 'Z') - 1.0) < 1e-12);
        auto r = correlation(s, 1.0, 0, 3, 'Z', 'Z');
        REQUIRE(std::abs(r.connected - 1.0) < 1e-12);
        REQUIRE_THROWS_AS(correlation(s, 0.0, 0, 3), std::invalid_argument);
    }

    SECTION("W state XX correlation is 2/N") {
        const uint32_t n = 4;
        std::vector<cplx> amps(16, cplx(0, 0));
        for (uint32_t j = 0; j < n; j++) amps[size_t{1} << j] = 0.5;
        auto w = amplitude_state(std::move(amps));
        REQUIRE(std::abs(connected_correlation(w, 0, 3, 'X', 'X') - 0.5) < 1e-12);
        auto scan = correlation(w, 1.0, 0, 3, 'Z', 'Z', true);
        REQUIRE(std::abs(std::abs(scan.connected) - 0.5) < 1e-9);
    }
}

TEST_CASE("squeezing statistics", "[sim_dense]") {
    SECTION("|0...0> is at the standard quantum limit") {
        StateVector s(4);
        auto st = squeezing_stats(s);
        REQUIRE(!st.degenerate_axis);
        REQUIRE(std::abs(st.mean_spin[2] - 2.0) < 1e-12);
        REQUIRE(std::abs(st.variance[0] - 1.0) < 1e-12);  // N/4
        REQUIRE(std::abs(st.variance[1] - 1.0) < 1e-12);
        REQUIRE(std::abs(st.xi2 - 1.0) < 1e-12);
    }

    SECTION("single qubit") {
        StateVector s(1);
        auto st = squeezing_stats(s);
        REQUIRE(std::abs(st.xi2 - 1.0) < 1e-12);
    }

    SECTION("one-axis twisting squeezes") {
        // exp(-i chi Sz^2) |+...+> at chi = pi/8 on four qubits, checked
        // against a brute-force oracle built from explicit 16x16 collective
        // spin matrices with a scanned transverse minimization.
        const uint32_t n = 4;
        const double chi = std::acos(-1.0) / 8;
        StateVector s(n);
        for (uint32_t q = 0; q < n; q++) s.apply_gate(Gate{GateKind::H, q, 0});
        for (size_t b = 0; b < s.dim(); b++) {
            int up = int(n) - 2 * std::popcount(b);  // 2 Sz eigenvalue
            double sz = up / 2.0;
            s.amplitudes()[b] *= std::exp(cplx(0, -chi * sz * sz));
        }
        auto st = squeezing_stats(s);
        REQUIRE(!st.degenerate_axis);
        REQUIRE(st.xi2 < 1.0);

        const char axes[3] = {'X', 'Y', 'Z'};
        mfref::Mat smat[3];
        for (int a = 0; a < 3; a++) {
            smat[a] = mfref::Mat(16);
            for (uint32_t j = 0; j < n; j++) {
                smat[a] = mfref::add(
                    smat[a],
                    mfref::scaled(mfref::pauli_matrix(PauliString::single(n, j, axes[a])), 0.5));
            }
        }
        auto expval = [&](const mfref::Mat &m) {
            auto mv = mfref::apply(m, s.amplitudes());
            cplx acc = 0;
            for (size_t i = 0; i < mv.size(); i++) acc += std::conj(s.amp(i)) * mv[i];
            return acc.real();
        };
        double mean[3], cov2[3][3];
        for (int a = 0; a < 3; a++) mean[a] = expval(smat[a]);
        for (int a = 0; a < 3; a++) {
            for (int b = 0; b < 3; b++) {
                auto sym = mfref::scaled(
                    mfref::add(mfref::mul(smat[a], smat[b]), mfref::mul(smat[b], smat[a])), 0.5);
                cov2[a][b] = expval(sym) - mean[a] * mean[b];
            }
        }
        // mean spin points along +x for this state; scan the y-z plane
        double s2 = mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2];
        double best = 1e9;
        for (int k = 0; k < 200000; k++) {
            double th = std::acos(-1.0) * k / 200000.0;
            double u[3] = {0, std::cos(th), std::sin(th)};
            double var = 0;
            for (int a = 0; a < 3; a++) {
                for (int b = 0; b < 3; b++) var += u[a] * u[b] * cov2[a][b];
            }
            best = std::min(best, var);
        }
        double expect = n * best / s2;
        REQUIRE(std::abs(st.xi2 - expect) < 1e-6);
    }

    SECTION("degenerate axis is flagged") {
        StateVector bell(2);
        bell.apply_gate(Gate{GateKind::H, 0, 0});
        bell.apply_gate(Gate{GateKind::CNOT, 0, 1});
        bell.apply_gate(Gate{GateKind::X, 1, 0});  // singlet-like, <S> = 0
        auto st = squeezing_stats(bell);
        REQUIRE(st.degenerate_axis);
    }
}

TEST_CASE("dense vs stabilizer oracle on the estp", "[sim_dense][oracle]") {
    auto inst = build_estp(1, 3);  // 7 physical qubits
    DilatedCircuit prepped = inst.circuit;
    std::vector<Op> ops{GateOp{Gate{GateKind::H, 0, 0}}};
    ops.insert(ops.end(), inst.circuit.ops.begin(), inst.circuit.ops.end());
    prepped.ops = std::move(ops);

    auto stab = enumerate_trajectories(prepped, Tableau(7), 64);
    auto dense = enumerate_dense(prepped, StateVector(7), 64);
    REQUIRE(stab.size() == dense.size());
    for (size_t i = 0; i < stab.size(); i++) {
        REQUIRE(stab[i].trajectory.outcomes == dense[i].trajectory.outcomes);
        REQUIRE(std::abs(stab[i].trajectory.probability - dense[i].trajectory.probability) < 1e-12);
        // the dense state is a +1 eigenstate of every stabilizer row
        for (size_t k = 0; k < 7; k++) {
            StateVector tmp = dense[i].state;
            tmp.apply_pauli(stab[i].final_tableau.stabilizer(k));
            REQUIRE(std::abs(tmp.inner(dense[i].state) - cplx(1, 0)) < 1e-12);
        }
    }
}
