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
#include "mfsim/sim_stabilizer.hpp"

using namespace mfsim;

namespace {

DilatedCircuit with_prep(const DilatedCircuit &c, const std::vector<Gate> &prep) {
    DilatedCircuit out = c;
    std::vector<Op> ops;
    for (auto &g : prep) ops.push_back(GateOp{g});
    ops.insert(ops.end(), c.ops.begin(), c.ops.end());
    out.ops = std::move(ops);
    return out;
}

}  // namespace

TEST_CASE("empty circuit run", "[sim_stabilizer]") {
    auto c = DilatedCircuit::on_chain(3);
    OutcomeSource src(0);
    auto rec = run_trajectory(c, Tableau(3), src);
    REQUIRE(rec.trajectory.outcomes.empty());
    REQUIRE(rec.depth_executed == 0);
    REQUIRE(rec.trajectory.probability == 1.0);
    REQUIRE(rec.final_tableau.expectation(PauliString::single(3, 0, 'Z')) == +1);
}

TEST_CASE("stp teleports the plus state in every branch", "[sim_stabilizer][stp]") {
    auto inst = build_stp();
    auto prepped = with_prep(inst.circuit, {Gate{GateKind::H, 0, 0}});
    auto records = enumerate_trajectories(prepped, Tableau(3), 64);
    REQUIRE(records.size() == 4);
    double total = 0;
    for (const auto &rec : records) {
        REQUIRE(rec.trajectory.probability == 0.25);
        total += rec.trajectory.probability;
        REQUIRE(rec.final_tableau.expectation(PauliString::single(3, 2, 'X')) == +1);
    }
    REQUIRE(total == 1.0);

    auto bloch = averaged_bloch(records, 2);
    REQUIRE(bloch[0] == 1.0);
    REQUIRE(bloch[1] == 0.0);
    REQUIRE(bloch[2] == 0.0);
}

TEST_CASE("stp without feedback is a twirl", "[sim_stabilizer][stp]") {
    auto stripped = sabotage(build_stp(), Sabotage::strip_feedback);
    auto prepped = with_prep(stripped.circuit, {Gate{GateKind::H, 0, 0}});
    auto records = enumerate_trajectories(prepped, Tableau(3), 64);
    auto bloch = averaged_bloch(records, 2);
    REQUIRE(bloch[0] == 0.0);
    REQUIRE(bloch[1] == 0.0);
    REQUIRE(bloch[2] == 0.0);
}

TEST_CASE("stp lookup table", "[sim_stabilizer][stp]") {
    // Outcomes (m1, m2) = (+1, +1) leave the state alone; (-1, -1) applies
    // Z then X (Y up to phase). Verified through the teleported state.
    auto inst = build_stp();
    auto prepped = with_prep(inst.circuit, {Gate{GateKind::H, 0, 0}});
    for (int b0 = 0; b0 < 2; b0++) {
        for (int b1 = 0; b1 < 2; b1++) {
            auto src = OutcomeSource::forced({b0, b1});
            auto rec = run_trajectory(prepped, Tableau(3), src);
            REQUIRE(rec.final_tableau.expectation(PauliString::single(3, 2, 'X')) == +1);
        }
    }
}

TEST_CASE("estp teleports |0> across every branch", "[sim_stabilizer][estp]") {
    auto inst = build_estp(2, 4);
    REQUIRE(inst.circuit.n_physical == 16);
    REQUIRE(inst.circuit.depth() == 4);
    REQUIRE(inst.metadata.claimed_distance == 15);
    auto records = enumerate_trajectories(inst.circuit, Tableau(16), 64);
    REQUIRE(records.size() == 16);
    double total = 0;
    for (const auto &rec : records) {
        REQUIRE(rec.trajectory.probability == 1.0 / 16);
        total += rec.trajectory.probability;
        REQUIRE(rec.final_tableau.expectation(PauliString::single(16, 15, 'Z')) == +1);
    }
    REQUIRE(total == 1.0);
}

TEST_CASE("estp process matrix is the identity", "[sim_stabilizer][estp]") {
    auto inst = build_estp(1, 3);
    bool per_branch = false;
    auto ptm = teleport_process_matrix(inst.circuit, inst.metadata.in_site,
                                       inst.metadata.out_site, 1 << 12, &per_branch);
    REQUIRE(ptm.is_identity());
    REQUIRE(per_branch);
}

TEST_CASE("estp without feedback twirls", "[sim_stabilizer][estp]") {
    auto stripped = sabotage(build_estp(1, 3), Sabotage::strip_feedback);
    auto ptm = teleport_process_matrix(stripped.circuit, 0, stripped.circuit.n_physical - 1);
    REQUIRE(ptm.is_zero());
}

TEST_CASE("estp M=0 is a swap staircase", "[sim_stabilizer][estp]") {
    auto inst = build_estp(0, 4);
    REQUIRE(inst.circuit.n_physical == 4);
    REQUIRE(inst.circuit.depth() == 3);
    auto records = enumerate_trajectories(inst.circuit, Tableau(4), 4);
    REQUIRE(records.size() == 1);
    REQUIRE(records[0].trajectory.probability == 1.0);
    bool per_branch = false;
    auto ptm = teleport_process_matrix(inst.circuit, 0, 3, 4, &per_branch);
    REQUIRE(ptm.is_identity());
    REQUIRE(per_branch);
}

TEST_CASE("depth counts two-site layers only", "[sim_stabilizer]") {
    auto c = DilatedCircuit::on_chain(4);
    c.gate(GateKind::H, 0);
    c.gate(GateKind::CNOT, 0, 1);
    c.gate(GateKind::S, 1);
    c.measure(SparsePauli::single(1, 'Z'));
    c.gate(GateKind::CNOT, 1, 2);
    c.gate(GateKind::H, 2);
    c.gate(GateKind::CNOT, 2, 3);
    REQUIRE(c.depth() == 3);
    OutcomeSource src(5);
    auto rec = run_trajectory(c, Tableau(4), src);
    REQUIRE(rec.depth_executed == 3);
}

TEST_CASE("conditioned gates cannot precede the outcomes they read", "[sim_stabilizer]") {
    auto c = DilatedCircuit::on_chain(3);
    c.gate(GateKind::CNOT, 0, 1);  // layer 1
    auto r = c.measure(SparsePauli::single(1, 'Z'));
    c.cond_pauli({r}, SparsePauli::single(2, 'X'));
    c.gate(GateKind::CNOT, 2, 0);  // must land after the feedback: layer 2
    REQUIRE(c.depth() == 2);

    auto free_c = DilatedCircuit::on_chain(3);
    free_c.gate(GateKind::CNOT, 0, 1);
    free_c.gate(GateKind::CNOT, 2, 0);  // no feedback in between: layer 2 by adjacency
    REQUIRE(free_c.depth() == 2);
}

TEST_CASE("sampling matches enumeration frequencies", "[sim_stabilizer]") {
    auto inst = build_stp();
    auto prepped = with_prep(inst.circuit, {Gate{GateKind::H, 0, 0}});
    const int shots = 10000;
    std::array<int, 4> counts{};
    for (int i = 0; i < shots; i++) {
        OutcomeSource src(1000 + uint64_t(i));
        auto rec = run_trajectory(prepped, Tableau(3), src);
        int idx = rec.trajectory.outcomes[0] * 2 + rec.trajectory.outcomes[1];
        counts[idx]++;
    }
    // chi^2 against the enumerated quarter weights, 3 dof
    double chi2 = 0;
    for (int k = 0; k < 4; k++) {
        double e = shots / 4.0;
        chi2 += (counts[k] - e) * (counts[k] - e) / e;
    }
    REQUIRE(chi2 < 16.27);  // p = 0.001 tail
}

TEST_CASE("branch budget", "[sim_stabilizer]") {
    auto inst = build_estp(2, 4);  // 16 branches
    REQUIRE_THROWS_AS(enumerate_trajectories(inst.circuit, Tableau(16), 8), std::invalid_argument);
}

TEST_CASE("enumeration emits the zero branch first in register order", "[sim_stabilizer]") {
    auto inst = build_estp(1, 3);
    auto records = enumerate_trajectories(inst.circuit, Tableau(inst.circuit.n_physical), 16);
    REQUIRE(records.size() == 4);
    for (size_t i = 1; i < records.size(); i++) {
        REQUIRE(records[i - 1].trajectory.outcomes < records[i].trajectory.outcomes);
    }
    REQUIRE_THROWS_AS(averaged_bloch({}, 0), std::invalid_argument);
}
