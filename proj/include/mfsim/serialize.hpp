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

#ifndef MFSIM_SERIALIZE_HPP
#define MFSIM_SERIALIZE_HPP

#include <string>

#include <json.hpp>

#include "mfsim/bounds.hpp"
#include "mfsim/circuit.hpp"
#include "mfsim/protocols.hpp"
#include "mfsim/statevector.hpp"

namespace mfsim {

using json = nlohmann::ordered_json;

// Sites serialize 1-based, in the same convention as the Pauli text form.

inline std::string sparse_pauli_text(const SparsePauli &p) {
    std::string out;
    out += p.sign > 0 ? '+' : '-';
    bool any = false;
    for (auto &[site, letter] : p.terms) {
        if (any) out += '*';
        out += letter;
        out += std::to_string(site + 1);
        any = true;
    }
    if (!any) out += 'I';
    return out;
}

inline SparsePauli sparse_pauli_parse(const std::string &text) {
    // reuse the dense parser, then sparsify
    size_t max_site = 1;
    for (size_t i = 0; i < text.size(); i++) {
        if (text[i] >= '0' && text[i] <= '9') {
            size_t j = i;
            while (j < text.size() && text[j] >= '0' && text[j] <= '9') j++;
            max_site = std::max(max_site, size_t(std::stoul(text.substr(i, j - i))));
            i = j - 1;
        }
    }
    auto dense = PauliString::parse(text, max_site);
    SparsePauli sp;
    sp.sign = dense.sign;
    for (uint32_t q = 0; q < dense.n; q++) {
        char c = dense.letter_at(q);
        if (c != 'I') sp.terms.push_back({q, c});
    }
    return sp;
}

inline json geometry_to_json(const Geometry &g) {
    json j;
    j["kind"] = g.kind == Geometry::Kind::chain ? "chain" : "grid";
    j["dims"] = g.dims;
    return j;
}

inline Geometry geometry_from_json(const json &j) {
    Geometry g;
    g.kind = j.at("kind") == "chain" ? Geometry::Kind::chain : Geometry::Kind::grid;
    g.dims = j.at("dims").get<std::vector<uint32_t>>();
    return g;
}

inline json op_to_json(const Op &op) {
    json j;
    if (auto *g = std::get_if<GateOp>(&op)) {
        j["type"] = "gate";
        j["name"] = gate_name(g->gate.kind);
        std::vector<uint32_t> targets{g->gate.q0 + 1};
        if (g->gate.two_site()) targets.push_back(g->gate.q1 + 1);
        j["targets"] = targets;
    } else if (auto *m = std::get_if<MeasureOp>(&op)) {
        j["type"] = "measure";
        j["obs"] = sparse_pauli_text(m->obs);
        j["reg"] = m->reg;
        std::vector<uint32_t> region;
        for (auto s : m->region) region.push_back(s + 1);
        j["region"] = region;
    } else if (auto *w = std::get_if<WeakMeasureOp>(&op)) {
        j["type"] = "weak";
        j["obs"] = sparse_pauli_text(w->obs);
        j["reg"] = w->reg;
        j["angle"] = w->angle;
    } else if (auto *c = std::get_if<CondOp>(&op)) {
        j["type"] = "cond";
        j["parity"] = c->parity_regs;
        json gate;
        if (c->is_pauli) {
            // single-letter Pauli words serialize as a named gate over their
            // support; mixed words fall back to the text form
            char letter = 0;
            bool uniform = !c->pauli.terms.empty();
            for (auto &[site, l] : c->pauli.terms) {
                if (letter == 0) letter = l;
                if (l != letter) uniform = false;
            }
            if (uniform && c->pauli.sign > 0) {
                gate["name"] = std::string(1, letter);
                std::vector<uint32_t> targets;
                for (auto &[site, l] : c->pauli.terms) targets.push_back(site + 1);
                gate["targets"] = targets;
            } else {
                gate["pauli"] = sparse_pauli_text(c->pauli);
            }
        } else {
            gate["name"] = gate_name(c->gate.kind);
            std::vector<uint32_t> targets{c->gate.q0 + 1};
            if (c->gate.two_site()) targets.push_back(c->gate.q1 + 1);
            gate["targets"] = targets;
        }
        j["gate"] = gate;
    }
    return j;
}

inline Op op_from_json(const json &j) {
    std::string type = j.at("type");
    if (type == "gate") {
        GateKind k = gate_from_name(j.at("name").get<std::string>());
        auto targets = j.at("targets").get<std::vector<uint32_t>>();
        Gate g{k, targets.at(0) - 1, targets.size() > 1 ? targets.at(1) - 1 : 0};
        return GateOp{g};
    }
    if (type == "measure") {
        MeasureOp m;
        m.obs = sparse_pauli_parse(j.at("obs").get<std::string>());
        m.reg = j.at("reg").get<uint32_t>();
        if (j.contains("region")) {
            for (auto s : j.at("region").get<std::vector<uint32_t>>()) m.region.push_back(s - 1);
        } else {
            m.region = m.obs.support();
        }
        return m;
    }
    if (type == "weak") {
        WeakMeasureOp w;
        w.obs = sparse_pauli_parse(j.at("obs").get<std::string>());
        w.reg = j.at("reg").get<uint32_t>();
        w.angle = j.at("angle").get<double>();
        w.region = w.obs.support();
        return w;
    }
    if (type == "cond") {
        CondOp c;
        c.parity_regs = j.at("parity").get<std::vector<uint32_t>>();
        const auto &gate = j.at("gate");
        if (gate.contains("pauli")) {
            c.is_pauli = true;
            c.pauli = sparse_pauli_parse(gate.at("pauli").get<std::string>());
        } else {
            std::string name = gate.at("name");
            auto targets = gate.at("targets").get<std::vector<uint32_t>>();
            if (name == "X" || name == "Y" || name == "Z") {
                c.is_pauli = true;
                for (auto t : targets) c.pauli.terms.push_back({t - 1, name[0]});
            } else {
                c.is_pauli = false;
                c.gate = Gate{gate_from_name(name), targets.at(0) - 1,
                              targets.size() > 1 ? targets.at(1) - 1 : 0};
            }
        }
        return c;
    }
    throw std::invalid_argument("unknown op type: " + type);
}

inline json circuit_to_json(const DilatedCircuit &c) {
    json j;
    j["n_physical"] = c.n_physical;
    j["geometry"] = geometry_to_json(c.geom);
    json ops = json::array();
    for (const auto &op : c.ops) ops.push_back(op_to_json(op));
    j["ops"] = ops;
    return j;
}

inline DilatedCircuit circuit_from_json(const json &j) {
    DilatedCircuit c;
    c.n_physical = j.at("n_physical").get<uint32_t>();
    c.geom = geometry_from_json(j.at("geometry"));
    for (const auto &jo : j.at("ops")) c.ops.push_back(op_from_json(jo));
    return c;
}

inline json metadata_to_json(const ProtocolMetadata &md) {
    json j;
    j["task"] = task_name(md.task);
    j["name"] = md.name;
    j["mode"] = md.mode;
    j["in_site"] = md.in_site + 1;
    j["out_site"] = md.out_site + 1;
    json lanes = json::array();
    for (auto &[a, b] : md.lane_sites) lanes.push_back({a + 1, b + 1});
    j["lane_sites"] = lanes;
    j["claimed_distance"] = md.claimed_distance;
    json regions = json::array();
    for (auto &r : md.regions) {
        regions.push_back({{"a", r.a + 1}, {"b", r.b + 1}, {"c", r.c + 1}, {"d", r.d + 1}});
    }
    j["regions"] = regions;
    j["ell"] = md.ell;
    j["claimed_m"] = md.claimed_m;
    j["claimed_nobs"] = md.claimed_nobs;
    j["claimed_depth"] = md.claimed_depth;
    j["m0"] = md.m0;
    j["t0"] = md.t0;
    j["params"] = {{"m", md.m_param},   {"t", md.t_param},          {"q", md.q_param},
                   {"ell", md.ell_param}, {"n", md.n_param},          {"stretch", md.stretch_extra},
                   {"bell_basis", md.bell_basis}, {"flip_a", md.flip_a}};
    if (md.formula_m) j["formula_m"] = *md.formula_m;
    if (md.formula_depth) j["formula_depth"] = *md.formula_depth;
    j["sabotage"] = md.sabotage_tags;
    return j;
}

inline ProtocolMetadata metadata_from_json(const json &j) {
    ProtocolMetadata md;
    std::string task = j.at("task");
    if (task == "teleport") md.task = TaskKind::teleport;
    else if (task == "bell_pair") md.task = TaskKind::bell_pair;
    else if (task == "ghz") md.task = TaskKind::ghz;
    else if (task == "w_state") md.task = TaskKind::w_state;
    else if (task == "multi_teleport") md.task = TaskKind::multi_teleport;
    else throw std::invalid_argument("unknown task: " + task);
    md.name = j.at("name");
    md.mode = j.at("mode");
    md.in_site = j.at("in_site").get<uint32_t>() - 1;
    md.out_site = j.at("out_site").get<uint32_t>() - 1;
    for (const auto &l : j.at("lane_sites")) {
        md.lane_sites.push_back({l.at(0).get<uint32_t>() - 1, l.at(1).get<uint32_t>() - 1});
    }
    md.claimed_distance = j.at("claimed_distance").get<int64_t>();
    for (const auto &r : j.at("regions")) {
        md.regions.push_back({r.at("a").get<uint32_t>() - 1, r.at("b").get<uint32_t>() - 1,
                              r.at("c").get<uint32_t>() - 1, r.at("d").get<uint32_t>() - 1});
    }
    md.ell = j.at("ell");
    md.claimed_m = j.at("claimed_m");
    md.claimed_nobs = j.at("claimed_nobs");
    md.claimed_depth = j.at("claimed_depth");
    md.m0 = j.at("m0");
    md.t0 = j.at("t0");
    const auto &p = j.at("params");
    md.m_param = p.at("m");
    md.t_param = p.at("t");
    md.q_param = p.at("q");
    md.ell_param = p.at("ell");
    md.n_param = p.at("n");
    md.stretch_extra = p.at("stretch");
    md.bell_basis = p.at("bell_basis");
    md.flip_a = p.at("flip_a");
    if (j.contains("formula_m")) md.formula_m = j.at("formula_m").get<int>();
    if (j.contains("formula_depth")) md.formula_depth = j.at("formula_depth").get<int>();
    md.sabotage_tags = j.at("sabotage").get<std::vector<std::string>>();
    return md;
}

inline json instance_to_json(const ProtocolInstance &inst) {
    json j = circuit_to_json(inst.circuit);
    j["metadata"] = metadata_to_json(inst.metadata);
    return j;
}

inline ProtocolInstance instance_from_json(const json &j) {
    ProtocolInstance inst;
    inst.circuit = circuit_from_json(j);
    inst.metadata = metadata_from_json(j.at("metadata"));
    return inst;
}

/// State dump as an array of (re, im) pairs.
inline json state_to_json(const StateVector &s) {
    json j = json::array();
    for (size_t i = 0; i < s.dim(); i++) {
        j.push_back({s.amp(i).real(), s.amp(i).imag()});
    }
    return j;
}

/// Dense Pauli words dump as compact bitvector records.
inline json pauli_record(const PauliString &p) {
    json j;
    j["n"] = p.n;
    auto hex = [](const std::vector<uint64_t> &ws) {
        std::string out;
        char buf[17];
        for (auto w : ws) {
            snprintf(buf, sizeof buf, "%016llx", (unsigned long long)w);
            out += buf;
        }
        return out;
    };
    j["x"] = hex(p.x);
    j["z"] = hex(p.z);
    j["sign"] = int(p.sign);
    return j;
}

inline json bound_report_to_json(const BoundReport &rep) {
    json j;
    j["audited"] = {{"m", rep.audited_m},
                    {"n_obs", rep.audited_nobs},
                    {"depth", rep.audited_depth},
                    {"distance", rep.audited_distance},
                    {"ell", rep.measured_ell}};
    json checks = json::array();
    for (const auto &chk : rep.checks) {
        json c;
        c["name"] = bound_name(chk.result.kind);
        if (chk.result.is_predicate) {
            c["predicate"] = chk.result.predicate;
        } else {
            c["d_max"] = chk.result.d_max;
        }
        c["compared"] = chk.compared_value;
        c["satisfied"] = chk.satisfied;
        c["saturated"] = chk.saturated;
        c["asymptotic"] = chk.result.asymptotic;
        if (!chk.result.note.empty()) c["note"] = chk.result.note;
        checks.push_back(c);
    }
    j["bounds"] = checks;
    j["task_passed"] = rep.task_passed;
    j["inconsistent"] = rep.inconsistent;
    if (rep.formula_m) j["formula_m"] = *rep.formula_m;
    if (rep.formula_depth) j["formula_depth"] = *rep.formula_depth;
    j["formula_mismatch"] = rep.formula_mismatch;
    return j;
}

}  // namespace mfsim

#endif
