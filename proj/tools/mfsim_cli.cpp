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

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfsim/runner.hpp"

using namespace mfsim;

namespace {

struct CliOptions {
    std::string protocol;
    int m = 1;
    int t = 3;
    int ell = 4;
    int q = 2;
    int n = 2;
    std::string w_mode = "unitary";
    std::string backend = "stabilizer";
    std::string mode = "enumerate";
    std::string sabotage_name;
    int stretch = 1;
    uint64_t seed = 0;
    std::string out_path;
    std::string format = "json";
    std::string load_path;
    std::string lightcone_path;
    std::string dump_state_path;
    // sweep ranges, inclusive "a:b"
    std::string m_range, t_range, ell_range, n_range;
};

std::pair<int, int> parse_range(const std::string &text, int fallback) {
    if (text.empty()) return {fallback, fallback};
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        int v = std::stoi(text);
        return {v, v};
    }
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
}

ProtocolInstance build_from_options(const CliOptions &opt) {
    ProtocolInstance inst;
    if (!opt.load_path.empty()) {
        std::ifstream in(opt.load_path);
        if (!in) throw std::invalid_argument("cannot open " + opt.load_path);
        json j;
        in >> j;
        return instance_from_json(j);
    }
    if (opt.protocol == "stp") {
        inst = build_stp();
    } else if (opt.protocol == "estp") {
        inst = build_estp(opt.m, opt.t);
    } else if (opt.protocol == "bell") {
        inst = build_bell_distill(opt.m, opt.t);
    } else if (opt.protocol == "ghz") {
        inst = build_ghz_1d(opt.m, opt.ell);
    } else if (opt.protocol == "w") {
        inst = build_w_state(opt.n, opt.w_mode == "estp" ? WMode::estp : WMode::unitary);
    } else if (opt.protocol == "multiq") {
        inst = build_multiqubit_estp(opt.q, opt.m, opt.t);
    } else {
        throw std::invalid_argument("unknown protocol: " + opt.protocol);
    }
    if (!opt.sabotage_name.empty()) {
        if (opt.sabotage_name == "strip-feedback") {
            inst = sabotage(inst, Sabotage::strip_feedback);
        } else if (opt.sabotage_name == "stretch-regions") {
            inst = sabotage(inst, Sabotage::stretch_regions, opt.stretch);
        } else if (opt.sabotage_name == "share-measurement") {
            inst = sabotage(inst, Sabotage::share_measurement);
        } else {
            throw std::invalid_argument("unknown sabotage: " + opt.sabotage_name);
        }
    }
    return inst;
}

RunConfig config_from_options(const CliOptions &opt) {
    RunConfig cfg;
    if (opt.backend == "stabilizer") cfg.backend = Backend::stabilizer;
    else if (opt.backend == "dense") cfg.backend = Backend::dense;
    else if (opt.backend == "both") cfg.backend = Backend::both;
    else throw std::invalid_argument("unknown backend: " + opt.backend);
    if (opt.mode == "trajectory") cfg.mode = RunMode::trajectory;
    else if (opt.mode == "enumerate") cfg.mode = RunMode::enumerate_all;
    else if (opt.mode == "explicit-dilation") cfg.mode = RunMode::explicit_dilation;
    else throw std::invalid_argument("unknown mode: " + opt.mode);
    cfg.seed = opt.seed;
    return cfg;
}

void write_text(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
}

int cmd_run(const CliOptions &opt) {
    auto inst = build_from_options(opt);
    auto cfg = config_from_options(opt);
    auto rep = run_and_audit(inst, cfg);

    json j = run_report_to_json(inst, cfg, rep);
    j["instance"] = instance_to_json(inst);
    if (opt.format == "json") {
        write_text(opt.out_path, j.dump(2));
    } else {
        std::string csv = "# mfsim-run-v1 protocol,task,passed,inconsistent,m,n_obs,depth,distance\n";
        csv += inst.metadata.name + "," + task_name(inst.metadata.task) + "," +
               (rep.task_passed ? "true" : "false") + "," +
               (rep.bounds.inconsistent ? "true" : "false") + "," +
               std::to_string(rep.bounds.audited_m) + "," +
               std::to_string(rep.bounds.audited_nobs) + "," +
               std::to_string(rep.bounds.audited_depth) + "," +
               std::to_string(rep.bounds.audited_distance) + "\n";
        write_text(opt.out_path, csv);
    }

    if (!opt.lightcone_path.empty() && inst.metadata.task != TaskKind::w_state) {
        LightconeReport cone;
        uint32_t n = inst.circuit.n_physical;
        evolve_logical(inst.circuit, LogicalPair::at_site(n, inst.metadata.out_site), &cone);
        json jc = json::array();
        for (const auto &step : cone) {
            jc.push_back({{"op", step.op_index},
                          {"layer", step.layer},
                          {"x_support", {step.x_lo + 1, step.x_hi + 1}},
                          {"z_support", {step.z_lo + 1, step.z_hi + 1}}});
        }
        write_text(opt.lightcone_path, jc.dump(2));
    }
    if (!opt.dump_state_path.empty()) {
        OutcomeSource src(opt.seed);
        auto mode = opt.mode == "explicit-dilation" ? DenseMode::explicit_dilation
                                                    : DenseMode::trajectory;
        auto out = apply_circuit(inst.circuit, StateVector(inst.circuit.n_physical), mode, src);
        write_text(opt.dump_state_path, state_to_json(out.state).dump());
    }

    std::cerr << inst.metadata.name << ": task " << (rep.task_passed ? "pass" : "FAIL")
              << ", bounds " << (rep.bounds.inconsistent ? "INCONSISTENT" : "consistent")
              << ", D=" << rep.bounds.audited_distance << ", M=" << rep.bounds.audited_m
              << ", T=" << rep.bounds.audited_depth << "\n";
    return rep.exit_code;
}

int cmd_sweep(const CliOptions &opt) {
    auto [m_lo, m_hi] = parse_range(opt.m_range, opt.m);
    auto [t_lo, t_hi] = parse_range(opt.t_range, opt.t);
    auto [ell_lo, ell_hi] = parse_range(opt.ell_range, opt.ell);
    auto [n_lo, n_hi] = parse_range(opt.n_range, opt.n);
    auto cfg = config_from_options(opt);

    std::string csv =
        "# mfsim-sweep-v1 protocol,m,t,ell,n,mode,d_achieved,d_bound,saturated,task_pass\n";
    int worst_exit = 0;
    auto emit = [&](const ProtocolInstance &inst) {
        auto rep = run_and_audit(inst, cfg);
        int64_t d_bound = 0;
        bool saturated = false;
        if (!rep.bounds.checks.empty()) {
            d_bound = rep.bounds.checks[0].result.d_max;
            saturated = rep.bounds.checks[0].saturated;
        }
        const auto &md = inst.metadata;
        csv += md.name + "," + std::to_string(md.m_param) + "," + std::to_string(md.t_param) +
               "," + std::to_string(md.ell_param) + "," + std::to_string(md.n_param) + "," +
               md.mode + "," + std::to_string(rep.bounds.audited_distance) + "," +
               std::to_string(d_bound) + "," + (saturated ? "true" : "false") + "," +
               (rep.task_passed ? "true" : "false") + "\n";
        worst_exit = std::max(worst_exit, rep.exit_code);
    };

    if (opt.protocol == "estp") {
        for (int m = m_lo; m <= m_hi; m++) {
            for (int t = t_lo; t <= t_hi; t++) {
                emit(build_estp(m, t));
            }
        }
    } else if (opt.protocol == "ghz") {
        for (int ell = ell_lo; ell <= ell_hi; ell += 2) {
            for (int m = m_lo; m <= m_hi; m++) {
                emit(build_ghz_1d(m, ell));
            }
        }
    } else if (opt.protocol == "bell") {
        for (int m = m_lo; m <= m_hi; m++) {
            for (int t = t_lo; t <= t_hi; t++) {
                emit(build_bell_distill(m, t));
            }
        }
    } else if (opt.protocol == "w") {
        for (int n = n_lo; n <= n_hi; n++) {
            for (const char *mode : {"unitary", "estp"}) {
                CliOptions o = opt;
                o.n = n;
                o.w_mode = mode;
                emit(build_from_options(o));
            }
        }
    } else {
        throw std::invalid_argument("sweep supports estp, ghz, bell, w");
    }
    write_text(opt.out_path, csv);
    return worst_exit;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"measurement-feedback protocol simulator and bound auditor"};
    app.require_subcommand(1);
    CliOptions opt;

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--m", opt.m, "measurement regions");
        cmd->add_option("--t", opt.t, "depth budget");
        cmd->add_option("--ell", opt.ell, "patch size (ghz)");
        cmd->add_option("--q", opt.q, "logical qubits (multiq)");
        cmd->add_option("--n", opt.n, "log2 qubit count (w)");
        cmd->add_option("--w-mode", opt.w_mode, "w spreading: unitary or estp");
        cmd->add_option("--backend", opt.backend, "stabilizer, dense, or both");
        cmd->add_option("--mode", opt.mode, "trajectory, enumerate, or explicit-dilation");
        cmd->add_option("--seed", opt.seed, "outcome source seed");
        cmd->add_option("--out", opt.out_path, "output path (default stdout)");
        cmd->add_option("--format", opt.format, "json or csv");
    };

    auto *run = app.add_subcommand("run", "build, execute, and audit one instance");
    run->add_option("protocol", opt.protocol, "stp, estp, bell, ghz, w, multiq")->required();
    add_common(run);
    run->add_option("--sabotage", opt.sabotage_name,
                    "strip-feedback, stretch-regions, share-measurement");
    run->add_option("--stretch-extra", opt.stretch, "extra spacing for stretch-regions");
    run->add_option("--load", opt.load_path, "load a serialized instance instead of building");
    run->add_option("--lightcone", opt.lightcone_path, "write the logical light-cone report");
    run->add_option("--dump-state", opt.dump_state_path, "write the final dense state");

    auto *sweep = app.add_subcommand("sweep", "grid of instances, one CSV row each");
    sweep->add_option("protocol", opt.protocol, "estp, ghz, bell, w")->required();
    add_common(sweep);
    sweep->add_option("--m-range", opt.m_range, "inclusive a:b");
    sweep->add_option("--t-range", opt.t_range, "inclusive a:b");
    sweep->add_option("--ell-range", opt.ell_range, "inclusive a:b, step 2");
    sweep->add_option("--n-range", opt.n_range, "inclusive a:b");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
