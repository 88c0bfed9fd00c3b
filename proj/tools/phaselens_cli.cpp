// SPDX-License-Identifier: Apache-2.0
//
// phaselens CLI: noisy phase retrieval experiments and the Monte-Carlo
// certification battery.
//
//   phaselens dense  [--plan f.json] [--out dir] [--seed u64] [--trials N] [--preset desk|paper]
//   phaselens sparse [--plan f.json] [--out dir] [--seed u64] [--trials N] [--preset desk|paper]
//   phaselens theory [--plan f.json] [--out dir] [--seed u64]
//
// Exit codes: 0 success, 1 error, 2 certification failure in theory mode.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "phaselens/phaselens.hpp"

namespace {

struct CliOptions {
    std::string plan_path;
    std::string out_dir;
    std::string preset = "desk";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
};

phaselens::ExperimentPlan load_or_preset(const CliOptions& opt,
                                         phaselens::PlanKind kind) {
    phaselens::ExperimentPlan plan;
    if (!opt.plan_path.empty()) {
        std::ifstream in(opt.plan_path);
        if (!in) {
            throw std::runtime_error("cannot open plan file: " + opt.plan_path);
        }
        nlohmann::json j;
        in >> j;
        plan = phaselens::plan_from_json(j);
        if (plan.kind != kind) {
            throw std::runtime_error("plan kind does not match the subcommand");
        }
    } else if (kind == phaselens::PlanKind::Dense) {
        plan = opt.preset == "paper" ? phaselens::paper_dense_plan()
                                     : phaselens::desk_dense_plan();
    } else if (kind == phaselens::PlanKind::Sparse) {
        plan = opt.preset == "paper" ? phaselens::paper_sparse_plan()
                                     : phaselens::desk_sparse_plan();
    } else {
        plan.kind = phaselens::PlanKind::Theory;
        plan.output_path = "out/theory";
    }
    if (opt.seed) {
        plan.master_seed = *opt.seed;
    }
    if (opt.trials) {
        plan.trials = *opt.trials;
    }
    if (!opt.out_dir.empty()) {
        plan.output_path = opt.out_dir;
    }
    return plan;
}

int run_grid(const CliOptions& opt, phaselens::PlanKind kind) {
    const phaselens::ExperimentPlan plan = load_or_preset(opt, kind);
    std::printf("phaselens: d=%lld trials=%d seed=%llu -> %s\n",
                static_cast<long long>(plan.d), plan.trials,
                static_cast<unsigned long long>(plan.master_seed),
                plan.output_path.c_str());
    const phaselens::ExperimentReport rep = phaselens::run_experiment(plan);
    std::printf("%10s %10s %10s %12s %10s\n", "m", "mean_rho", "std_rho",
                "mean_dist", "converged");
    for (const auto& a : rep.per_m) {
        std::printf("%10lld %10.4f %10.4f %12.3e %7d/%d\n",
                    static_cast<long long>(a.m), a.mean_rho, a.std_rho,
                    a.mean_dist, a.converged, a.trials);
    }
    std::printf("wall clock: %.1f s; wrote %s/trials.csv and report.json\n",
                rep.wall_seconds, plan.output_path.c_str());
    return 0;
}

int run_theory(const CliOptions& opt) {
    const phaselens::ExperimentPlan plan =
        load_or_preset(opt, phaselens::PlanKind::Theory);
    const auto checks = phaselens::run_theory_battery(plan.master_seed);

    bool all_pass = true;
    nlohmann::json out;
    out["master_seed"] = plan.master_seed;
    out["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        std::printf("[%s] %-24s value=%-12.6g threshold=%-12.6g %s\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.threshold, c.detail.c_str());
        out["checks"].push_back({{"name", c.name},
                                 {"pass", c.pass},
                                 {"value", c.value},
                                 {"threshold", c.threshold},
                                 {"detail", c.detail}});
    }

    namespace fs = std::filesystem;
    const fs::path dir = plan.output_path.empty() ? fs::path(".") : fs::path(plan.output_path);
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream report(dir / "report.json", std::ios::binary | std::ios::trunc);
    if (!report) {
        throw std::runtime_error("cannot write " + (dir / "report.json").string());
    }
    report << out.dump(2) << '\n';
    std::printf("%s; wrote %s/report.json\n",
                all_pass ? "all checks passed" : "CHECK FAILURES", dir.c_str());
    return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"noisy phase retrieval: estimators, solvers, and certification"};
    app.require_subcommand(1);

    CliOptions opt;
    auto add_common = [&opt](CLI::App* cmd, bool with_preset) {
        cmd->add_option("--plan", opt.plan_path, "JSON experiment plan");
        cmd->add_option("--out", opt.out_dir, "output directory");
        cmd->add_option("--seed", opt.seed, "master seed override");
        cmd->add_option("--trials", opt.trials, "trial count override");
        if (with_preset) {
            cmd->add_option("--preset", opt.preset, "desk (default) or paper")
                ->check(CLI::IsMember({"desk", "paper"}));
        }
    };
    CLI::App* dense = app.add_subcommand("dense", "dense-signal rate experiment");
    CLI::App* sparse = app.add_subcommand("sparse", "sparse-signal rate experiment");
    CLI::App* theory = app.add_subcommand("theory", "Monte-Carlo certification battery");
    add_common(dense, true);
    add_common(sparse, true);
    add_common(theory, false);

    try {
        app.parse(argc, argv);
        if (dense->parsed()) {
            return run_grid(opt, phaselens::PlanKind::Dense);
        }
        if (sparse->parsed()) {
            return run_grid(opt, phaselens::PlanKind::Sparse);
        }
        return run_theory(opt);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "phaselens: %s\n", e.what());
        return 1;
    }
}
