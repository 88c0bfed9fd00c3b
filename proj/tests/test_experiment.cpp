// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "phaselens/experiment.hpp"
#include "phaselens/metrics.hpp"

using namespace phaselens;

namespace {

ExperimentPlan tiny_dense_plan(const std::string& out) {
    ExperimentPlan p;
    p.kind = PlanKind::Dense;
    p.d = 12;
    p.m_values = {48, 96};
    p.trials = 3;
    p.noise = NoiseSpec::gaussian(1.0, 1.0);
    p.master_seed = 4242;
    p.output_path = out;
    return p;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("m-rule resolution matches the ceil-of-product convention") {
    ExperimentPlan dense = desk_dense_plan();
    REQUIRE(resolved_m_values(dense) == std::vector<Index>{256, 512, 768, 1024, 1280});

    ExperimentPlan sparse = desk_sparse_plan();
    REQUIRE(resolved_m_values(sparse) == std::vector<Index>{255, 404, 552, 701, 849});

    ExperimentPlan bad = dense;
    bad.m_rule.reset();
    bad.m_values = {64, 64};
    REQUIRE_THROWS_AS(resolved_m_values(bad), std::invalid_argument);
}

TEST_CASE("plan validation") {
    ExperimentPlan p = desk_sparse_plan();
    p.s.reset();
    REQUIRE_THROWS_AS(validate_plan(p), std::invalid_argument);
    p = desk_sparse_plan();
    p.s = 300;  // > d
    REQUIRE_THROWS_AS(validate_plan(p), std::invalid_argument);
    p = desk_dense_plan();
    p.trials = 0;
    REQUIRE_THROWS_AS(validate_plan(p), std::invalid_argument);
}

TEST_CASE("run_trial is deterministic in (plan, m, trial)") {
    const ExperimentPlan plan = tiny_dense_plan("unused");
    const TrialRecord a = run_trial(plan, 48, 1);
    const TrialRecord b = run_trial(plan, 48, 1);
    REQUIRE(a.seed == b.seed);
    REQUIRE(a.dist == b.dist);
    REQUIRE(a.rho_m == b.rho_m);
    REQUIRE(a.bound == b.bound);
    REQUIRE(a.iterations == b.iterations);
    REQUIRE(a.final_loss == b.final_loss);
    REQUIRE(a.converged == b.converged);
    REQUIRE(a.seed == derive_seed(plan.master_seed, 48, 1));

    const TrialRecord c = run_trial(plan, 48, 2);
    REQUIRE(a.dist != c.dist);
}

TEST_CASE("noiseless trials recover the signal") {
    ExperimentPlan plan = tiny_dense_plan("unused");
    plan.d = 16;
    plan.m_values = {128};
    plan.noise = NoiseSpec::zero();
    const TrialRecord rec = run_trial(plan, 128, 0);
    REQUIRE(rec.converged);
    const ComplexSignal x0 = sample_complex_signal(
        plan.d, derive_seed(rec.seed, 0x783000ULL));
    REQUIRE(rec.dist <= 1e-5 * x0.norm());
    REQUIRE(rec.rho_m == 0.0);
    REQUIRE(rec.residual_ok);
}

TEST_CASE("sparse trials stay feasible and pass the cone audit") {
    ExperimentPlan plan;
    plan.kind = PlanKind::Sparse;
    plan.d = 64;
    plan.s = 4;
    plan.m_values = {256, 384};
    plan.trials = 2;
    plan.noise = NoiseSpec::gaussian(1.0, 1.0);
    plan.solver.init = InitSparseSpectral{4};
    plan.master_seed = 99;
    for (Index m : plan.m_values) {
        for (int t = 0; t < plan.trials; ++t) {
            const TrialRecord rec = run_trial(plan, m, t);
            REQUIRE(rec.cone_ok.has_value());
            REQUIRE(*rec.cone_ok);
        }
    }
}

TEST_CASE("aggregation is independent of completion order") {
    const ExperimentPlan plan = tiny_dense_plan("unused");
    std::vector<TrialRecord> records;
    for (Index m : plan.m_values) {
        for (int t = 0; t < plan.trials; ++t) {
            records.push_back(run_trial(plan, m, t));
        }
    }
    const auto base = aggregate_records(records, plan.m_values);

    std::mt19937 rng(7);
    for (int shuffle = 0; shuffle < 5; ++shuffle) {
        std::shuffle(records.begin(), records.end(), rng);
        const auto again = aggregate_records(records, plan.m_values);
        REQUIRE(again.size() == base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            REQUIRE(again[i].mean_rho == base[i].mean_rho);
            REQUIRE(again[i].std_rho == base[i].std_rho);
            REQUIRE(again[i].mean_dist == base[i].mean_dist);
            REQUIRE(again[i].converged == base[i].converged);
        }
    }
    // mean_rho is the arithmetic mean of the converged trials' rho values
    std::vector<double> rhos;
    for (const auto& r : records) {
        if (r.m == plan.m_values[0] && r.converged) {
            rhos.push_back(r.rho_m);
        }
    }
    double mean = 0.0;
    std::sort(rhos.begin(), rhos.end());
    for (double r : rhos) {
        mean += r;
    }
    if (!rhos.empty()) {
        mean /= static_cast<double>(rhos.size());
        REQUIRE_THAT(base[0].mean_rho, Catch::Matchers::WithinRel(mean, 1e-12));
    }
}

TEST_CASE("CSV rows round-trip through the JSON schema") {
    const ExperimentPlan plan = tiny_dense_plan("unused");
    const TrialRecord rec = run_trial(plan, 96, 2);

    const std::string row = csv_row(rec);
    const TrialRecord parsed = parse_csv_row(row);
    const nlohmann::json j = to_json(parsed);
    const TrialRecord back = trial_from_json(j);
    REQUIRE(csv_row(back) == row);
    REQUIRE(back.m == rec.m);
    REQUIRE(back.dist == rec.dist);
    REQUIRE(back.rho_m == rec.rho_m);
    REQUIRE(back.bound == rec.bound);
    REQUIRE(back.converged == rec.converged);
}

TEST_CASE("plan JSON round-trips") {
    for (const ExperimentPlan& plan :
         {desk_dense_plan(), desk_sparse_plan(), paper_dense_plan(), paper_sparse_plan()}) {
        const nlohmann::json j = to_json(plan);
        const ExperimentPlan back = plan_from_json(j);
        REQUIRE(to_json(back).dump() == j.dump());
    }

    // explicit m grid and solver variants survive
    ExperimentPlan p = tiny_dense_plan("somewhere");
    p.solver.step_rule = StepBacktracking{0.25, 12};
    p.solver.l1_radius = 3.5;
    p.solver.init = InitSparseSpectral{7};
    const ExperimentPlan back = plan_from_json(to_json(p));
    REQUIRE(to_json(back).dump() == to_json(p).dump());
    REQUIRE(std::get<StepBacktracking>(back.solver.step_rule).max_halvings == 12);
}

TEST_CASE("provenance stub carries seeds, never arrays") {
    const nlohmann::json j =
        provenance_json(8, 64, 123, NoiseSpec::gaussian(1.0, 1.0), 456);
    REQUIRE(j.at("d") == 8);
    REQUIRE(j.at("m") == 64);
    REQUIRE(j.at("seed") == 123);
    REQUIRE(j.at("noise").at("kind") == "gaussian");
    REQUIRE(j.at("noise").at("seed") == 456);
}

TEST_CASE("run_experiment writes replayable outputs") {
    const auto dir_a = std::filesystem::path("test_out/replay_a");
    const auto dir_b = std::filesystem::path("test_out/replay_b");
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);

    ExperimentPlan plan = tiny_dense_plan(dir_a.string());
    const ExperimentReport rep = run_experiment(plan);
    REQUIRE(rep.records.size() == 6);
    REQUIRE(std::filesystem::exists(dir_a / "trials.csv"));
    REQUIRE(std::filesystem::exists(dir_a / "report.json"));

    plan.output_path = dir_b.string();
    run_experiment(plan);
    REQUIRE(slurp(dir_a / "trials.csv") == slurp(dir_b / "trials.csv"));

    // CSV layout: header plus one line per record
    std::istringstream csv(slurp(dir_a / "trials.csv"));
    std::string line;
    std::getline(csv, line);
    REQUIRE(line == csv_header());
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        const TrialRecord r = parse_csv_row(line);
        REQUIRE(csv_row(r) == line);
        ++rows;
    }
    REQUIRE(rows == rep.records.size());

    // report.json echoes the plan
    const nlohmann::json report = nlohmann::json::parse(slurp(dir_a / "report.json"));
    REQUIRE(report.at("plan").at("d") == plan.d);
    REQUIRE(report.at("per_m").size() == 2);
}

TEST_CASE("run_experiment fails fast on an unwritable path") {
    ExperimentPlan plan = tiny_dense_plan("/proc/phaselens/forbidden");
    REQUIRE_THROWS_AS(run_experiment(plan), std::runtime_error);
}

TEST_CASE("mean dist decreases along the m grid") {
    ExperimentPlan plan;
    plan.kind = PlanKind::Dense;
    plan.d = 16;
    plan.m_values = {64, 128, 192, 256};
    plan.trials = 5;
    plan.noise = NoiseSpec::gaussian(1.0, 1.0);
    plan.master_seed = 31337;
    plan.output_path = "test_out/trend";
    const ExperimentReport rep = run_experiment(plan);
    int inversions = 0;
    for (std::size_t i = 1; i < rep.per_m.size(); ++i) {
        if (rep.per_m[i].mean_dist > rep.per_m[i - 1].mean_dist) {
            ++inversions;
        }
    }
    REQUIRE(inversions <= 1);
}

TEST_CASE("paper-scale dense trial lands in the published band") {
    // one Example-1-style trial: d = 500, m = 20d, eta ~ N(1,1)
    ExperimentPlan plan;
    plan.kind = PlanKind::Dense;
    plan.d = 500;
    plan.m_values = {10000};
    plan.trials = 1;
    plan.noise = NoiseSpec::gaussian(1.0, 1.0);
    plan.master_seed = 271828;
    const TrialRecord rec = run_trial(plan, 10000, 0);
    REQUIRE(rec.converged);
    REQUIRE(rec.rho_m >= 0.2);
    REQUIRE(rec.rho_m <= 0.6);
}
