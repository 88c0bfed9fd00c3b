// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaselens/core.hpp"
#include "phaselens/metrics.hpp"
#include "phaselens/solvers.hpp"
#include "phaselens/theory.hpp"

namespace phaselens {

enum class PlanKind { Dense, Sparse, Theory };

/// m-grid rule: multiples of the signal dimension d, or multiples of
/// s*log(e*d/s); resolved as m = ceil(multiple * unit).
struct MRule {
    enum class Unit { DimensionMultiple, SparsityLogMultiple };
    Unit unit = Unit::DimensionMultiple;
    std::vector<double> multiples;
};

inline constexpr std::uint64_t kDefaultMasterSeed = 20260810ULL;

struct ExperimentPlan {
    PlanKind kind = PlanKind::Dense;
    Index d = 64;
    std::optional<Index> s;
    std::vector<Index> m_values;  // explicit grid; ignored when m_rule is set
    std::optional<MRule> m_rule;
    int trials = 20;
    NoiseSpec noise = NoiseSpec::gaussian(1.0, 1.0);
    SolverConfig solver;
    std::uint64_t master_seed = kDefaultMasterSeed;
    std::string output_path = ".";
};

inline std::vector<Index> resolved_m_values(const ExperimentPlan& plan) {
    std::vector<Index> out;
    if (plan.m_rule) {
        double unit = static_cast<double>(plan.d);
        if (plan.m_rule->unit == MRule::Unit::SparsityLogMultiple) {
            if (!plan.s) {
                throw std::invalid_argument("m_rule: slog unit requires s");
            }
            const double s = static_cast<double>(*plan.s);
            unit = s * std::log(std::exp(1.0) * static_cast<double>(plan.d) / s);
        }
        for (double mult : plan.m_rule->multiples) {
            out.push_back(static_cast<Index>(std::ceil(mult * unit)));
        }
    } else {
        out = plan.m_values;
    }
    if (out.empty()) {
        throw std::invalid_argument("ExperimentPlan: empty m grid");
    }
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        if (out[i] >= out[i + 1]) {
            throw std::invalid_argument("ExperimentPlan: m grid must be strictly increasing");
        }
    }
    return out;
}

inline void validate_plan(const ExperimentPlan& plan) {
    if (plan.d < 1) {
        throw std::invalid_argument("ExperimentPlan: d must be positive");
    }
    if (plan.trials < 1) {
        throw std::invalid_argument("ExperimentPlan: trials must be positive");
    }
    if (plan.kind == PlanKind::Sparse) {
        if (!plan.s || *plan.s < 1 || *plan.s > plan.d) {
            throw std::invalid_argument("ExperimentPlan: sparse plan needs 1 <= s <= d");
        }
    }
    if (plan.kind != PlanKind::Theory) {
        resolved_m_values(plan);
    }
}

// ---------------------------------------------------------------------------
// presets

inline ExperimentPlan desk_dense_plan(std::uint64_t master_seed = kDefaultMasterSeed) {
    ExperimentPlan p;
    p.kind = PlanKind::Dense;
    p.d = 64;
    p.m_rule = MRule{MRule::Unit::DimensionMultiple, {4, 8, 12, 16, 20}};
    p.trials = 20;
    p.noise = NoiseSpec::gaussian(1.0, 1.0);
    p.master_seed = master_seed;
    p.output_path = "out/desk-dense";
    return p;
}

inline ExperimentPlan desk_sparse_plan(std::uint64_t master_seed = kDefaultMasterSeed) {
    ExperimentPlan p;
    p.kind = PlanKind::Sparse;
    p.d = 256;
    p.s = 10;
    p.m_rule = MRule{MRule::Unit::SparsityLogMultiple, {6, 9.5, 13, 16.5, 20}};
    p.trials = 20;
    p.noise = NoiseSpec::gaussian(1.0, 1.0);
    p.solver.init = InitSparseSpectral{10};
    p.master_seed = master_seed;
    p.output_path = "out/desk-sparse";
    return p;
}

inline ExperimentPlan paper_dense_plan(std::uint64_t master_seed = kDefaultMasterSeed) {
    ExperimentPlan p;
    p.kind = PlanKind::Dense;
    p.d = 500;
    p.m_rule = MRule{MRule::Unit::DimensionMultiple,
                     {4, 8, 12, 16, 20, 25, 30, 35, 40, 45, 50}};
    p.trials = 100;
    p.noise = NoiseSpec::gaussian(1.0, 1.0);
    p.master_seed = master_seed;
    p.output_path = "out/paper-dense";
    return p;
}

inline ExperimentPlan paper_sparse_plan(std::uint64_t master_seed = kDefaultMasterSeed) {
    ExperimentPlan p;
    p.kind = PlanKind::Sparse;
    p.d = 1000;
    p.s = 100;
    p.m_rule = MRule{MRule::Unit::SparsityLogMultiple, {6, 9.5, 13, 16.5, 20}};
    p.trials = 100;
    p.noise = NoiseSpec::gaussian(1.0, 1.0);
    p.solver.init = InitSparseSpectral{100};
    p.master_seed = master_seed;
    p.output_path = "out/paper-sparse";
    return p;
}

// ---------------------------------------------------------------------------
// trial execution

/// s-sparse signal: support uniform without replacement, nonzero entries
/// real standard normal embedded with zero imaginary part.
inline ComplexSignal sample_sparse_signal(Index d, Index s, std::uint64_t seed) {
    if (s < 1 || s > d) {
        throw std::invalid_argument("sample_sparse_signal: need 1 <= s <= d");
    }
    GaussianStream g(derive_seed(seed, 0x737073ULL));  // "sps"
    std::vector<Index> idx(static_cast<std::size_t>(d));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index k = 0; k < s; ++k) {
        const auto j = static_cast<Index>(g.below(static_cast<std::uint64_t>(d - k)));
        std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(k + j)]);
    }
    ComplexSignal x = ComplexSignal::Zero(d);
    for (Index k = 0; k < s; ++k) {
        x(idx[static_cast<std::size_t>(k)]) = g.normal();
    }
    return x;
}

struct TrialRecord {
    Index m = 0;
    int trial_index = 0;
    std::uint64_t seed = 0;
    double dist = 0.0;
    double rho_m = 0.0;
    double bound = 0.0;
    int iterations = 0;
    double final_loss = 0.0;
    bool converged = false;
    bool residual_ok = false;
    double fourth_power_ratio = 0.0;
    std::optional<bool> cone_ok;
};

namespace detail {
inline constexpr std::uint64_t kTagSignal = 0x783000ULL;
inline constexpr std::uint64_t kTagEnsemble = 0x656e00ULL;
inline constexpr std::uint64_t kTagNoise = 0x6e7300ULL;
}  // namespace detail

inline TrialRecord run_trial(const ExperimentPlan& plan, Index m, int trial_index) {
    const std::uint64_t seed =
        derive_seed(plan.master_seed, static_cast<std::uint64_t>(m),
                    static_cast<std::uint64_t>(trial_index));

    const ComplexSignal x0 =
        plan.kind == PlanKind::Sparse
            ? sample_sparse_signal(plan.d, *plan.s, derive_seed(seed, detail::kTagSignal))
            : sample_complex_signal(plan.d, derive_seed(seed, detail::kTagSignal));
    const SensingEnsemble ensemble =
        sample_ensemble(plan.d, m, derive_seed(seed, detail::kTagEnsemble));
    const IntensityMeasurements meas =
        measure(ensemble, x0, plan.noise, derive_seed(seed, detail::kTagNoise));

    SolverConfig cfg = plan.solver;
    std::optional<double> radius = cfg.l1_radius;
    if (plan.kind == PlanKind::Sparse && !radius) {
        radius = x0.lpNorm<1>();  // R := ||x0||_1
        cfg.l1_radius = radius;
    }

    TrialRecord rec;
    rec.m = m;
    rec.trial_index = trial_index;
    rec.seed = seed;

    SolveResult sol;
    try {
        sol = wirtinger_flow(ensemble, meas.b, cfg);
    } catch (const SolverDivergedError& diverged) {
        sol.estimate = diverged.last_finite;
        sol.converged = false;
        sol.iterations = diverged.iterate_index;
        sol.loss_trace.clear();
    }
    rec.iterations = sol.iterations;
    rec.converged = sol.converged;
    rec.final_loss = sol.loss_trace.empty()
                         ? intensity_loss(ensemble, meas.b, sol.estimate)
                         : sol.loss_trace.back();

    const ErrorReport er = error_report(sol.estimate, x0, *meas.eta, m);
    rec.dist = er.dist;
    rec.rho_m = er.rho_m.value_or(0.0);
    rec.bound = er.bound;

    const AuditReport audit =
        optimality_audit(ensemble, meas.b, sol.estimate, x0, *meas.eta, radius,
                         plan.kind == PlanKind::Sparse ? plan.s : std::nullopt);
    rec.residual_ok = audit.residual_ok;
    rec.fourth_power_ratio = audit.fourth_power_ratio;
    rec.cone_ok = audit.cone_ok;
    return rec;
}

// ---------------------------------------------------------------------------
// aggregation and output

struct PerMAggregate {
    Index m = 0;
    int trials = 0;
    int converged = 0;
    int excluded = 0;  // non-converged trials, excluded from the rho stats
    double mean_rho = 0.0;
    double std_rho = 0.0;
    double mean_dist = 0.0;
    double convergence_rate = 0.0;
};

/// Per-m aggregates. Records are keyed by (m, trial_index) before any sum
/// so the result does not depend on completion order.
inline std::vector<PerMAggregate> aggregate_records(std::vector<TrialRecord> records,
                                                    const std::vector<Index>& m_values) {
    std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return a.m != b.m ? a.m < b.m : a.trial_index < b.trial_index;
    });
    std::vector<PerMAggregate> out;
    for (Index m : m_values) {
        PerMAggregate agg;
        agg.m = m;
        std::vector<double> rhos;
        double dist_sum = 0.0;
        for (const TrialRecord& r : records) {
            if (r.m != m) {
                continue;
            }
            ++agg.trials;
            dist_sum += r.dist;
            if (r.converged) {
                ++agg.converged;
                rhos.push_back(r.rho_m);
            }
        }
        agg.excluded = agg.trials - agg.converged;
        if (agg.trials > 0) {
            agg.mean_dist = dist_sum / agg.trials;
            agg.convergence_rate = static_cast<double>(agg.converged) / agg.trials;
        }
        if (!rhos.empty()) {
            double sum = 0.0;
            for (double r : rhos) {
                sum += r;
            }
            agg.mean_rho = sum / static_cast<double>(rhos.size());
            if (rhos.size() > 1) {
                double sq = 0.0;
                for (double r : rhos) {
                    sq += (r - agg.mean_rho) * (r - agg.mean_rho);
                }
                agg.std_rho = std::sqrt(sq / static_cast<double>(rhos.size() - 1));
            }
        }
        out.push_back(agg);
    }
    return out;
}

struct ExperimentReport {
    ExperimentPlan plan;
    std::vector<Index> m_values;
    std::vector<TrialRecord> records;
    std::vector<PerMAggregate> per_m;
    double wall_seconds = 0.0;
};

/// Shortest 17-significant-digit decimal; round-trips every finite double.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_header() {
    return "m,trial,dist,rho_m,bound,iterations,converged";
}

inline std::string csv_row(const TrialRecord& r) {
    std::string row;
    row += std::to_string(r.m);
    row += ',';
    row += std::to_string(r.trial_index);
    row += ',';
    row += fmt17(r.dist);
    row += ',';
    row += fmt17(r.rho_m);
    row += ',';
    row += fmt17(r.bound);
    row += ',';
    row += std::to_string(r.iterations);
    row += ',';
    row += r.converged ? '1' : '0';
    return row;
}

inline TrialRecord parse_csv_row(const std::string& line) {
    TrialRecord r;
    std::size_t pos = 0;
    auto next = [&]() {
        const std::size_t comma = line.find(',', pos);
        std::string field = line.substr(pos, comma - pos);
        pos = comma == std::string::npos ? line.size() : comma + 1;
        return field;
    };
    r.m = static_cast<Index>(std::stoll(next()));
    r.trial_index = std::stoi(next());
    r.dist = std::stod(next());
    r.rho_m = std::stod(next());
    r.bound = std::stod(next());
    r.iterations = std::stoi(next());
    r.converged = next() == "1";
    return r;
}

// ---------------------------------------------------------------------------
// JSON encoding (plan files, reports, provenance)

inline nlohmann::json to_json(const NoiseSpec& n) {
    switch (n.kind) {
        case NoiseSpec::Kind::Zero:
            return {{"kind", "zero"}};
        case NoiseSpec::Kind::Fixed: {
            std::vector<double> vals(n.values.data(), n.values.data() + n.values.size());
            return {{"kind", "fixed"}, {"values", vals}};
        }
        case NoiseSpec::Kind::Gaussian:
            return {{"kind", "gaussian"}, {"mean", n.mean}, {"std", n.std}};
    }
    throw std::logic_error("NoiseSpec: unreachable");
}

inline NoiseSpec noise_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") {
        return NoiseSpec::zero();
    }
    if (kind == "fixed") {
        const auto vals = j.at("values").get<std::vector<double>>();
        return NoiseSpec::fixed(Eigen::Map<const Eigen::VectorXd>(
            vals.data(), static_cast<Index>(vals.size())));
    }
    if (kind == "gaussian") {
        return NoiseSpec::gaussian(j.at("mean").get<double>(), j.at("std").get<double>());
    }
    throw std::invalid_argument("noise: unknown kind '" + kind + "'");
}

inline nlohmann::json to_json(const SolverConfig& c) {
    nlohmann::json j;
    j["max_iters"] = c.max_iters;
    j["grad_tol"] = c.grad_tol;
    if (const auto* s = std::get_if<StepSchedule>(&c.step_rule)) {
        j["step_rule"] = {{"kind", "schedule"}, {"t0", s->t0}, {"mu_max", s->mu_max}};
    } else if (const auto* f = std::get_if<StepFixed>(&c.step_rule)) {
        j["step_rule"] = {{"kind", "fixed"}, {"mu", f->mu}};
    } else {
        const auto& b = std::get<StepBacktracking>(c.step_rule);
        j["step_rule"] = {{"kind", "backtracking"},
                          {"shrink", b.shrink},
                          {"max_halvings", b.max_halvings}};
    }
    if (c.l1_radius) {
        j["l1_radius"] = *c.l1_radius;
    }
    if (std::holds_alternative<InitTruncatedSpectral>(c.init)) {
        j["init"] = {{"kind", "truncated_spectral"}};
    } else if (const auto* sp = std::get_if<InitSparseSpectral>(&c.init)) {
        j["init"] = {{"kind", "sparse_spectral"}, {"s_est", sp->s_est}};
    } else {
        const auto& pr = std::get<InitProvided>(c.init);
        nlohmann::json entries = nlohmann::json::array();
        for (Index i = 0; i < pr.point.size(); ++i) {
            entries.push_back({pr.point(i).real(), pr.point(i).imag()});
        }
        j["init"] = {{"kind", "provided"}, {"entries", entries}};
    }
    return j;
}

inline SolverConfig solver_from_json(const nlohmann::json& j) {
    SolverConfig c;
    c.max_iters = j.value("max_iters", c.max_iters);
    c.grad_tol = j.value("grad_tol", c.grad_tol);
    if (j.contains("step_rule")) {
        const auto& sj = j.at("step_rule");
        const std::string kind = sj.at("kind").get<std::string>();
        if (kind == "schedule") {
            StepSchedule s;
            s.t0 = sj.value("t0", s.t0);
            s.mu_max = sj.value("mu_max", s.mu_max);
            c.step_rule = s;
        } else if (kind == "fixed") {
            c.step_rule = StepFixed{sj.at("mu").get<double>()};
        } else if (kind == "backtracking") {
            StepBacktracking b;
            b.shrink = sj.value("shrink", b.shrink);
            b.max_halvings = sj.value("max_halvings", b.max_halvings);
            c.step_rule = b;
        } else {
            throw std::invalid_argument("step_rule: unknown kind '" + kind + "'");
        }
    }
    if (j.contains("l1_radius") && !j.at("l1_radius").is_null()) {
        c.l1_radius = j.at("l1_radius").get<double>();
    }
    if (j.contains("init")) {
        const auto& ij = j.at("init");
        const std::string kind = ij.at("kind").get<std::string>();
        if (kind == "truncated_spectral") {
            c.init = InitTruncatedSpectral{};
        } else if (kind == "sparse_spectral") {
            c.init = InitSparseSpectral{ij.at("s_est").get<Index>()};
        } else if (kind == "provided") {
            const auto& entries = ij.at("entries");
            ComplexSignal x(static_cast<Index>(entries.size()));
            for (Index i = 0; i < x.size(); ++i) {
                const auto& e = entries.at(static_cast<std::size_t>(i));
                x(i) = {e.at(0).get<double>(), e.at(1).get<double>()};
            }
            c.init = InitProvided{std::move(x)};
        } else {
            throw std::invalid_argument("init: unknown kind '" + kind + "'");
        }
    }
    return c;
}

inline nlohmann::json to_json(const ExperimentPlan& p) {
    nlohmann::json j;
    switch (p.kind) {
        case PlanKind::Dense:
            j["kind"] = "dense";
            break;
        case PlanKind::Sparse:
            j["kind"] = "sparse";
            break;
        case PlanKind::Theory:
            j["kind"] = "theory";
            break;
    }
    j["d"] = p.d;
    if (p.s) {
        j["s"] = *p.s;
    }
    if (p.m_rule) {
        j["m_rule"] = {{"unit", p.m_rule->unit == MRule::Unit::DimensionMultiple
                                    ? "d"
                                    : "slog"},
                       {"multiples", p.m_rule->multiples}};
    } else if (!p.m_values.empty()) {
        j["m_values"] = p.m_values;
    }
    j["trials"] = p.trials;
    j["noise"] = to_json(p.noise);
    j["solver"] = to_json(p.solver);
    j["master_seed"] = p.master_seed;
    j["output_path"] = p.output_path;
    return j;
}

inline ExperimentPlan plan_from_json(const nlohmann::json& j) {
    ExperimentPlan p;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dense") {
        p.kind = PlanKind::Dense;
    } else if (kind == "sparse") {
        p.kind = PlanKind::Sparse;
    } else if (kind == "theory") {
        p.kind = PlanKind::Theory;
    } else {
        throw std::invalid_argument("plan: unknown kind '" + kind + "'");
    }
    p.d = j.at("d").get<Index>();
    if (j.contains("s") && !j.at("s").is_null()) {
        p.s = j.at("s").get<Index>();
    }
    if (j.contains("m_rule")) {
        MRule rule;
        const std::string unit = j.at("m_rule").at("unit").get<std::string>();
        if (unit == "d") {
            rule.unit = MRule::Unit::DimensionMultiple;
        } else if (unit == "slog") {
            rule.unit = MRule::Unit::SparsityLogMultiple;
        } else {
            throw std::invalid_argument("m_rule: unknown unit '" + unit + "'");
        }
        rule.multiples = j.at("m_rule").at("multiples").get<std::vector<double>>();
        p.m_rule = rule;
    } else if (j.contains("m_values")) {
        p.m_values = j.at("m_values").get<std::vector<Index>>();
    }
    p.trials = j.value("trials", p.trials);
    if (j.contains("noise")) {
        p.noise = noise_from_json(j.at("noise"));
    }
    if (j.contains("solver")) {
        p.solver = solver_from_json(j.at("solver"));
    }
    p.master_seed = j.value("master_seed", p.master_seed);
    p.output_path = j.value("output_path", p.output_path);
    return p;
}

inline nlohmann::json to_json(const TrialRecord& r) {
    nlohmann::json j;
    j["m"] = r.m;
    j["trial"] = r.trial_index;
    j["seed"] = r.seed;
    j["dist"] = r.dist;
    j["rho_m"] = r.rho_m;
    j["bound"] = r.bound;
    j["iterations"] = r.iterations;
    j["final_loss"] = r.final_loss;
    j["converged"] = r.converged;
    j["residual_ok"] = r.residual_ok;
    j["fourth_power_ratio"] = r.fourth_power_ratio;
    if (r.cone_ok) {
        j["cone_ok"] = *r.cone_ok;
    }
    return j;
}

inline TrialRecord trial_from_json(const nlohmann::json& j) {
    TrialRecord r;
    r.m = j.at("m").get<Index>();
    r.trial_index = j.at("trial").get<int>();
    r.seed = j.value("seed", std::uint64_t{0});
    r.dist = j.at("dist").get<double>();
    r.rho_m = j.at("rho_m").get<double>();
    r.bound = j.at("bound").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.final_loss = j.value("final_loss", 0.0);
    r.converged = j.at("converged").get<bool>();
    r.residual_ok = j.value("residual_ok", false);
    r.fourth_power_ratio = j.value("fourth_power_ratio", 0.0);
    if (j.contains("cone_ok")) {
        r.cone_ok = j.at("cone_ok").get<bool>();
    }
    return r;
}

/// Provenance stub for an ensemble + noise pair: arrays are regenerated
/// from seeds, never serialized.
inline nlohmann::json provenance_json(Index d, Index m, std::uint64_t ensemble_seed,
                                      const NoiseSpec& noise,
                                      std::uint64_t noise_seed) {
    nlohmann::json nj = to_json(noise);
    nj["seed"] = noise_seed;
    return {{"d", d}, {"m", m}, {"seed", ensemble_seed}, {"noise", nj}};
}

inline nlohmann::json to_json(const PerMAggregate& a) {
    return {{"m", a.m},
            {"trials", a.trials},
            {"converged", a.converged},
            {"excluded", a.excluded},
            {"mean_rho", a.mean_rho},
            {"std_rho", a.std_rho},
            {"mean_dist", a.mean_dist},
            {"convergence_rate", a.convergence_rate}};
}

inline nlohmann::json to_json(const ExperimentReport& rep) {
    nlohmann::json j;
    j["plan"] = to_json(rep.plan);
    j["m_values"] = rep.m_values;
    nlohmann::json per_m = nlohmann::json::array();
    for (const auto& a : rep.per_m) {
        per_m.push_back(to_json(a));
    }
    j["per_m"] = per_m;
    j["wall_clock_seconds"] = rep.wall_seconds;
    return j;
}

/// Runs the full trials x m grid, writes trials.csv and report.json under
/// plan.output_path, and returns the report. The CSV stream is opened
/// before any trial runs so an unwritable path fails fast.
inline ExperimentReport run_experiment(const ExperimentPlan& plan) {
    if (plan.kind == PlanKind::Theory) {
        throw std::invalid_argument(
            "run_experiment: theory plans run through run_theory_battery");
    }
    validate_plan(plan);

    ExperimentReport rep;
    rep.plan = plan;
    rep.m_values = resolved_m_values(plan);

    namespace fs = std::filesystem;
    const fs::path dir = plan.output_path.empty() ? fs::path(".") : fs::path(plan.output_path);
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream csv(dir / "trials.csv", std::ios::binary | std::ios::trunc);
    if (!csv) {
        throw std::runtime_error("run_experiment: cannot write " +
                                 (dir / "trials.csv").string());
    }
    std::ofstream report_file(dir / "report.json", std::ios::binary | std::ios::trunc);
    if (!report_file) {
        throw std::runtime_error("run_experiment: cannot write " +
                                 (dir / "report.json").string());
    }

    const auto start = std::chrono::steady_clock::now();
    for (Index m : rep.m_values) {
        for (int t = 0; t < plan.trials; ++t) {
            rep.records.push_back(run_trial(plan, m, t));
        }
    }
    rep.per_m = aggregate_records(rep.records, rep.m_values);
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    csv << csv_header() << '\n';
    for (const TrialRecord& r : rep.records) {
        csv << csv_row(r) << '\n';
    }
    csv.close();
    report_file << to_json(rep).dump(2) << '\n';
    report_file.close();
    return rep;
}

}  // namespace phaselens
