// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "phaselens/solvers.hpp"
#include "phaselens/theory.hpp"
#include "phaselens/theory_battery.hpp"

using namespace phaselens;

TEST_CASE("lrip_ratio for rank-one projectors concentrates near sqrt(2)") {
    // ratio^2 = (1/m) sum |a_j^* v|^4 with E |a^* v|^4 = 2 for unit v
    const Index d = 16;
    const Index m = 50 * d;
    const LripEstimate est = empirical_lrip(d, 1, m, 50, 12345);
    REQUIRE_THAT(est.min_ratio, Catch::Matchers::WithinAbs(std::sqrt(2.0), 0.2));
}

TEST_CASE("empirical LRIP floor at m = 20dr") {
    const Index d = 16;
    const Index r = 2;
    const LripEstimate est = empirical_lrip(d, r, 20 * d * r, 500, 777);
    REQUIRE(est.min_ratio >= 0.3);
    REQUIRE(est.n_samples == 500);
    REQUIRE_THROWS_AS(empirical_lrip(4, 5, 100, 10, 1), std::invalid_argument);
}

TEST_CASE("lrip ratio is scale invariant through normalization") {
    GaussianStream g(31);
    const SensingEnsemble e = sample_ensemble(12, 240, 32);
    HermitianSample s = detail::sample_isotropic(12, 3, g);

    Eigen::VectorXd raw(3);
    raw << 1.25, -0.375, 2.0;

    // normalize(c * raw) == normalize(raw) bitwise for a power-of-two c
    HermitianSample a = s;
    a.spectrum = raw / raw.norm();
    HermitianSample b = s;
    b.spectrum = (4.0 * raw) / (4.0 * raw).norm();
    REQUIRE(a.spectrum == b.spectrum);
    REQUIRE(lrip_ratio(e, a) == lrip_ratio(e, b));

    // and to rounding for any other positive scale
    HermitianSample c = s;
    c.spectrum = (5.0 * raw) / (5.0 * raw).norm();
    REQUIRE_THAT(lrip_ratio(e, c), Catch::Matchers::WithinRel(lrip_ratio(e, a), 1e-14));
}

TEST_CASE("small-ball profile stays above the 1/52 floor") {
    const Index n_mc = 20000;
    const SmallBallProfile prof = small_ball_profile(8, 2, n_mc, 10, 999);
    const double sigma = std::sqrt(0.25 / double(n_mc));
    REQUIRE(prof.q_hat >= 1.0 / 52.0 - 3.0 * sigma);
    REQUIRE(prof.q_hat <= 1.0);
    REQUIRE(prof.w_proxy <= 4.0 * std::sqrt(8.0));
}

TEST_CASE("rank-one small-ball probability matches the exponential law") {
    // |a^* v|^2 ~ Exp(1): P(X >= 1/sqrt(2)) = e^{-1/sqrt(2)}
    GaussianStream g(51);
    const Index n = 200000;
    Index count = 0;
    for (Index k = 0; k < n; ++k) {
        if (std::norm(g.complex_gaussian()) >= 1.0 / std::sqrt(2.0)) {
            ++count;
        }
    }
    const double p_hat = double(count) / double(n);
    REQUIRE_THAT(p_hat, Catch::Matchers::WithinAbs(std::exp(-1.0 / std::sqrt(2.0)), 0.005));
}

TEST_CASE("moment_report closed forms for the pinned spectra") {
    SECTION("lambda = (1)") {
        Eigen::VectorXd s(1);
        s << 1.0;
        const MomentReport rep = moment_report(s, 1, 1);
        REQUIRE(rep.second_exact == 2.0);
        REQUIRE(rep.fourth_exact == 24.0);
        REQUIRE(rep.kurtosis_ratio == 6.0);
    }
    SECTION("lambda = (1, -1)/sqrt(2)") {
        Eigen::VectorXd s(2);
        s << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
        const MomentReport rep = moment_report(s, 1, 1);
        REQUIRE_THAT(rep.second_exact, Catch::Matchers::WithinRel(1.0, 1e-14));
        REQUIRE_THAT(rep.fourth_exact, Catch::Matchers::WithinRel(6.0, 1e-14));
        REQUIRE(rep.kurtosis_ratio <= 13.0);
    }
    REQUIRE_THROWS_AS(moment_report(Eigen::VectorXd(), 1, 1), std::invalid_argument);
}

TEST_CASE("moment Monte-Carlo agrees with the closed forms") {
    GaussianStream g(61);
    for (int trial = 0; trial < 4; ++trial) {
        const Index len = 1 + static_cast<Index>(g.below(6));
        Eigen::VectorXd s(len);
        for (Index k = 0; k < len; ++k) {
            s(k) = g.normal();
        }
        s /= s.norm();
        const MomentReport rep = moment_report(s, 1000000, 6000 + trial);
        REQUIRE_THAT(rep.second_mc, Catch::Matchers::WithinRel(rep.second_exact, 0.01));
        REQUIRE_THAT(rep.fourth_mc, Catch::Matchers::WithinRel(rep.fourth_exact, 0.03));
        REQUIRE(rep.kurtosis_ratio <= 13.0);
        REQUIRE(rep.second_exact >= s.squaredNorm());
    }
}

TEST_CASE("kurtosis bound and second-moment floor hold for arbitrary spectra") {
    GaussianStream g(71);
    for (int trial = 0; trial < 500; ++trial) {
        const Index len = 1 + static_cast<Index>(g.below(8));
        Eigen::VectorXd s(len);
        for (Index k = 0; k < len; ++k) {
            s(k) = 3.0 * g.normal();
        }
        const MomentReport rep = moment_report(s, 1, 7000 + trial);
        REQUIRE(rep.kurtosis_ratio <= 13.0 + 1e-12);
        REQUIRE(rep.second_exact >= s.squaredNorm() - 1e-12 * s.squaredNorm());
    }
}

TEST_CASE("eta concentration statistic") {
    SECTION("zero noise gives zero deviation") {
        const ConcentrationSummary sum =
            noise_concentration_report(8, 100, Eigen::VectorXd::Zero(100), 5, 1);
        REQUIRE(sum.max_deviation == 0.0);
    }
    SECTION("all-ones noise: scaled statistic bounded, averaged form shrinking") {
        // the scaled ratio tends to a constant (~2 for eta = ones);
        // the law-of-large-numbers form ||(1/m) sum (aa* - I)|| must shrink
        const Index d = 16;
        double prev_lln = std::numeric_limits<double>::infinity();
        for (Index m : {1000, 10000, 100000}) {
            const ConcentrationSummary sum = noise_concentration_report(
                d, m, Eigen::VectorXd::Ones(m), 5, 1000 + m);
            REQUIRE(sum.max_deviation <= 3.0);
            const double denom = std::sqrt(double(d)) * std::sqrt(double(m)) + d;
            const double lln = sum.mean_deviation * denom / double(m);
            REQUIRE(lln < prev_lln);
            prev_lln = lln;
        }
    }
}

TEST_CASE("v concentration at large m stays within delta = 0.1") {
    const Index d = 16;
    ComplexSignal v = ComplexSignal::Zero(d);
    v(0) = 1.0;
    const ConcentrationSummary sum = signal_concentration_report(d, 100000, v, 20, 2024);
    REQUIRE(sum.max_deviation <= 0.1);
    REQUIRE(sum.n_trials == 20);
}

TEST_CASE("optimality audits") {
    const Index d = 32;
    const Index m = 50 * d;
    const ComplexSignal x0 = sample_complex_signal(d, 81);
    const SensingEnsemble e = sample_ensemble(d, m, 82);
    const auto meas = measure(e, x0, NoiseSpec::zero(), 0);

    SECTION("exact solution passes with zero residual") {
        const AuditReport rep =
            optimality_audit(e, meas.b, x0, x0, *meas.eta);
        REQUIRE(rep.residual_ok);
        REQUIRE(rep.residual_norm == 0.0);
        REQUIRE_THAT(rep.fourth_power_ratio, Catch::Matchers::WithinAbs(2.0, 0.2));
        REQUIRE(rep.fourth_ok);
        REQUIRE_FALSE(rep.cone_ok.has_value());
    }

    SECTION("inconsistent truth is rejected") {
        Eigen::VectorXd eta = *meas.eta;
        eta(3) = 5.0;
        REQUIRE_THROWS_AS(optimality_audit(e, meas.b, x0, x0, eta),
                          std::invalid_argument);
    }
}

TEST_CASE("cone audit on a constrained sparse solve") {
    const Index d = 64;
    const Index s = 5;
    ComplexSignal x0 = ComplexSignal::Zero(d);
    GaussianStream g(91);
    for (Index k = 0; k < s; ++k) {
        x0(k * 11) = g.normal();
    }
    const double radius = x0.lpNorm<1>();
    const SensingEnsemble e = sample_ensemble(d, 12 * d, 92);
    const auto meas = measure(e, x0, NoiseSpec::gaussian(1.0, 1.0), 93);
    SolverConfig cfg;
    cfg.init = InitSparseSpectral{s};
    cfg.l1_radius = radius;
    const SolveResult sol = wirtinger_flow(e, meas.b, cfg);
    const AuditReport rep = optimality_audit(e, meas.b, sol.estimate, x0,
                                             *meas.eta, radius, s);
    REQUIRE(rep.cone_ok.has_value());
    REQUIRE(*rep.cone_ok);
}

// the full battery (criterion thresholds) runs in the acceptance suite; here
// only the cheap members, to keep this binary quick
TEST_CASE("fast battery members pass") {
    const std::uint64_t seed = 20260810;
    const TheoryCheck adj = battery::adjointness_check(seed);
    CAPTURE(adj.value);
    REQUIRE(adj.pass);
    const TheoryCheck ident = battery::moment_identity_check(seed);
    REQUIRE(ident.pass);
    const TheoryCheck pairs = battery::realified_pairs_check(seed);
    REQUIRE(pairs.pass);
}
