// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "phaselens/core.hpp"
#include "phaselens/solvers.hpp"
#include "phaselens/theory.hpp"

namespace phaselens {

struct TheoryCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;      // observed statistic (worst case over the check)
    double threshold = 0.0;  // the bound it is compared against
    std::string detail;
};

namespace battery {

// Pinned constants for the certification battery.
inline constexpr double kAdjointTol = 1e-10;
inline constexpr double kMomentSecondRelTol = 0.01;
inline constexpr double kMomentFourthRelTol = 0.03;
inline constexpr double kKurtosisBound = 13.0;
inline constexpr double kSmallBallFloor = 1.0 / 52.0;
inline constexpr double kRankOneExceedProb = 0.49306869139523979;  // e^{-1/sqrt(2)}
inline constexpr double kRankOneProbTol = 0.01;
inline constexpr double kLripFloor = 0.3;
inline constexpr double kDualNormFactor = 4.0;  // w_proxy <= 4 sqrt(d)
inline constexpr double kSunjuDelta = 0.1;

inline TheoryCheck adjointness_check(std::uint64_t seed) {
    const Index d = 16;
    const Index m = 64;
    GaussianStream g(derive_seed(seed, 0x616470ULL));
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const SensingEnsemble ens = sample_ensemble(
            d, m, derive_seed(seed, 0x616465ULL, static_cast<std::uint64_t>(trial)));
        Eigen::MatrixXcd raw = detail::random_complex_matrix(d, d, g);
        const HermitianMatrix h = hermitian_part(raw);
        Eigen::VectorXd z(m);
        for (Index j = 0; j < m; ++j) {
            z(j) = g.normal();
        }
        const double lhs = lift_apply(ens, h).dot(z);
        const double rhs =
            (h.matrix().adjoint() * lift_adjoint(ens, z).matrix()).trace().real();
        const double gap = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
        worst = std::max(worst, gap);
    }
    return {"adjointness", worst <= kAdjointTol, worst, kAdjointTol,
            "max scaled |<A(H),z> - <H,A*(z)>| over 100 pairs"};
}

inline std::vector<Eigen::VectorXd> moment_test_spectra(std::uint64_t seed) {
    std::vector<Eigen::VectorXd> spectra;
    Eigen::VectorXd one(1);
    one << 1.0;
    spectra.push_back(one);
    Eigen::VectorXd pm(2);
    pm << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    spectra.push_back(pm);
    GaussianStream g(derive_seed(seed, 0x737063ULL));
    for (int i = 0; i < 20; ++i) {
        const Index len = 1 + static_cast<Index>(g.below(6));
        Eigen::VectorXd s(len);
        for (Index k = 0; k < len; ++k) {
            s(k) = g.normal();
        }
        s /= s.norm();
        spectra.push_back(s);
    }
    return spectra;
}

inline TheoryCheck moment_identity_check(std::uint64_t seed) {
    double worst_kurtosis = 0.0;
    bool lower_ok = true;
    for (const auto& s : moment_test_spectra(seed)) {
        const MomentReport rep = moment_report(s, 1, derive_seed(seed, 1));
        worst_kurtosis = std::max(worst_kurtosis, rep.kurtosis_ratio);
        if (rep.second_exact < s.squaredNorm() - 1e-12) {
            lower_ok = false;
        }
    }
    return {"moment-identities", lower_ok && worst_kurtosis <= kKurtosisBound,
            worst_kurtosis, kKurtosisBound,
            "kurtosis ratio <= 13 and E|a*Ha|^2 >= ||H||_F^2, 22 spectra"};
}

inline TheoryCheck moment_montecarlo_check(std::uint64_t seed, Index n_mc = 1000000) {
    double worst = 0.0;
    bool pass = true;
    int idx = 0;
    for (const auto& s : moment_test_spectra(seed)) {
        const MomentReport rep =
            moment_report(s, n_mc, derive_seed(seed, 0x6d6d63ULL,
                                               static_cast<std::uint64_t>(idx++)));
        const double rel2 =
            std::abs(rep.second_mc - rep.second_exact) / rep.second_exact;
        const double rel4 =
            std::abs(rep.fourth_mc - rep.fourth_exact) / rep.fourth_exact;
        worst = std::max({worst, rel2 / kMomentSecondRelTol, rel4 / kMomentFourthRelTol});
        pass = pass && rel2 <= kMomentSecondRelTol && rel4 <= kMomentFourthRelTol;
    }
    return {"moment-montecarlo", pass, worst, 1.0,
            "worst relative error / tolerance (2nd to 1%, 4th to 3%)"};
}

inline TheoryCheck small_ball_check(std::uint64_t seed) {
    const Index n_mc = 100000;
    const SmallBallProfile prof = small_ball_profile(16, 2, n_mc, 50, seed);
    const double sigma = std::sqrt(0.25 / static_cast<double>(n_mc));
    const double floor = kSmallBallFloor - 3.0 * sigma;
    return {"small-ball-qhat", prof.q_hat >= floor, prof.q_hat, floor,
            "min empirical P(|a*Ha| >= 1/sqrt(2)) over 50 rank-<=2 H"};
}

inline TheoryCheck small_ball_rank_one_check(std::uint64_t seed) {
    const Index n_mc = 100000;
    GaussianStream g(derive_seed(seed, 0x736231ULL));
    Index count = 0;
    const double threshold = 1.0 / std::sqrt(2.0);
    for (Index n = 0; n < n_mc; ++n) {
        if (std::norm(g.complex_gaussian()) >= threshold) {
            ++count;
        }
    }
    const double p_hat = static_cast<double>(count) / static_cast<double>(n_mc);
    const double err = std::abs(p_hat - kRankOneExceedProb);
    return {"small-ball-rank1", err <= kRankOneProbTol, p_hat, kRankOneExceedProb,
            "P(|a*v|^2 >= 1/sqrt(2)) vs exp(-1/sqrt(2)), tol 0.01"};
}

inline TheoryCheck lrip_check(std::uint64_t seed) {
    const Index d = 16;
    const Index r = 2;
    const Index m = 20 * d * r;
    double worst = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k < 5; ++k) {
        const LripEstimate est =
            empirical_lrip(d, r, m, 500, derive_seed(seed, 0x6c7235ULL, k));
        worst = std::min(worst, est.min_ratio);
    }
    return {"lrip-min-ratio", worst >= kLripFloor, worst, kLripFloor,
            "min ||A(H)||/(sqrt(m)||H||_F), d=16 r=2 m=20dr, 500 samples x 5 seeds"};
}

inline TheoryCheck dual_norm_check(std::uint64_t seed) {
    const Index d = 32;
    const SmallBallProfile prof = small_ball_profile(d, 1, 1, 50, seed);
    const double bound = kDualNormFactor * std::sqrt(static_cast<double>(d));
    return {"dual-norm-bound", prof.w_proxy <= bound, prof.w_proxy, bound,
            "mean ||A*(eps)||/sqrt(m) at d=32, m=20d, 50 draws"};
}

inline TheoryCheck concentration_v_check(std::uint64_t seed) {
    const Index d = 16;
    ComplexSignal v = ComplexSignal::Zero(d);
    v(0) = 1.0;
    const ConcentrationSummary sum =
        signal_concentration_report(d, 100000, v, 20, derive_seed(seed, 0x636e76ULL));
    return {"concentration-v", sum.max_deviation <= kSunjuDelta, sum.max_deviation,
            kSunjuDelta,
            "max ||(1/m)sum|a*v|^2 aa* - (vv*+I)|| / ||v||^2, m=1e5, 20 trials"};
}

inline TheoryCheck concentration_eta_check(std::uint64_t seed) {
    // the scaled ratio stays below a constant while the averaged form
    // ||(1/m) sum (aa* - I)|| shrinks with m
    const Index d = 16;
    double worst_ratio = 0.0;
    double prev_lln = std::numeric_limits<double>::infinity();
    bool shrinking = true;
    for (Index m : {1000, 10000, 100000}) {
        const Eigen::VectorXd eta = Eigen::VectorXd::Ones(m);
        const ConcentrationSummary sum = noise_concentration_report(
            d, m, eta, 5, derive_seed(seed, 0x636e65ULL, static_cast<std::uint64_t>(m)));
        worst_ratio = std::max(worst_ratio, sum.max_deviation);
        const double denom = std::sqrt(static_cast<double>(d)) * std::sqrt(static_cast<double>(m)) +
                             static_cast<double>(d);
        const double lln = sum.mean_deviation * denom / static_cast<double>(m);
        shrinking = shrinking && lln < prev_lln;
        prev_lln = lln;
    }
    return {"concentration-eta", shrinking && worst_ratio <= 3.0, worst_ratio, 3.0,
            "scaled ratio bounded and averaged deviation shrinking, m = 1e3..1e5"};
}

inline TheoryCheck realified_pairs_check(std::uint64_t seed) {
    const Index d = 8;
    const Index pairs = 100000;
    const SensingEnsemble ens =
        sample_ensemble(d, 2 * pairs, derive_seed(seed, 0x726c66ULL));
    const RealifiedSystem sys = realify(ens);
    const double mean_dot =
        (sys.beta.cwiseProduct(sys.gamma)).rowwise().sum().mean();
    const Eigen::RowVectorXd var_beta = sys.beta.cwiseAbs2().colwise().mean();
    const double worst_var = (var_beta.array() - 1.0).abs().maxCoeff();
    const double dot_tol = 0.05 * static_cast<double>(2 * d);
    const bool pass = std::abs(mean_dot) <= dot_tol && worst_var <= 0.02;
    return {"realified-pairs", pass, worst_var, 0.02,
            "per-coordinate |var(beta)-1| and mean <beta,gamma> ~ 0, 1e5 pairs"};
}

}  // namespace battery

/// The Monte-Carlo certification battery behind the `theory` subcommand.
/// Thresholds are the pinned constants above.
inline std::vector<TheoryCheck> run_theory_battery(std::uint64_t seed) {
    std::vector<TheoryCheck> checks;
    checks.push_back(battery::adjointness_check(seed));
    checks.push_back(battery::moment_identity_check(seed));
    checks.push_back(battery::moment_montecarlo_check(seed));
    checks.push_back(battery::small_ball_check(seed));
    checks.push_back(battery::small_ball_rank_one_check(seed));
    checks.push_back(battery::lrip_check(seed));
    checks.push_back(battery::dual_norm_check(seed));
    checks.push_back(battery::concentration_v_check(seed));
    checks.push_back(battery::concentration_eta_check(seed));
    checks.push_back(battery::realified_pairs_check(seed));
    return checks;
}

}  // namespace phaselens
