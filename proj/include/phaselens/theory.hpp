// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaselens/core.hpp"
#include "phaselens/metrics.hpp"
#include "phaselens/objective.hpp"

namespace phaselens {

/// Unit-Frobenius rank-<=r Hermitian sample in factored form:
/// H = basis * diag(spectrum) * basis^H with orthonormal columns and
/// ||spectrum|| = 1.
struct HermitianSample {
    Eigen::MatrixXcd basis;    // d x k, orthonormal columns
    Eigen::VectorXd spectrum;  // length k, unit norm
};

namespace detail {

inline Eigen::MatrixXcd random_complex_matrix(Index rows, Index cols,
                                              GaussianStream& g) {
    Eigen::MatrixXcd m(rows, cols);
    for (Index j = 0; j < rows; ++j) {
        for (Index i = 0; i < cols; ++i) {
            m(j, i) = g.complex_gaussian();
        }
    }
    return m;
}

inline Eigen::MatrixXcd orthonormal_columns(const Eigen::MatrixXcd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
}

/// Isotropic sample: random orthonormal basis, random unit spectrum.
inline HermitianSample sample_isotropic(Index d, Index r, GaussianStream& g) {
    HermitianSample s;
    s.basis = orthonormal_columns(random_complex_matrix(d, r, g));
    s.spectrum.resize(r);
    for (Index k = 0; k < r; ++k) {
        s.spectrum(k) = g.normal();
    }
    s.spectrum /= s.spectrum.norm();
    return s;
}

/// Difference-of-rank-ones sample (u u^* - w w^*)/||.||_F, re-expressed in
/// its two-dimensional eigenbasis so the factored form stays orthonormal.
inline HermitianSample sample_difference(Index d, GaussianStream& g) {
    const Eigen::MatrixXcd uw = random_complex_matrix(d, 2, g);
    const Eigen::MatrixXcd q = orthonormal_columns(uw);
    const Eigen::VectorXcd cu = q.adjoint() * uw.col(0);
    const Eigen::VectorXcd cw = q.adjoint() * uw.col(1);
    const Eigen::Matrix2cd small =
        cu * cu.adjoint() - cw * cw.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(small);
    HermitianSample s;
    s.basis = q * eig.eigenvectors();
    s.spectrum = eig.eigenvalues();
    s.spectrum /= s.spectrum.norm();
    return s;
}

/// Mix of isotropic spectra and difference-of-rank-ones; the difference
/// shape is the LRIP's binding direction (x x^* - x0 x0^*), so every other
/// draw uses it whenever r >= 2.
inline HermitianSample sample_rank_r(Index d, Index r, Index i, GaussianStream& g) {
    if (r >= 2 && (i % 2) == 1) {
        return sample_difference(d, g);
    }
    return sample_isotropic(d, r, g);
}

inline double operator_norm(const HermitianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h.matrix(),
                                                        Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

/// ||A(H)|| / (sqrt(m) ||H||_F) for a factored unit-Frobenius sample.
inline double lrip_ratio(const SensingEnsemble& ensemble,
                         const HermitianSample& sample) {
    const Eigen::MatrixXd p2 =
        (ensemble.rows().conjugate() * sample.basis).cwiseAbs2();
    const Eigen::VectorXd vals = p2 * sample.spectrum;
    return vals.norm() / std::sqrt(static_cast<double>(ensemble.m()));
}

struct LripEstimate {
    Index d = 0;
    Index r = 0;
    Index m = 0;
    Index n_samples = 0;
    double min_ratio = 0.0;
    std::uint64_t seed = 0;
};

/// Smallest observed ||A(H)||/(sqrt(m)||H||_F) over n_samples rank-<=r
/// unit-Frobenius Hermitian samples against one fresh ensemble.
inline LripEstimate empirical_lrip(Index d, Index r, Index m, Index n_samples,
                                   std::uint64_t seed) {
    if (r > d) {
        throw std::invalid_argument("empirical_lrip: r must be <= d");
    }
    if (n_samples < 1) {
        throw std::invalid_argument("empirical_lrip: need at least one sample");
    }
    const SensingEnsemble ensemble = sample_ensemble(d, m, derive_seed(seed, 0x6c7269ULL));
    GaussianStream g(derive_seed(seed, 0x6c7273ULL));
    double min_ratio = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n_samples; ++i) {
        const HermitianSample s = detail::sample_rank_r(d, r, i, g);
        min_ratio = std::min(min_ratio, lrip_ratio(ensemble, s));
    }
    return LripEstimate{d, r, m, n_samples, min_ratio, seed};
}

struct SmallBallProfile {
    double q_hat = 0.0;    // empirical inf_H P(|a^* H a| >= 1/sqrt(2))
    double w_proxy = 0.0;  // mean of ||A^*(eps)||/sqrt(m) over fresh draws
    Index n_mc = 0;
};

/// Empirical small-ball probability and the Rademacher-width proxy.
///
/// For each sampled H the quadratic form a^* H a equals
/// sum_k lambda_k |t_k|^2 where t_k are the coordinates of the fresh
/// Gaussian vector in the eigenbasis of H (themselves i.i.d. complex
/// Gaussian by unitary invariance), so the Monte-Carlo loop draws those
/// coordinates directly. The width proxy uses fresh ensembles of size
/// m = 20 d.
inline SmallBallProfile small_ball_profile(Index d, Index r, Index n_mc,
                                           Index n_h_samples, std::uint64_t seed) {
    if (r > d) {
        throw std::invalid_argument("small_ball_profile: r must be <= d");
    }
    constexpr double threshold = 0.70710678118654752440;  // 1/sqrt(2)

    GaussianStream hs(derive_seed(seed, 0x736268ULL));
    SmallBallProfile prof;
    prof.n_mc = n_mc;
    prof.q_hat = 1.0;
    for (Index i = 0; i < n_h_samples; ++i) {
        const HermitianSample s = detail::sample_rank_r(d, r, i, hs);
        const Index k = s.spectrum.size();
        GaussianStream mc(derive_seed(seed, 0x73626dULL, static_cast<std::uint64_t>(i)));
        Index count = 0;
        for (Index n = 0; n < n_mc; ++n) {
            double val = 0.0;
            for (Index j = 0; j < k; ++j) {
                val += s.spectrum(j) * std::norm(mc.complex_gaussian());
            }
            if (std::abs(val) >= threshold) {
                ++count;
            }
        }
        prof.q_hat = std::min(prof.q_hat,
                              static_cast<double>(count) / static_cast<double>(n_mc));
    }

    const Index m_w = 20 * d;
    double acc = 0.0;
    for (Index i = 0; i < n_h_samples; ++i) {
        const SensingEnsemble ens = sample_ensemble(
            d, m_w, derive_seed(seed, 0x777078ULL, static_cast<std::uint64_t>(i)));
        GaussianStream eps_g(derive_seed(seed, 0x777065ULL, static_cast<std::uint64_t>(i)));
        Eigen::VectorXd eps(m_w);
        for (Index j = 0; j < m_w; ++j) {
            eps(j) = eps_g.rademacher();
        }
        acc += detail::operator_norm(lift_adjoint(ens, eps)) /
               std::sqrt(static_cast<double>(m_w));
    }
    prof.w_proxy = acc / static_cast<double>(n_h_samples);
    return prof;
}

struct MomentReport {
    Eigen::VectorXd spectrum;
    double second_exact = 0.0;
    double second_mc = 0.0;
    double fourth_exact = 0.0;
    double fourth_mc = 0.0;
    double kurtosis_ratio = 0.0;
};

/// Exact and Monte-Carlo moments of a^* H a for H = diag(spectrum):
///   E (a^* H a)^2 = sum lambda^2 + (sum lambda)^2
///   E (a^* H a)^4 = S^4 + 6 ||H||_F^2 S^2 + 3 ||H||_F^4 + 8 S3 S + 6 S4
/// with S = sum lambda, S3 = sum lambda^3, S4 = sum lambda^4.
inline MomentReport moment_report(const Eigen::VectorXd& spectrum, Index n_mc,
                                  std::uint64_t seed) {
    if (spectrum.size() == 0) {
        throw std::invalid_argument("moment_report: spectrum must be non-empty");
    }
    MomentReport rep;
    rep.spectrum = spectrum;

    const double s1 = spectrum.sum();
    const double s2 = spectrum.squaredNorm();
    const double s3 = spectrum.array().cube().sum();
    const double s4 = spectrum.array().square().square().sum();
    rep.second_exact = s2 + s1 * s1;
    rep.fourth_exact = s1 * s1 * s1 * s1 + 6.0 * s2 * s1 * s1 + 3.0 * s2 * s2 +
                       8.0 * s3 * s1 + 6.0 * s4;
    rep.kurtosis_ratio = rep.fourth_exact / (rep.second_exact * rep.second_exact);

    GaussianStream g(derive_seed(seed, 0x6d6f6dULL));
    CompensatedSum acc2, acc4;
    const Index k = spectrum.size();
    for (Index n = 0; n < n_mc; ++n) {
        double val = 0.0;
        for (Index j = 0; j < k; ++j) {
            val += spectrum(j) * std::norm(g.complex_gaussian());
        }
        const double v2 = val * val;
        acc2.add(v2);
        acc4.add(v2 * v2);
    }
    rep.second_mc = acc2.value() / static_cast<double>(n_mc);
    rep.fourth_mc = acc4.value() / static_cast<double>(n_mc);
    return rep;
}

struct ConcentrationSummary {
    double max_deviation = 0.0;
    double mean_deviation = 0.0;
    int n_trials = 0;
};

/// max/mean over fresh ensembles of
/// ||sum_j eta_j (a_j a_j^* - I)|| / (sqrt(d)||eta|| + d ||eta||_inf).
inline ConcentrationSummary noise_concentration_report(Index d, Index m,
                                                        const Eigen::VectorXd& eta,
                                                 int n_trials, std::uint64_t seed) {
    if (eta.size() != m) {
        throw std::invalid_argument("noise_concentration_report: eta length != m");
    }
    ConcentrationSummary sum;
    sum.n_trials = n_trials;
    const double eta_norm = eta.norm();
    if (eta_norm == 0.0) {
        return sum;
    }
    const double denom = std::sqrt(static_cast<double>(d)) * eta_norm +
                         static_cast<double>(d) * eta.cwiseAbs().maxCoeff();
    for (int t = 0; t < n_trials; ++t) {
        const SensingEnsemble ens = sample_ensemble(
            d, m, derive_seed(seed, 0x657461ULL, static_cast<std::uint64_t>(t)));
        Eigen::MatrixXcd mat = lift_adjoint(ens, eta).matrix();
        mat.diagonal().array() -= eta.sum();
        const double dev = detail::operator_norm(hermitian_part(mat)) / denom;
        sum.max_deviation = std::max(sum.max_deviation, dev);
        sum.mean_deviation += dev / static_cast<double>(n_trials);
    }
    return sum;
}

/// max/mean over fresh ensembles of
/// ||(1/m) sum_j |a_j^* v|^2 a_j a_j^* - (v v^* + ||v||^2 I)|| / ||v||^2.
inline ConcentrationSummary signal_concentration_report(Index d, Index m,
                                                         const ComplexSignal& v,
                                                 int n_trials, std::uint64_t seed) {
    if (v.size() != d) {
        throw std::invalid_argument("signal_concentration_report: v dimension != d");
    }
    const double v2 = v.squaredNorm();
    if (v2 == 0.0) {
        throw std::invalid_argument("signal_concentration_report: v must be nonzero");
    }
    ConcentrationSummary sum;
    sum.n_trials = n_trials;
    for (int t = 0; t < n_trials; ++t) {
        const SensingEnsemble ens = sample_ensemble(
            d, m, derive_seed(seed, 0x766d6fULL, static_cast<std::uint64_t>(t)));
        const Eigen::VectorXd w =
            ens.inner_products(v).cwiseAbs2() / static_cast<double>(m);
        Eigen::MatrixXcd mat = lift_adjoint(ens, w).matrix();
        mat -= v * v.adjoint();
        mat.diagonal().array() -= v2;
        const double dev = detail::operator_norm(hermitian_part(mat)) / v2;
        sum.max_deviation = std::max(sum.max_deviation, dev);
        sum.mean_deviation += dev / static_cast<double>(n_trials);
    }
    return sum;
}

struct AuditReport {
    bool residual_ok = false;
    double residual_norm = 0.0;
    double eta_norm = 0.0;
    double fourth_power_ratio = 0.0;
    bool fourth_ok = false;
    std::optional<bool> cone_ok;
};

/// Post-hoc audits of a solver output against the ground truth:
///  - residual: ||A(x_hat x_hat^*) - b|| <= ||eta|| (global-minimizer test
///    against the feasible point x0),
///  - fourth power: (1/m) sum |a_j^* x_hat|^4 <= 3 ||x_hat||^4,
///  - cone (l1-constrained runs): with h the phase-aligned x_hat - x0 and
///    S = supp(x0), ||h_{S^c}||_1 <= ||h_S||_1 and ||h||_1 <= 2 sqrt(s)||h||.
inline AuditReport optimality_audit(const SensingEnsemble& ensemble,
                                    const Eigen::VectorXd& b,
                                    const ComplexSignal& x_hat,
                                    const ComplexSignal& x0,
                                    const Eigen::VectorXd& eta,
                                    std::optional<double> l1_radius = {},
                                    std::optional<Index> s = {}) {
    const Index m = ensemble.m();
    if (b.size() != m || eta.size() != m) {
        throw std::invalid_argument("optimality_audit: measurement length != m");
    }
    const Eigen::VectorXd clean = ensemble.inner_products(x0).cwiseAbs2();
    for (Index j = 0; j < m; ++j) {
        if (std::abs(b(j) - clean(j) - eta(j)) > 1e-9 * (1.0 + std::abs(b(j)))) {
            throw std::invalid_argument(
                "optimality_audit: (b, x0, eta) are inconsistent");
        }
    }
    constexpr double rel_tol = 1e-8;

    AuditReport rep;
    const Eigen::VectorXd fitted = ensemble.inner_products(x_hat).cwiseAbs2();
    rep.residual_norm = (fitted - b).norm();
    rep.eta_norm = eta.norm();
    rep.residual_ok =
        rep.residual_norm <= rep.eta_norm + rel_tol * (1.0 + b.norm());

    const double xh4 = std::pow(x_hat.squaredNorm(), 2);
    if (xh4 > 0.0) {
        CompensatedSum quartic;
        for (Index j = 0; j < m; ++j) {
            quartic.add(fitted(j) * fitted(j));
        }
        rep.fourth_power_ratio = quartic.value() / (static_cast<double>(m) * xh4);
    }
    rep.fourth_ok = rep.fourth_power_ratio <= 3.0 + rel_tol;

    if (l1_radius && s) {
        const PhaseDistance pd = dist_up_to_phase(x_hat, x0);
        const ComplexSignal h =
            x_hat - std::polar(1.0, pd.theta_star) * x0;
        double on_support = 0.0;
        double off_support = 0.0;
        for (Index i = 0; i < h.size(); ++i) {
            (x0(i) != std::complex<double>(0.0, 0.0) ? on_support : off_support) +=
                std::abs(h(i));
        }
        const double h1 = on_support + off_support;
        const double tol = rel_tol * (1.0 + h1);
        rep.cone_ok = off_support <= on_support + tol &&
                      h1 <= 2.0 * std::sqrt(static_cast<double>(*s)) * h.norm() + tol;
    }
    return rep;
}

}  // namespace phaselens
