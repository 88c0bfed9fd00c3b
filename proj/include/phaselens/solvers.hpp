// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "phaselens/core.hpp"
#include "phaselens/objective.hpp"

namespace phaselens {

struct PowerIterationResult {
    double eigenvalue = 0.0;
    ComplexSignal eigenvector;
    int iterations = 0;
    bool converged = false;
};

/// Dominant-in-magnitude eigenpair of a self-adjoint matrix. Stops when
/// ||H v - lambda v|| <= tol * ||H||_F; non-convergence is flagged, not
/// thrown. The returned eigenvector has unit norm.
inline PowerIterationResult power_iteration(const HermitianMatrix& h, double tol,
                                            int max_iters, std::uint64_t seed) {
    const Index d = h.dim();
    const double h_fro = h.frobenius_norm();

    GaussianStream g(derive_seed(seed, 0x706f77ULL));  // "pow"
    ComplexSignal v(d);
    for (Index i = 0; i < d; ++i) {
        v(i) = g.complex_gaussian();
    }
    v.normalize();

    PowerIterationResult res;
    res.eigenvector = v;
    if (h_fro == 0.0) {
        res.converged = true;
        return res;
    }

    for (int t = 0; t < max_iters; ++t) {
        const ComplexSignal w = h.matrix() * v;
        const double lambda = v.dot(w).real();
        const double resid = (w - lambda * v).norm();
        res.eigenvalue = lambda;
        res.eigenvector = v;
        res.iterations = t;
        if (resid <= tol * h_fro) {
            res.converged = true;
            return res;
        }
        const double wn = w.norm();
        if (wn == 0.0) {
            // v is in the kernel; restart from a fresh direction
            for (Index i = 0; i < d; ++i) {
                v(i) = g.complex_gaussian();
            }
            v.normalize();
            continue;
        }
        v = w / wn;
    }
    res.iterations = max_iters;
    return res;
}

namespace detail {

/// Truncated spectral method on a raw measurement matrix (rows a_j^T).
/// Shared by the full and the support-restricted initializers.
inline ComplexSignal truncated_spectral_core(const Eigen::MatrixXcd& rows,
                                             const Eigen::VectorXd& b,
                                             std::uint64_t seed) {
    const Index m = rows.rows();
    const Index d = rows.cols();
    const double lambda2 = b.mean();
    constexpr double alpha = 3.0;  // truncation constant of the cited method
    const double cutoff = alpha * alpha * lambda2;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    Index kept = 0;
    for (Index j = 0; j < m; ++j) {
        if (b(j) <= cutoff) {
            w(j) = b(j) / static_cast<double>(m);
            ++kept;
        }
    }
    if (kept == 0) {
        throw std::invalid_argument(
            "truncated_spectral_init: truncation removed all measurements");
    }
    const HermitianMatrix y =
        hermitian_part(rows.transpose() * w.asDiagonal() * rows.conjugate());
    if (y.frobenius_norm() == 0.0) {
        return ComplexSignal::Zero(d);
    }
    const PowerIterationResult top =
        power_iteration(y, 1e-9, 2000, derive_seed(seed, 0x696e69ULL));
    return std::sqrt(std::max(lambda2, 0.0)) * top.eigenvector;
}

}  // namespace detail

/// z0 = sqrt(mean b) * v with v the leading eigenvector of
/// Y = (1/m) sum b_j a_j a_j^* 1{b_j <= 9 * mean b}.
inline ComplexSignal truncated_spectral_init(const SensingEnsemble& ensemble,
                                             const Eigen::VectorXd& b) {
    if (b.size() != ensemble.m()) {
        throw std::invalid_argument("truncated_spectral_init: measurement length != m");
    }
    return detail::truncated_spectral_core(ensemble.rows(), b, ensemble.seed());
}

/// Support estimate from the per-coordinate scores (1/m) sum_j b_j |a_ji|^2
/// (largest s_est scores, ties to the lower index), then the truncated
/// spectral method restricted to those columns, zero elsewhere.
inline ComplexSignal sparse_spectral_init(const SensingEnsemble& ensemble,
                                          const Eigen::VectorXd& b, Index s_est) {
    const Index d = ensemble.d();
    const Index m = ensemble.m();
    if (b.size() != m) {
        throw std::invalid_argument("sparse_spectral_init: measurement length != m");
    }
    if (s_est < 1 || s_est > d) {
        throw std::invalid_argument("sparse_spectral_init: s_est out of range");
    }
    if (s_est == d) {
        return truncated_spectral_init(ensemble, b);
    }
    const Eigen::VectorXd scores =
        (ensemble.rows().cwiseAbs2().transpose() * b) / static_cast<double>(m);

    std::vector<Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index c) { return scores(a) > scores(c); });
    std::vector<Index> support(order.begin(), order.begin() + s_est);
    std::sort(support.begin(), support.end());

    Eigen::MatrixXcd restricted(m, s_est);
    for (Index k = 0; k < s_est; ++k) {
        restricted.col(k) = ensemble.rows().col(support[static_cast<std::size_t>(k)]);
    }
    const ComplexSignal sub =
        detail::truncated_spectral_core(restricted, b, ensemble.seed());

    ComplexSignal out = ComplexSignal::Zero(d);
    for (Index k = 0; k < s_est; ++k) {
        out(support[static_cast<std::size_t>(k)]) = sub(k);
    }
    return out;
}

/// Euclidean projection onto {z : sum_i |z_i| <= R}. Phases are preserved;
/// the magnitude vector is projected onto the real l1-ball by the
/// sort-and-threshold rule. Inputs already inside the ball (up to a
/// 16-ulp relative slack, which makes the projection exactly idempotent)
/// are returned unchanged.
inline ComplexSignal project_l1_ball(const ComplexSignal& x, double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("project_l1_ball: radius must be positive");
    }
    const Eigen::VectorXd mags = x.cwiseAbs();
    const double l1 = mags.sum();
    constexpr double slack = 16.0 * std::numeric_limits<double>::epsilon();
    if (l1 <= radius * (1.0 + slack)) {
        return x;
    }

    const Index d = x.size();
    std::vector<Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index c) { return mags(a) > mags(c); });

    // largest k with mu_(k) - (prefix_k - R)/k > 0 gives the threshold
    double prefix = 0.0;
    double tau = 0.0;
    for (Index k = 0; k < d; ++k) {
        const double mu_k = mags(order[static_cast<std::size_t>(k)]);
        prefix += mu_k;
        const double candidate = (prefix - radius) / static_cast<double>(k + 1);
        if (mu_k - candidate > 0.0) {
            tau = candidate;
        } else {
            break;
        }
    }

    ComplexSignal out(d);
    for (Index i = 0; i < d; ++i) {
        const double mi = mags(i);
        out(i) = (mi > tau) ? x(i) * ((mi - tau) / mi) : std::complex<double>(0.0, 0.0);
    }
    return out;
}

struct StepSchedule {
    double t0 = 330.0;
    double mu_max = 0.2;
};
struct StepFixed {
    double mu = 1e-3;
};
struct StepBacktracking {
    double shrink = 0.5;
    int max_halvings = 40;
};
using StepRule = std::variant<StepSchedule, StepFixed, StepBacktracking>;

struct InitTruncatedSpectral {};
struct InitSparseSpectral {
    Index s_est = 1;
};
struct InitProvided {
    ComplexSignal point;
};
using InitKind = std::variant<InitTruncatedSpectral, InitSparseSpectral, InitProvided>;

struct SolverConfig {
    int max_iters = 2500;
    double grad_tol = 1e-9;
    StepRule step_rule = StepSchedule{};
    std::optional<double> l1_radius;
    InitKind init = InitTruncatedSpectral{};
};

struct SolveResult {
    ComplexSignal estimate;
    int iterations = 0;
    std::vector<double> loss_trace;
    double final_grad_norm = 0.0;
    bool converged = false;
    ComplexSignal init_point;
};

/// Thrown when the loss goes non-finite; carries the offending iterate
/// index and the last finite iterate.
class SolverDivergedError : public std::runtime_error {
public:
    SolverDivergedError(int index, ComplexSignal last)
        : std::runtime_error("wirtinger_flow: non-finite loss at iterate " +
                             std::to_string(index)),
          iterate_index(index),
          last_finite(std::move(last)) {}

    int iterate_index;
    ComplexSignal last_finite;
};

/// Wirtinger Flow, optionally projected onto the l1-ball of the config
/// radius. Updates
///   z <- Pi(z - (mu_t / (2 m ||z0||^2)) * grad f(z))
/// under the schedule rule with mu_t = min(1 - exp(-t/t0), mu_max); the
/// fixed rule applies mu to the raw gradient and backtracking halves the
/// step until the loss decreases. Stops when
/// grad_norm <= grad_tol * (1 + loss), when the iterate stops moving
/// (a Pi-fixed point; counted as converged only for projected runs), or at
/// max_iters.
inline SolveResult wirtinger_flow(const SensingEnsemble& ensemble,
                                  const Eigen::VectorXd& b,
                                  const SolverConfig& config) {
    const Index m = ensemble.m();
    if (b.size() != m) {
        throw std::invalid_argument("wirtinger_flow: measurement length != m");
    }
    if (config.l1_radius && !(*config.l1_radius > 0.0)) {
        throw std::invalid_argument("wirtinger_flow: l1_radius must be positive");
    }

    ComplexSignal z = std::visit(
        [&](const auto& init) -> ComplexSignal {
            using T = std::decay_t<decltype(init)>;
            if constexpr (std::is_same_v<T, InitTruncatedSpectral>) {
                return truncated_spectral_init(ensemble, b);
            } else if constexpr (std::is_same_v<T, InitSparseSpectral>) {
                return sparse_spectral_init(ensemble, b, init.s_est);
            } else {
                if (init.point.size() != ensemble.d()) {
                    throw std::invalid_argument(
                        "wirtinger_flow: provided init has wrong dimension");
                }
                return init.point;
            }
        },
        config.init);
    if (config.l1_radius) {
        z = project_l1_ball(z, *config.l1_radius);
    }

    SolveResult res;
    res.init_point = z;
    res.loss_trace.reserve(static_cast<std::size_t>(config.max_iters) + 1);
    const double z0_norm2 = z.squaredNorm();
    const double md = static_cast<double>(m);

    double runaway = std::numeric_limits<double>::infinity();
    for (int t = 0;; ++t) {
        const Eigen::VectorXcd ip = ensemble.inner_products(z);
        const Eigen::VectorXd resid = ip.cwiseAbs2() - b;
        CompensatedSum loss_acc;
        for (Index j = 0; j < m; ++j) {
            loss_acc.add(resid(j) * resid(j));
        }
        const double loss = loss_acc.value();
        // A runaway iterate would satisfy the gradient rule spuriously: the
        // loss grows two powers of ||z|| faster than the gradient, so
        // grad/(1+loss) -> 0 along divergence. Abort well before overflow.
        if (!std::isfinite(loss) || loss > runaway) {
            throw SolverDivergedError(t, res.estimate.size() ? res.estimate : res.init_point);
        }
        if (t == 0) {
            runaway = 1e8 * (1.0 + loss);
        }
        const ComplexSignal grad =
            2.0 * (ensemble.rows().transpose() *
                   ip.cwiseProduct(resid.cast<std::complex<double>>()));
        const double grad_norm = grad.norm();

        res.loss_trace.push_back(loss);
        res.estimate = z;
        res.final_grad_norm = grad_norm;
        res.iterations = t;

        if (grad_norm <= config.grad_tol * (1.0 + loss)) {
            res.converged = true;
            return res;
        }
        if (t == config.max_iters) {
            return res;
        }

        double step = 0.0;
        if (const auto* sched = std::get_if<StepSchedule>(&config.step_rule)) {
            // schedule indexed from 1: the very first step has mu > 0
            const double mu =
                std::min(1.0 - std::exp(-static_cast<double>(t + 1) / sched->t0),
                         sched->mu_max);
            step = mu / (2.0 * md * z0_norm2);
        } else if (const auto* fixed = std::get_if<StepFixed>(&config.step_rule)) {
            step = fixed->mu;
        } else {
            const auto& bt = std::get<StepBacktracking>(config.step_rule);
            double s = 1.0 / (2.0 * md * z0_norm2);
            bool accepted = false;
            for (int h = 0; h <= bt.max_halvings; ++h) {
                ComplexSignal trial = z - s * grad;
                if (config.l1_radius) {
                    trial = project_l1_ball(trial, *config.l1_radius);
                }
                if (intensity_loss(ensemble, b, trial) <= loss) {
                    accepted = true;
                    break;
                }
                s *= bt.shrink;
            }
            if (!accepted) {
                return res;  // no descent step available; loss trace stays monotone
            }
            step = s;
        }

        ComplexSignal next = z - step * grad;
        if (config.l1_radius) {
            next = project_l1_ball(next, *config.l1_radius);
            // Pi-fixed point: constrained stationarity, where the raw
            // gradient rule can never fire
            if ((next - z).norm() <= 1e-14 * (1.0 + z.norm())) {
                res.converged = true;
                return res;
            }
        }
        z = std::move(next);
    }
}

}  // namespace phaselens
