// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "phaselens/core.hpp"

namespace phaselens {

struct PhaseDistance {
    double dist = 0.0;
    double theta_star = 0.0;  // in [0, 2*pi)
};

/// min over theta of ||u - e^{i theta} v||, attained at
/// theta* = arg<v, u> (taken as 0 when <v, u> = 0):
/// dist^2 = ||u||^2 + ||v||^2 - 2|<v, u>|.
inline PhaseDistance dist_up_to_phase(const ComplexSignal& u,
                                      const ComplexSignal& v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("dist_up_to_phase: dimension mismatch");
    }
    const std::complex<double> vu = v.dot(u);  // v^* u
    PhaseDistance out;
    if (vu != std::complex<double>(0.0, 0.0)) {
        out.theta_star = std::arg(vu);
        if (out.theta_star < 0.0) {
            out.theta_star += 2.0 * M_PI;
        }
    }
    const double d2 = u.squaredNorm() + v.squaredNorm() - 2.0 * std::abs(vu);
    out.dist = std::sqrt(std::max(d2, 0.0));
    return out;
}

struct ErrorReport {
    double dist = 0.0;
    double theta_star = 0.0;
    std::optional<double> rho_m;  // unset when ||x0|| = 0
    double bound = 0.0;
    double lifted_dist = 0.0;
    bool inequality_ok = true;
};

/// Phase-invariant error, the normalized ratio
/// rho_m = dist / (||eta|| / (||x0|| sqrt(m))), the two-regime error bound
/// min{sqrt(||eta||)/m^{1/4}, ||eta||/(||x0|| sqrt(m))}, the lifted distance
/// ||x_hat x_hat^* - x0 x0^*||_F, and the check dist <= 2 lifted / ||x0||.
/// Noiseless convention: rho_m = 0, bound = 0.
inline ErrorReport error_report(const ComplexSignal& x_hat,
                                const ComplexSignal& x0,
                                const Eigen::VectorXd& eta, Index m) {
    if (eta.size() != m) {
        throw std::invalid_argument("error_report: eta length != m");
    }
    if (x_hat.size() != x0.size()) {
        throw std::invalid_argument("error_report: signal dimension mismatch");
    }
    const PhaseDistance pd = dist_up_to_phase(x_hat, x0);

    ErrorReport rep;
    rep.dist = pd.dist;
    rep.theta_star = pd.theta_star;

    const double eta_norm = eta.norm();
    const double x0_norm = x0.norm();
    const double sqrt_m = std::sqrt(static_cast<double>(m));
    if (eta_norm == 0.0) {
        if (x0_norm > 0.0) {
            rep.rho_m = 0.0;
        }
        rep.bound = 0.0;
    } else {
        const double per_measurement = eta_norm / sqrt_m;
        const double first = std::sqrt(eta_norm) / std::pow(static_cast<double>(m), 0.25);
        if (x0_norm > 0.0) {
            rep.rho_m = rep.dist / (per_measurement / x0_norm);
            rep.bound = std::min(first, per_measurement / x0_norm);
        } else {
            rep.bound = first;
        }
    }

    const Eigen::MatrixXcd lifted = x_hat * x_hat.adjoint() - x0 * x0.adjoint();
    rep.lifted_dist = lifted.norm();
    rep.inequality_ok =
        x0_norm == 0.0 ||
        rep.dist <= 2.0 * rep.lifted_dist / x0_norm + 1e-12 * (1.0 + rep.dist);
    return rep;
}

}  // namespace phaselens
