// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "phaselens/core.hpp"

namespace phaselens {

/// Neumaier-compensated sum; the loss mixes magnitudes across four powers
/// of the data, so straight accumulation loses digits for large m.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// f(x) = sum_j (|a_j^* x|^2 - b_j)^2.
inline double intensity_loss(const SensingEnsemble& ensemble,
                             const Eigen::VectorXd& b, const ComplexSignal& x) {
    if (b.size() != ensemble.m()) {
        throw std::invalid_argument("intensity_loss: measurement length != m");
    }
    const Eigen::VectorXcd ip = ensemble.inner_products(x);
    CompensatedSum acc;
    for (Index j = 0; j < b.size(); ++j) {
        const double r = std::norm(ip(j)) - b(j);
        acc.add(r * r);
    }
    return acc.value();
}

/// Wirtinger gradient of f with respect to the conjugate coordinate,
///   grad f(x) = 2 sum_j (|a_j^* x|^2 - b_j) a_j a_j^* x,
/// so the induced directional derivative along a direction w (in realified
/// coordinates) is 2 Re<grad f(x), w> and x <- x - mu*grad f(x) decreases f
/// to first order.
inline ComplexSignal wirtinger_gradient(const SensingEnsemble& ensemble,
                                        const Eigen::VectorXd& b,
                                        const ComplexSignal& x) {
    if (b.size() != ensemble.m()) {
        throw std::invalid_argument("wirtinger_gradient: measurement length != m");
    }
    const Eigen::VectorXcd ip = ensemble.inner_products(x);
    const Eigen::VectorXd w = ip.cwiseAbs2() - b;
    // 2 sum_j w_j (a_j^* x) a_j
    return 2.0 * (ensemble.rows().transpose() *
                  ip.cwiseProduct(w.cast<std::complex<double>>()));
}

/// Directional derivative of f at x along w, both read in the realified
/// coordinates: d/dh f(x + h w) = 2 Re<grad f(x), w>.
inline double directional_derivative(const ComplexSignal& grad,
                                     const ComplexSignal& w) {
    return 2.0 * grad.dot(w).real();
}

struct GroundTruth {
    ComplexSignal x0;
    Eigen::VectorXd eta;
};

/// First-order diagnostics at x. With ground truth supplied, the
/// stationarity gap is
///   (1/m) sum |a_j^* x|^4 - (1/m) sum |a_j^* x|^2 |a_j^* x0|^2
///                         - (1/m) sum eta_j |a_j^* x|^2,
/// which vanishes at any stationary point (it is Re<grad f, x> / (2m)
/// rewritten through b = |a^* x0|^2 + eta).
struct FirstOrderReport {
    double loss = 0.0;
    double grad_norm = 0.0;
    double radial_derivative = 0.0;
    std::optional<double> stationarity_gap;
};

inline FirstOrderReport first_order_report(
    const SensingEnsemble& ensemble, const Eigen::VectorXd& b,
    const ComplexSignal& x, const std::optional<GroundTruth>& truth = {}) {
    if (b.size() != ensemble.m()) {
        throw std::invalid_argument("first_order_report: measurement length != m");
    }
    const Eigen::VectorXcd ip = ensemble.inner_products(x);
    const Eigen::VectorXd ip2 = ip.cwiseAbs2();
    const Eigen::VectorXd resid = ip2 - b;

    FirstOrderReport rep;
    CompensatedSum loss_acc;
    for (Index j = 0; j < b.size(); ++j) {
        loss_acc.add(resid(j) * resid(j));
    }
    rep.loss = loss_acc.value();

    const ComplexSignal gradient =
        2.0 * (ensemble.rows().transpose() *
               resid.cast<std::complex<double>>().cwiseProduct(ip).matrix());
    rep.grad_norm = gradient.norm();
    rep.radial_derivative = gradient.dot(x).real();

    if (truth.has_value()) {
        if (truth->x0.size() != ensemble.d() || truth->eta.size() != ensemble.m()) {
            throw std::invalid_argument("first_order_report: truth shape mismatch");
        }
        const Eigen::VectorXd clean =
            ensemble.inner_products(truth->x0).cwiseAbs2();
        for (Index j = 0; j < b.size(); ++j) {
            const double expect = clean(j) + truth->eta(j);
            if (std::abs(b(j) - expect) > 1e-9 * (1.0 + std::abs(b(j)))) {
                throw std::invalid_argument(
                    "first_order_report: truth inconsistent with measurements");
            }
        }
        const double m = static_cast<double>(ensemble.m());
        CompensatedSum quartic, cross, noise;
        for (Index j = 0; j < b.size(); ++j) {
            quartic.add(ip2(j) * ip2(j));
            cross.add(ip2(j) * clean(j));
            noise.add(truth->eta(j) * ip2(j));
        }
        rep.stationarity_gap =
            (quartic.value() - cross.value() - noise.value()) / m;
    }
    return rep;
}

}  // namespace phaselens
