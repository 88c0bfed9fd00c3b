// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "phaselens/objective.hpp"
#include "phaselens/solvers.hpp"

using namespace phaselens;

namespace {

// direct summation oracle: no Eigen reductions, no compensation
double loss_by_hand(const SensingEnsemble& e, const Eigen::VectorXd& b,
                    const ComplexSignal& x) {
    double total = 0.0;
    for (Index j = 0; j < e.m(); ++j) {
        std::complex<double> ip = 0.0;
        for (Index i = 0; i < e.d(); ++i) {
            ip += std::conj(e.rows()(j, i)) * x(i);
        }
        const double r = std::norm(ip) - b(j);
        total += r * r;
    }
    return total;
}

double central_difference(const SensingEnsemble& e, const Eigen::VectorXd& b,
                          const ComplexSignal& x, const ComplexSignal& w,
                          double h) {
    return (intensity_loss(e, b, x + h * w) - intensity_loss(e, b, x - h * w)) /
           (2.0 * h);
}

}  // namespace

TEST_CASE("intensity_loss vanishes at the noiseless truth") {
    const SensingEnsemble e = sample_ensemble(6, 30, 1);
    const ComplexSignal x0 = sample_complex_signal(6, 2);
    const auto meas = measure(e, x0, NoiseSpec::zero(), 0);
    REQUIRE(intensity_loss(e, meas.b, x0) == 0.0);
}

TEST_CASE("intensity_loss at zero equals sum of squared measurements") {
    const SensingEnsemble e = sample_ensemble(4, 12, 3);
    const ComplexSignal x0 = sample_complex_signal(4, 4);
    const auto meas = measure(e, x0, NoiseSpec::gaussian(1.0, 1.0), 5);
    REQUIRE_THAT(intensity_loss(e, meas.b, ComplexSignal::Zero(4)),
                 Catch::Matchers::WithinRel(meas.b.squaredNorm(), 1e-12));
}

TEST_CASE("intensity_loss matches a hand-summed computation") {
    const SensingEnsemble e = sample_ensemble(2, 3, 6);
    const ComplexSignal x = sample_complex_signal(2, 7);
    Eigen::VectorXd b(3);
    b << 0.5, 2.0, -1.0;
    REQUIRE_THAT(intensity_loss(e, b, x),
                 Catch::Matchers::WithinRel(loss_by_hand(e, b, x), 1e-12));
    REQUIRE_THROWS_AS(intensity_loss(e, Eigen::VectorXd::Zero(4), x),
                      std::invalid_argument);
}

TEST_CASE("loss is phase invariant") {
    const SensingEnsemble e = sample_ensemble(5, 20, 8);
    const ComplexSignal x = sample_complex_signal(5, 9);
    const ComplexSignal x0 = sample_complex_signal(5, 10);
    const auto meas = measure(e, x0, NoiseSpec::gaussian(0.0, 1.0), 11);
    const double f0 = intensity_loss(e, meas.b, x);
    GaussianStream g(12);
    for (int k = 0; k < 10; ++k) {
        const double theta = 2.0 * M_PI * g.uniform();
        const double f1 = intensity_loss(e, meas.b, std::polar(1.0, theta) * x);
        REQUIRE_THAT(f1, Catch::Matchers::WithinRel(f0, 1e-12));
    }
}

TEST_CASE("loss scales quartically when b = 0") {
    const SensingEnsemble e = sample_ensemble(5, 15, 13);
    const ComplexSignal x = sample_complex_signal(5, 14);
    const Eigen::VectorXd b = Eigen::VectorXd::Zero(15);
    const double f1 = intensity_loss(e, b, x);
    for (double c : {0.5, 2.0, 7.25}) {
        REQUIRE_THAT(intensity_loss(e, b, c * x),
                     Catch::Matchers::WithinRel(c * c * c * c * f1, 1e-10));
    }
}

TEST_CASE("wirtinger_gradient vanishes at the minimizer and at zero") {
    const SensingEnsemble e = sample_ensemble(7, 35, 15);
    const ComplexSignal x0 = sample_complex_signal(7, 16);
    const auto meas = measure(e, x0, NoiseSpec::zero(), 0);
    REQUIRE(wirtinger_gradient(e, meas.b, x0).norm() <= 1e-12 * meas.b.norm());
    REQUIRE(wirtinger_gradient(e, meas.b, ComplexSignal::Zero(7)).norm() == 0.0);
}

TEST_CASE("gradient matches realified central finite differences") {
    GaussianStream g(17);
    for (int trial = 0; trial < 25; ++trial) {
        const Index d = 2 + static_cast<Index>(g.below(7));
        const Index m = d + static_cast<Index>(g.below(25));
        const SensingEnsemble e = sample_ensemble(d, m, 500 + trial);
        const ComplexSignal x0 = sample_complex_signal(d, 600 + trial);
        const auto meas = measure(e, x0, NoiseSpec::gaussian(0.5, 1.0), 700 + trial);
        const ComplexSignal x = sample_complex_signal(d, 800 + trial);
        const ComplexSignal grad = wirtinger_gradient(e, meas.b, x);

        ComplexSignal w(d);
        for (Index i = 0; i < d; ++i) {
            w(i) = g.complex_gaussian();
        }
        w.normalize();

        const double h = 1e-5 * (1.0 + x.norm());
        const double fd = central_difference(e, meas.b, x, w, h);
        const double dd = directional_derivative(grad, w);
        REQUIRE_THAT(dd, Catch::Matchers::WithinAbs(fd, 1e-6 * (1.0 + std::abs(fd))));
    }
}

TEST_CASE("first_order_report diagnostics at distinguished points") {
    const SensingEnsemble e = sample_ensemble(6, 40, 18);
    const ComplexSignal x0 = sample_complex_signal(6, 19);

    SECTION("x = 0 has zero radial derivative") {
        const auto meas = measure(e, x0, NoiseSpec::gaussian(1.0, 1.0), 20);
        const auto rep = first_order_report(e, meas.b, ComplexSignal::Zero(6));
        REQUIRE(rep.radial_derivative == 0.0);
        REQUIRE_FALSE(rep.stationarity_gap.has_value());
    }

    SECTION("noiseless truth zeroes all three diagnostics") {
        const auto meas = measure(e, x0, NoiseSpec::zero(), 0);
        const auto rep = first_order_report(e, meas.b, x0,
                                            GroundTruth{x0, *meas.eta});
        REQUIRE(rep.loss == 0.0);
        REQUIRE(rep.grad_norm <= 1e-12 * meas.b.norm());
        REQUIRE(std::abs(rep.radial_derivative) <= 1e-12 * meas.b.squaredNorm());
        REQUIRE(std::abs(*rep.stationarity_gap) <= 1e-12 * meas.b.squaredNorm());
    }

    SECTION("inconsistent truth is rejected") {
        const auto meas = measure(e, x0, NoiseSpec::gaussian(1.0, 1.0), 21);
        Eigen::VectorXd wrong_eta = *meas.eta;
        wrong_eta(0) += 1.0;
        REQUIRE_THROWS_AS(
            first_order_report(e, meas.b, x0, GroundTruth{x0, wrong_eta}),
            std::invalid_argument);
    }
}

TEST_CASE("stationarity identity holds at converged solutions") {
    const Index d = 24;
    const Index m = 16 * d;
    const SensingEnsemble e = sample_ensemble(d, m, 22);
    const ComplexSignal x0 = sample_complex_signal(d, 23);
    const auto meas = measure(e, x0, NoiseSpec::gaussian(1.0, 1.0), 24);

    SolverConfig cfg;
    const SolveResult sol = wirtinger_flow(e, meas.b, cfg);
    REQUIRE(sol.converged);

    const auto rep = first_order_report(e, meas.b, sol.estimate,
                                        GroundTruth{x0, *meas.eta});
    const Eigen::VectorXd ip2 = e.inner_products(sol.estimate).cwiseAbs2();
    const double quartic_scale = ip2.squaredNorm() / static_cast<double>(m);
    REQUIRE(std::abs(*rep.stationarity_gap) <= 1e-6 * quartic_scale);
    REQUIRE(std::abs(rep.radial_derivative) <=
            1e-6 * quartic_scale * static_cast<double>(m));
}
