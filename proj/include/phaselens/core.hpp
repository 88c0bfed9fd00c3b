// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

#include "phaselens/rng.hpp"

namespace phaselens {

using Index = Eigen::Index;

/// Signal / iterate / estimate in C^d.
using ComplexSignal = Eigen::VectorXcd;

/// d x d self-adjoint complex matrix. Construction tolerates an absolute
/// asymmetry of 1e-12 and stores the exactly Hermitian part (M + M*)/2,
/// so stored matrices satisfy X(i,k) == conj(X(k,i)) bitwise.
class HermitianMatrix {
public:
    explicit HermitianMatrix(const Eigen::MatrixXcd& m) {
        if (m.rows() != m.cols()) {
            throw std::invalid_argument("HermitianMatrix: matrix must be square");
        }
        const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (asym > 1e-12) {
            throw std::invalid_argument("HermitianMatrix: input is not self-adjoint");
        }
        entries_ = 0.5 * (m + m.adjoint());
    }

    static HermitianMatrix identity(Index d) {
        return HermitianMatrix(Eigen::MatrixXcd::Identity(d, d), exact_tag{});
    }

    /// diag(spectrum), real entries on the diagonal.
    static HermitianMatrix from_spectrum(const Eigen::VectorXd& spectrum) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(spectrum.size(), spectrum.size());
        m.diagonal() = spectrum.cast<std::complex<double>>();
        return HermitianMatrix(std::move(m), exact_tag{});
    }

    /// x x* (rank one, exactly Hermitian).
    static HermitianMatrix outer(const ComplexSignal& x) {
        Eigen::MatrixXcd m = x * x.adjoint();
        return HermitianMatrix(0.5 * (m + m.adjoint()), exact_tag{});
    }

    const Eigen::MatrixXcd& matrix() const noexcept { return entries_; }
    Index dim() const noexcept { return entries_.rows(); }

    double frobenius_norm() const { return entries_.norm(); }

    friend HermitianMatrix hermitian_part(const Eigen::MatrixXcd& m);

private:
    struct exact_tag {};
    HermitianMatrix(Eigen::MatrixXcd m, exact_tag) : entries_(std::move(m)) {}

    Eigen::MatrixXcd entries_;
};

/// (M + M*)/2 without the asymmetry check, for matrices that are Hermitian
/// by construction up to roundoff.
inline HermitianMatrix hermitian_part(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("hermitian_part: matrix must be square");
    }
    return HermitianMatrix(0.5 * (m + m.adjoint()), HermitianMatrix::exact_tag{});
}

/// m complex Gaussian measurement vectors a_j in C^d, regenerable from
/// (seed, m, d): row j of rows() is a_j^T, filled in row-major order with
/// one complex draw per entry.
class SensingEnsemble {
public:
    SensingEnsemble(Eigen::MatrixXcd rows, std::uint64_t seed)
        : rows_(std::move(rows)), seed_(seed) {}

    Index m() const noexcept { return rows_.rows(); }
    Index d() const noexcept { return rows_.cols(); }
    std::uint64_t seed() const noexcept { return seed_; }

    const Eigen::MatrixXcd& rows() const noexcept { return rows_; }
    ComplexSignal row(Index j) const { return rows_.row(j).transpose(); }

    /// (a_j^* x)_j for all j at once.
    Eigen::VectorXcd inner_products(const ComplexSignal& x) const {
        if (x.size() != d()) {
            throw std::invalid_argument("SensingEnsemble: signal dimension mismatch");
        }
        return rows_.conjugate() * x;
    }

private:
    Eigen::MatrixXcd rows_;  // m x d, row j = a_j^T
    std::uint64_t seed_;
};

/// i.i.d. entries 1/sqrt(2)*N(0,1) + i/sqrt(2)*N(0,1); deterministic in
/// (d, m, seed).
inline SensingEnsemble sample_ensemble(Index d, Index m, std::uint64_t seed) {
    if (d < 1 || m < 1) {
        throw std::invalid_argument("sample_ensemble: d and m must be positive");
    }
    GaussianStream g(derive_seed(seed, 0x656e73ULL));  // "ens"
    Eigen::MatrixXcd rows(m, d);
    for (Index j = 0; j < m; ++j) {
        for (Index i = 0; i < d; ++i) {
            rows(j, i) = g.complex_gaussian();
        }
    }
    return SensingEnsemble(std::move(rows), seed);
}

/// Standard complex Gaussian signal (same per-entry convention as the
/// measurement vectors).
inline ComplexSignal sample_complex_signal(Index d, std::uint64_t seed) {
    if (d < 1) {
        throw std::invalid_argument("sample_complex_signal: d must be positive");
    }
    GaussianStream g(derive_seed(seed, 0x736967ULL));  // "sig"
    ComplexSignal x(d);
    for (Index i = 0; i < d; ++i) {
        x(i) = g.complex_gaussian();
    }
    return x;
}

/// Noise model: exact zero, a fixed vector, or i.i.d. N(mean, std^2).
struct NoiseSpec {
    enum class Kind { Zero, Fixed, Gaussian };

    Kind kind = Kind::Zero;
    Eigen::VectorXd values;  // Fixed only
    double mean = 0.0;       // Gaussian only
    double std = 0.0;        // Gaussian only

    static NoiseSpec zero() { return {}; }

    static NoiseSpec fixed(Eigen::VectorXd v) {
        NoiseSpec n;
        n.kind = Kind::Fixed;
        n.values = std::move(v);
        return n;
    }

    static NoiseSpec gaussian(double mean, double std) {
        if (std < 0.0) {
            throw std::invalid_argument("NoiseSpec: std must be nonnegative");
        }
        NoiseSpec n;
        n.kind = Kind::Gaussian;
        n.mean = mean;
        n.std = std;
        return n;
    }
};

inline Eigen::VectorXd sample_noise(const NoiseSpec& noise, Index m,
                                    std::uint64_t noise_seed) {
    switch (noise.kind) {
        case NoiseSpec::Kind::Zero:
            return Eigen::VectorXd::Zero(m);
        case NoiseSpec::Kind::Fixed:
            if (noise.values.size() != m) {
                throw std::invalid_argument("NoiseSpec: fixed vector length != m");
            }
            return noise.values;
        case NoiseSpec::Kind::Gaussian: {
            GaussianStream g(derive_seed(noise_seed, 0x6e7a65ULL));  // "nze"
            Eigen::VectorXd eta(m);
            for (Index j = 0; j < m; ++j) {
                eta(j) = noise.mean + noise.std * g.normal();
            }
            return eta;
        }
    }
    throw std::logic_error("NoiseSpec: unreachable");
}

/// Observed intensities b = clean + eta, with the realized noise and the
/// clean part kept when ground truth is known.
struct IntensityMeasurements {
    Eigen::VectorXd b;
    std::optional<Eigen::VectorXd> eta;
    std::optional<Eigen::VectorXd> clean;
};

/// b_j = |a_j^* x0|^2 + eta_j; eta is drawn per spec, deterministic in
/// noise_seed.
inline IntensityMeasurements measure(const SensingEnsemble& ensemble,
                                     const ComplexSignal& x0,
                                     const NoiseSpec& noise,
                                     std::uint64_t noise_seed) {
    if (x0.size() != ensemble.d()) {
        throw std::invalid_argument("measure: signal dimension mismatch");
    }
    const Eigen::VectorXcd ip = ensemble.inner_products(x0);
    Eigen::VectorXd clean = ip.cwiseAbs2();
    Eigen::VectorXd eta = sample_noise(noise, ensemble.m(), noise_seed);
    IntensityMeasurements out;
    out.b = clean + eta;
    out.clean = std::move(clean);
    out.eta = std::move(eta);
    return out;
}

/// A(H) = (a_j^* H a_j)_j. The quadratic form of a self-adjoint matrix is
/// real; any floating-point imaginary residue must stay below
/// 1e-10 * (1 + |Re|) or the ensemble/matrix pair is considered corrupt.
inline Eigen::VectorXd lift_apply(const SensingEnsemble& ensemble,
                                  const HermitianMatrix& h) {
    if (h.dim() != ensemble.d()) {
        throw std::invalid_argument("lift_apply: dimension mismatch");
    }
    // a_j^* H a_j = sum_k (conj(a_j) H)_k a_jk, batched over rows
    const Eigen::MatrixXcd t = ensemble.rows().conjugate() * h.matrix();
    const Eigen::VectorXcd q = t.cwiseProduct(ensemble.rows()).rowwise().sum();
    Eigen::VectorXd out(ensemble.m());
    for (Index j = 0; j < ensemble.m(); ++j) {
        const double re = q(j).real();
        const double im = q(j).imag();
        if (std::abs(im) > 1e-10 * (1.0 + std::abs(re))) {
            throw std::runtime_error(
                "lift_apply: quadratic form has non-negligible imaginary part");
        }
        out(j) = re;
    }
    return out;
}

/// A*(z) = sum_j z_j a_j a_j*, exactly self-adjoint.
inline HermitianMatrix lift_adjoint(const SensingEnsemble& ensemble,
                                    const Eigen::VectorXd& z) {
    if (z.size() != ensemble.m()) {
        throw std::invalid_argument("lift_adjoint: weight length != m");
    }
    const Eigen::MatrixXcd m =
        ensemble.rows().transpose() * z.asDiagonal() * ensemble.rows().conjugate();
    return hermitian_part(m);
}

/// Real reformulation of the ensemble: tilde rows [Re a_j; Im a_j] in R^{2d}
/// and the rank-one-projection pairs beta_j = ã_{2j-1} + ã_{2j},
/// gamma_j = ã_{2j-1} - ã_{2j}.
struct RealifiedSystem {
    Eigen::MatrixXd tilde_rows;  // m x 2d
    Eigen::MatrixXd beta;        // floor(m/2) x 2d
    Eigen::MatrixXd gamma;       // floor(m/2) x 2d
};

inline RealifiedSystem realify(const SensingEnsemble& ensemble) {
    const Index m = ensemble.m();
    const Index d = ensemble.d();
    if (m < 2) {
        throw std::invalid_argument("realify: need m >= 2 to form pairs");
    }
    RealifiedSystem sys;
    sys.tilde_rows.resize(m, 2 * d);
    sys.tilde_rows.leftCols(d) = ensemble.rows().real();
    sys.tilde_rows.rightCols(d) = ensemble.rows().imag();
    const Index pairs = m / 2;
    sys.beta.resize(pairs, 2 * d);
    sys.gamma.resize(pairs, 2 * d);
    for (Index j = 0; j < pairs; ++j) {
        sys.beta.row(j) = sys.tilde_rows.row(2 * j) + sys.tilde_rows.row(2 * j + 1);
        sys.gamma.row(j) = sys.tilde_rows.row(2 * j) - sys.tilde_rows.row(2 * j + 1);
    }
    return sys;
}

/// [[Re H, -Im H], [Im H, Re H]], the 2d x 2d symmetric matrix with
/// ã_j^T H̃ ã_j = a_j^* H a_j.
inline Eigen::MatrixXd realify_hermitian(const HermitianMatrix& h) {
    const Index d = h.dim();
    Eigen::MatrixXd out(2 * d, 2 * d);
    const Eigen::MatrixXd re = h.matrix().real();
    const Eigen::MatrixXd im = h.matrix().imag();
    out.topLeftCorner(d, d) = re;
    out.topRightCorner(d, d) = -im;
    out.bottomLeftCorner(d, d) = im;
    out.bottomRightCorner(d, d) = re;
    return out;
}

}  // namespace phaselens
