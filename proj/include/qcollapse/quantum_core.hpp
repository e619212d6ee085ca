#pragma once

// Finite-dimensional quantum states: pure and mixed states, unitary
// evolution (hbar = 1), Born-rule collapse, separability, entropy and
// dephasing.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "qcollapse/numerics.hpp"

namespace qcollapse {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

class StateVector {
public:
    /// Validates unit norm unless `normalize` is set, in which case any
    /// nonzero vector is rescaled.
    explicit StateVector(CVector amplitudes, bool normalize = false) : amps_(std::move(amplitudes)) {
        require(amps_.size() >= 1, "StateVector: dim must be >= 1");
        for (Eigen::Index i = 0; i < amps_.size(); ++i)
            require(std::isfinite(amps_[i].real()) && std::isfinite(amps_[i].imag()),
                    "StateVector: non-finite amplitude");
        const double n = amps_.norm();
        if (normalize) {
            require(n > 0, "StateVector: cannot normalize the zero vector");
            amps_ /= n;
        } else {
            require(std::abs(n - 1.0) <= tolerances().norm, "StateVector: norm must be 1 (got " + std::to_string(n) + ")");
        }
    }

    StateVector(std::initializer_list<complex> amps, bool normalize = false)
        : StateVector(from_list(amps), normalize) {}

    static StateVector basis(std::size_t dim, std::size_t k) {
        require(k < dim, "StateVector::basis: index out of range");
        CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
        v[static_cast<Eigen::Index>(k)] = 1.0;
        return StateVector(std::move(v));
    }

    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    const CVector& amplitudes() const { return amps_; }
    complex operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

private:
    static CVector from_list(std::initializer_list<complex> amps) {
        CVector v(static_cast<Eigen::Index>(amps.size()));
        Eigen::Index i = 0;
        for (auto a : amps) v[i++] = a;
        return v;
    }

    CVector amps_;
};

inline double max_hermitian_residue(const CMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

class HermitianOperator {
public:
    explicit HermitianOperator(CMatrix m) : m_(std::move(m)) {
        require(m_.rows() == m_.cols() && m_.rows() >= 1, "HermitianOperator: matrix must be square");
        require(max_hermitian_residue(m_) <= tolerances().hermitian, "HermitianOperator: matrix is not Hermitian");
    }

    static HermitianOperator zero(std::size_t dim) {
        const auto n = static_cast<Eigen::Index>(dim);
        return HermitianOperator(CMatrix::Zero(n, n));
    }
    static HermitianOperator identity(std::size_t dim) {
        const auto n = static_cast<Eigen::Index>(dim);
        return HermitianOperator(CMatrix::Identity(n, n));
    }
    static HermitianOperator diagonal(std::span<const double> d) {
        const auto n = static_cast<Eigen::Index>(d.size());
        CMatrix m = CMatrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return HermitianOperator(std::move(m));
    }
    static HermitianOperator diagonal(std::initializer_list<double> d) {
        std::vector<double> v(d);
        return diagonal(std::span<const double>(v));
    }

    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }
    complex operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

private:
    CMatrix m_;
};

/// Spectral decomposition of a Hermitian operator; exp(-i H t) is applied
/// exactly through its eigenbasis.
class UnitaryEvolver {
public:
    explicit UnitaryEvolver(const HermitianOperator& h) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
        if (es.info() != Eigen::Success) throw NumericError("UnitaryEvolver: eigendecomposition failed");
        energies_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
    }

    std::size_t dim() const { return static_cast<std::size_t>(energies_.size()); }
    const Eigen::VectorXd& energies() const { return energies_; }
    const CMatrix& eigenvectors() const { return vectors_; }

    CMatrix unitary(double dt) const {
        require(std::isfinite(dt), "evolve: dt must be finite");
        return vectors_ * phases(dt).asDiagonal() * vectors_.adjoint();
    }

    CVector apply(const CVector& psi, double dt) const {
        require(std::isfinite(dt), "evolve: dt must be finite");
        require(psi.size() == energies_.size(), "evolve: dimension mismatch");
        CVector c = vectors_.adjoint() * psi;
        c = c.cwiseProduct(phases(dt));
        return vectors_ * c;
    }

private:
    CVector phases(double dt) const {
        CVector ph(energies_.size());
        for (Eigen::Index i = 0; i < energies_.size(); ++i) ph[i] = std::polar(1.0, -energies_[i] * dt);
        return ph;
    }

    Eigen::VectorXd energies_;
    CMatrix vectors_;
};

class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {
        require(m_.rows() == m_.cols() && m_.rows() >= 1, "DensityMatrix: matrix must be square");
        require(max_hermitian_residue(m_) <= tolerances().hermitian, "DensityMatrix: matrix is not Hermitian");
        const complex tr = m_.trace();
        require(std::abs(tr.real() - 1.0) <= tolerances().trace && std::abs(tr.imag()) <= tolerances().trace,
                "DensityMatrix: trace must be 1");
        require(eigenvalues().minCoeff() >= -tolerances().psd, "DensityMatrix: negative eigenvalue");
    }

    static DensityMatrix pure(const StateVector& psi) {
        return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
    }
    static DensityMatrix maximally_mixed(std::size_t dim) {
        const auto n = static_cast<Eigen::Index>(dim);
        return DensityMatrix(CMatrix::Identity(n, n) / static_cast<double>(dim));
    }
    /// Mixture sum_i p_i |phi_i><phi_i|.
    static DensityMatrix mixture(std::span<const double> weights, std::span<const StateVector> states) {
        require(weights.size() == states.size() && !states.empty(), "DensityMatrix::mixture: size mismatch");
        const auto n = static_cast<Eigen::Index>(states.front().dim());
        CMatrix m = CMatrix::Zero(n, n);
        for (std::size_t i = 0; i < states.size(); ++i) {
            require(weights[i] >= 0, "DensityMatrix::mixture: negative weight");
            m += weights[i] * states[i].amplitudes() * states[i].amplitudes().adjoint();
        }
        return DensityMatrix(std::move(m));
    }

    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }

    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericError("DensityMatrix: eigendecomposition failed");
        return es.eigenvalues();
    }

private:
    CMatrix m_;
};

struct BipartiteLabel {
    std::size_t dim_a = 1;
    std::size_t dim_b = 1;
};

// ---------------------------------------------------------------------------

inline StateVector evolve_unitary(const StateVector& psi, const HermitianOperator& h, double dt) {
    require(psi.dim() == h.dim(), "evolve_unitary: dimension mismatch");
    return StateVector(UnitaryEvolver(h).apply(psi.amplitudes(), dt));
}

inline DensityMatrix propagate_density(const DensityMatrix& rho, const HermitianOperator& h, double dt) {
    require(rho.dim() == h.dim(), "propagate_density: dimension mismatch");
    const CMatrix u = UnitaryEvolver(h).unitary(dt);
    CMatrix out = u * rho.matrix() * u.adjoint();
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out));
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
    const Eigen::VectorXd ev = rho.eigenvalues();
    double s = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double p = std::max(ev[i], 0.0);
        if (p > tolerances().entropy_cutoff) s -= p * std::log(p);
    }
    return s;
}

inline double expectation(const DensityMatrix& rho, const HermitianOperator& a) {
    require(rho.dim() == a.dim(), "expectation: dimension mismatch");
    const complex v = (a.matrix() * rho.matrix()).trace();
    if (std::abs(v.imag()) > tolerances().norm) throw NumericError("expectation: imaginary residue above tolerance");
    return v.real();
}

/// <phi|psi>, accumulated in a fixed order so that swapping the arguments
/// yields the exact complex conjugate.
inline complex inner_product(const StateVector& phi, const StateVector& psi) {
    require(phi.dim() == psi.dim(), "inner_product: dimension mismatch");
    double re = 0, im = 0;
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        const complex a = phi[i], b = psi[i];
        re += a.real() * b.real() + a.imag() * b.imag();
        im += a.real() * b.imag() - a.imag() * b.real();
    }
    return {re, im};
}

inline double born_probability(const StateVector& psi, const StateVector& phi) {
    return std::norm(inner_product(phi, psi));
}

/// Checks pairwise orthonormality of `basis` (Gram matrix vs identity).
inline void validate_orthonormal(std::span<const StateVector> basis, std::size_t dim) {
    require(!basis.empty(), "basis: empty");
    for (const auto& b : basis) require(b.dim() == dim, "basis: dimension mismatch");
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i; j < basis.size(); ++j) {
            const complex g = inner_product(basis[i], basis[j]);
            const double expected = i == j ? 1.0 : 0.0;
            require(std::abs(g - expected) <= tolerances().orthonormal, "basis: vectors are not orthonormal");
        }
}

inline std::vector<StateVector> computational_basis(std::size_t dim) {
    std::vector<StateVector> b;
    b.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) b.push_back(StateVector::basis(dim, k));
    return b;
}

struct CollapseOutcome {
    std::size_t index = 0;
    double probability = 0.0;
    StateVector state;
};

/// Inverse-CDF pick from nonnegative weights with one uniform draw; ties go
/// to the lowest index.
inline std::size_t sample_index(std::span<const double> weights, double u) {
    double total = 0;
    for (double w : weights) total += w;
    const double target = u * total;
    double cum = 0;
    std::size_t last_positive = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] <= 0) continue;
        last_positive = k;
        cum += weights[k];
        if (target < cum) return k;
    }
    return last_positive;
}

/// Born-rule reduction of `psi` onto one element of an orthonormal basis.
inline CollapseOutcome collapse(const StateVector& psi, std::span<const StateVector> basis, Rng& rng) {
    validate_orthonormal(basis, psi.dim());
    std::vector<double> p(basis.size());
    double total = 0;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        p[k] = born_probability(psi, basis[k]);
        total += p[k];
    }
    require(std::abs(total - 1.0) <= tolerances().probability_sum,
            "collapse: basis does not cover the state's support (probabilities sum to " + std::to_string(total) + ")");
    const std::size_t k = sample_index(p, uniform01(rng));
    return {k, p[k], basis[k]};
}

/// -2 ln |<phi|psi>|: the information a collapse between the two states carries.
inline double collapse_info_measure(const StateVector& psi, const StateVector& phi) {
    const double p = born_probability(psi, phi);
    if (p <= tolerances().forbidden_probability)
        throw ValidationError("collapse_info_measure: forbidden transition (zero overlap)");
    return std::max(0.0, -std::log(p));
}

inline StateVector tensor_product(const StateVector& a, const StateVector& b) {
    CVector out(static_cast<Eigen::Index>(a.dim() * b.dim()));
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) out[static_cast<Eigen::Index>(i * b.dim() + j)] = a[i] * b[j];
    return StateVector(std::move(out), true);
}

/// Singular values of the dim_a x dim_b coefficient matrix (row index = A).
inline Eigen::VectorXd schmidt_coefficients(const StateVector& psi, BipartiteLabel split) {
    require(split.dim_a >= 1 && split.dim_b >= 1 && split.dim_a * split.dim_b == psi.dim(),
            "schmidt: split does not factor the state dimension");
    CMatrix c(static_cast<Eigen::Index>(split.dim_a), static_cast<Eigen::Index>(split.dim_b));
    for (std::size_t i = 0; i < split.dim_a; ++i)
        for (std::size_t j = 0; j < split.dim_b; ++j)
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = psi[i * split.dim_b + j];
    Eigen::JacobiSVD<CMatrix> svd(c);
    return svd.singularValues();
}

inline std::size_t schmidt_rank(const StateVector& psi, BipartiteLabel split, double tol = 1e-10) {
    const Eigen::VectorXd s = schmidt_coefficients(psi, split);
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > tol) ++r;
    return r;
}

/// Removes coherences between elements of a complete orthonormal basis:
/// rho -> sum_k P_k rho P_k.
inline DensityMatrix dephase(const DensityMatrix& rho, std::span<const StateVector> basis) {
    validate_orthonormal(basis, rho.dim());
    require(basis.size() == rho.dim(), "dephase: basis must be complete");
    const auto n = static_cast<Eigen::Index>(rho.dim());
    CMatrix out = CMatrix::Zero(n, n);
    for (const auto& b : basis) {
        const CVector& v = b.amplitudes();
        const complex pk = v.dot(rho.matrix() * v);
        out += pk.real() * v * v.adjoint();
    }
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out));
}

inline DensityMatrix dephase(const DensityMatrix& rho) {
    const auto b = computational_basis(rho.dim());
    return dephase(rho, b);
}

/// Ensemble density matrix of a sequence of collapse outcomes (equal weights).
inline DensityMatrix ensemble_density(std::span<const StateVector> states) {
    std::vector<double> w(states.size(), 1.0 / static_cast<double>(states.size()));
    return DensityMatrix::mixture(w, states);
}

}  // namespace qcollapse
