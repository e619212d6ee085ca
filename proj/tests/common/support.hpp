#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <vector>

#include "qcollapse/quantum_core.hpp"

namespace qtest {

using qcollapse::CMatrix;
using qcollapse::complex;
using qcollapse::CVector;
using qcollapse::Rng;

inline CVector random_vector(std::size_t n, Rng& rng) {
    CVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = complex(qcollapse::standard_normal(rng), qcollapse::standard_normal(rng));
    return v;
}

inline qcollapse::StateVector random_state(std::size_t n, Rng& rng) {
    return qcollapse::StateVector(random_vector(n, rng), true);
}

inline CMatrix random_hermitian_matrix(std::size_t n, Rng& rng, double scale = 1.0) {
    const auto m = static_cast<Eigen::Index>(n);
    CMatrix a(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            a(i, j) = complex(qcollapse::standard_normal(rng), qcollapse::standard_normal(rng));
    CMatrix h = scale * 0.5 * (a + a.adjoint());
    return 0.5 * (h + h.adjoint());
}

inline qcollapse::HermitianOperator random_hamiltonian(std::size_t n, Rng& rng, double scale = 1.0) {
    return qcollapse::HermitianOperator(random_hermitian_matrix(n, rng, scale));
}

/// Random full-rank mixed state G G^dagger / tr.
inline qcollapse::DensityMatrix random_density(std::size_t n, Rng& rng) {
    const auto m = static_cast<Eigen::Index>(n);
    CMatrix g(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            g(i, j) = complex(qcollapse::standard_normal(rng), qcollapse::standard_normal(rng));
    CMatrix r = g * g.adjoint();
    r /= r.trace().real();
    r = 0.5 * (r + r.adjoint()).eval();
    return qcollapse::DensityMatrix(r);
}

/// exp(M) by scaling and squaring of a Taylor series; independent of any
/// eigendecomposition.
inline CMatrix taylor_expm(const CMatrix& m) {
    const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
    const CMatrix a = m / std::pow(2.0, squarings);
    CMatrix term = CMatrix::Identity(m.rows(), m.cols());
    CMatrix sum = term;
    for (int k = 1; k < 30; ++k) {
        term = (term * a / static_cast<double>(k)).eval();
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
    return sum;
}

/// Pearson statistic and its critical value at the given significance.
struct ChiSquared {
    double statistic = 0;
    double critical = 0;
    bool passes() const { return statistic < critical; }
};

inline ChiSquared chi_squared_test(const std::vector<std::uint64_t>& counts, const std::vector<double>& expected_p,
                                   double significance) {
    double n = 0;
    for (auto c : counts) n += static_cast<double>(c);
    ChiSquared r;
    int dof = -1;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (expected_p[k] <= 0) continue;
        const double e = n * expected_p[k];
        r.statistic += (static_cast<double>(counts[k]) - e) * (static_cast<double>(counts[k]) - e) / e;
        ++dof;
    }
    boost::math::chi_squared dist(dof);
    r.critical = boost::math::quantile(boost::math::complement(dist, significance));
    return r;
}

}  // namespace qtest
