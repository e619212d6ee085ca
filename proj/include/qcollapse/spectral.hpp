#pragma once

// Regular grids and Fourier helpers for spectral (split-step) propagation.

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <vector>

#include "qcollapse/numerics.hpp"

namespace qcollapse {

struct Grid1D {
    std::size_t n = 0;
    double dx = 1.0;
    /// Coordinate of cell 0; cell i sits at origin + i dx.
    double origin = 0.0;

    static Grid1D centered(std::size_t n, double dx) {
        return {n, dx, -0.5 * static_cast<double>(n) * dx};
    }
    double x(std::size_t i) const { return origin + static_cast<double>(i) * dx; }
    double length() const { return static_cast<double>(n) * dx; }
    /// Angular wavenumber of FFT bin i (standard ordering).
    double k(std::size_t i) const {
        const double dk = 2.0 * std::numbers::pi / length();
        const auto si = static_cast<long long>(i);
        const auto sn = static_cast<long long>(n);
        return dk * static_cast<double>(si < (sn + 1) / 2 ? si : si - sn);
    }
};

class Fourier1D {
public:
    void forward(const std::vector<complex>& in, std::vector<complex>& out) { fft_.fwd(out, in); }
    void inverse(const std::vector<complex>& in, std::vector<complex>& out) { fft_.inv(out, in); }

private:
    Eigen::FFT<double> fft_;
};

/// Applies exp(-i k^2 t / (2 m)) in Fourier space along one axis.
inline void apply_free_phase_1d(std::vector<complex>& psi, const Grid1D& g, double mass, double t, Fourier1D& fft) {
    std::vector<complex> spec;
    fft.forward(psi, spec);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double k = g.k(i);
        spec[i] *= std::polar(1.0, -k * k * t / (2.0 * mass));
    }
    fft.inverse(spec, psi);
}

inline double grid_norm2(const std::vector<complex>& psi, double cell) {
    double s = 0;
    for (const auto& a : psi) s += std::norm(a);
    return s * cell;
}

/// Probability held in the outer `band` fraction of cells on either side.
inline double boundary_mass_1d(const std::vector<complex>& psi, double band = 1.0 / 16.0) {
    const std::size_t n = psi.size();
    const auto w = static_cast<std::size_t>(band * static_cast<double>(n));
    double edge = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::norm(psi[i]);
        total += p;
        if (i < w || i >= n - w) edge += p;
    }
    return total > 0 ? edge / total : 0.0;
}

}  // namespace qcollapse
