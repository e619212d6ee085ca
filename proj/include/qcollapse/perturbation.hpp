#pragma once

// Time-dependent perturbation theory for a discrete spectrum driven by
// H'(t) = 2 W cos(omega t), with hbar = k_B = 1 and t0 = 0.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "qcollapse/numerics.hpp"
#include "qcollapse/quantum_core.hpp"

namespace qcollapse {

class DiscreteSpectrum {
public:
    explicit DiscreteSpectrum(std::vector<double> energies) : e_(std::move(energies)) {
        require(e_.size() >= 2, "DiscreteSpectrum: need at least two levels");
        for (double x : e_) require(std::isfinite(x), "DiscreteSpectrum: non-finite energy");
        require(std::is_sorted(e_.begin(), e_.end()), "DiscreteSpectrum: energies must be sorted ascending");
    }
    std::size_t size() const { return e_.size(); }
    double energy(std::size_t n) const { return e_.at(n); }
    /// omega_fi = E_f - E_i
    double bohr_frequency(std::size_t f, std::size_t i) const { return e_.at(f) - e_.at(i); }
    const std::vector<double>& energies() const { return e_; }

private:
    std::vector<double> e_;
};

struct HarmonicPerturbation {
    HermitianOperator coupling;
    double omega = 0.0;

    HarmonicPerturbation(HermitianOperator w, double omega_) : coupling(std::move(w)), omega(omega_) {
        require(omega >= 0 && std::isfinite(omega), "HarmonicPerturbation: omega must be >= 0");
    }
};

namespace detail {

/// (e^{i x dt} - 1) / (i x), continuous at x = 0 where it equals dt.
inline complex phase_integral(double x, double dt) {
    const double th = x * dt;
    if (std::abs(th) < 1e-8) return {dt, 0.5 * x * dt * dt};
    return (std::polar(1.0, th) - 1.0) / complex(0.0, x);
}

inline double sinc(double x) { return std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x; }

inline void check_indices(const DiscreteSpectrum& s, const HermitianOperator& w, std::size_t i, std::size_t f) {
    require(w.dim() == s.size(), "perturbation: coupling dimension differs from spectrum size");
    require(i < s.size() && f < s.size(), "perturbation: level index out of range");
}

}  // namespace detail

struct FirstOrderResult {
    complex amplitude;
    /// |W_fi| << |E_f - E_i| and |a_f|^2 <= 1; false means first order is unreliable.
    bool weak_coupling = true;
};

/// Rotating-wave (sinc) form: a_f = delta_if + dt W_fi / i * e^{i theta} sinc(theta),
/// theta = (omega - |omega_fi|) dt / 2.
inline FirstOrderResult first_order_amplitude(const DiscreteSpectrum& s, const HarmonicPerturbation& p,
                                              std::size_t i, std::size_t f, double dt) {
    detail::check_indices(s, p.coupling, i, f);
    const complex w_fi = p.coupling(f, i);
    const double theta = (p.omega - std::abs(s.bohr_frequency(f, i))) * dt / 2.0;
    const complex a = (i == f ? 1.0 : 0.0) + dt * w_fi / complex(0.0, 1.0) * std::polar(1.0, theta) * detail::sinc(theta);
    FirstOrderResult r{a, true};
    if (i != f) r.weak_coupling = std::abs(w_fi) < 0.1 * std::abs(s.bohr_frequency(f, i)) && std::norm(a) <= 1.0;
    return r;
}

/// Both co- and counter-rotating terms of the first-order amplitude, for a
/// drive frequency of either sign.
inline complex first_order_amplitude_full(const DiscreteSpectrum& s, const HermitianOperator& w, double omega,
                                          std::size_t i, std::size_t f, double dt) {
    detail::check_indices(s, w, i, f);
    const double wfi = s.bohr_frequency(f, i);
    const complex bracket = detail::phase_integral(wfi + omega, dt) + detail::phase_integral(wfi - omega, dt);
    return (i == f ? 1.0 : 0.0) + w(f, i) / complex(0.0, 1.0) * bracket;
}

struct ResonancePoint {
    double omega;
    double probability;
};

inline std::vector<ResonancePoint> resonance_curve(const DiscreteSpectrum& s, const HermitianOperator& w,
                                                   std::size_t i, std::size_t f, double dt,
                                                   std::span<const double> omega_grid) {
    require(!omega_grid.empty(), "resonance_curve: empty frequency grid");
    require(i != f, "resonance_curve: need distinct levels");
    std::vector<ResonancePoint> out;
    out.reserve(omega_grid.size());
    for (double om : omega_grid) out.push_back({om, std::norm(first_order_amplitude_full(s, w, om, i, f, dt))});
    return out;
}

struct InteractionPictureRun {
    std::vector<complex> amplitudes;
    /// (t, |a_n|^2 ...) rows when recording was requested.
    std::vector<std::pair<double, std::vector<double>>> series;
};

/// Classical RK4 on da_f/dt = -i sum_n a_n <f|H'(t)|n> e^{i omega_fn t}, a_n(0) = delta_in.
inline InteractionPictureRun integrate_interaction_picture(const DiscreteSpectrum& s, const HarmonicPerturbation& p,
                                                           std::size_t initial, double total_time,
                                                           std::size_t n_steps, std::size_t record_every = 0) {
    detail::check_indices(s, p.coupling, initial, initial);
    require(total_time > 0 && n_steps > 0, "integrate_interaction_picture: T and n_steps must be positive");
    const std::size_t n = s.size();
    double max_freq = p.omega;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) max_freq = std::max(max_freq, std::abs(s.bohr_frequency(a, b)));
    const double h = total_time / static_cast<double>(n_steps);
    if (max_freq > 0)
        require(h <= 1.0 / (50.0 * max_freq), "integrate_interaction_picture: step exceeds 1/(50 max frequency)");

    auto rhs = [&](double t, const std::vector<complex>& a) {
        std::vector<complex> d(n, 0.0);
        const double drive = 2.0 * std::cos(p.omega * t);
        for (std::size_t f = 0; f < n; ++f) {
            complex acc = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                const complex wfm = p.coupling(f, m);
                if (wfm == 0.0) continue;
                acc += a[m] * wfm * std::polar(1.0, s.bohr_frequency(f, m) * t);
            }
            d[f] = complex(0.0, -1.0) * drive * acc;
        }
        return d;
    };

    InteractionPictureRun run;
    std::vector<complex> a(n, 0.0);
    a[initial] = 1.0;
    auto record = [&](double t) {
        std::vector<double> pr(n);
        for (std::size_t k = 0; k < n; ++k) pr[k] = std::norm(a[k]);
        run.series.emplace_back(t, std::move(pr));
    };
    if (record_every) record(0.0);

    std::vector<complex> tmp(n);
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = h * static_cast<double>(step);
        const auto k1 = rhs(t, a);
        for (std::size_t k = 0; k < n; ++k) tmp[k] = a[k] + 0.5 * h * k1[k];
        const auto k2 = rhs(t + 0.5 * h, tmp);
        for (std::size_t k = 0; k < n; ++k) tmp[k] = a[k] + 0.5 * h * k2[k];
        const auto k3 = rhs(t + 0.5 * h, tmp);
        for (std::size_t k = 0; k < n; ++k) tmp[k] = a[k] + h * k3[k];
        const auto k4 = rhs(t + h, tmp);
        for (std::size_t k = 0; k < n; ++k) a[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        if (record_every && ((step + 1) % record_every == 0 || step + 1 == n_steps)) record(h * static_cast<double>(step + 1));
    }
    run.amplitudes = std::move(a);
    return run;
}

/// w = 2 pi |W_fi|^2 rho(E)
inline double fermi_golden_rule_rate(double coupling_magnitude, double density_of_states) {
    require(density_of_states >= 0, "fermi_golden_rule_rate: negative density of states");
    return 2.0 * std::numbers::pi * coupling_magnitude * coupling_magnitude * density_of_states;
}

inline double fermi_golden_rule_rate(complex w_fi, double density_of_states) {
    return fermi_golden_rule_rate(std::abs(w_fi), density_of_states);
}

/// Canonical two-level state with populations proportional to e^{-omega_n / T}.
inline DensityMatrix two_level_thermal_density(double omega1, double omega2, double temperature) {
    require(temperature > 0 && std::isfinite(temperature), "two_level_thermal_density: T must be positive");
    const double ref = std::min(omega1, omega2);
    const double b1 = std::exp(-(omega1 - ref) / temperature);
    const double b2 = std::exp(-(omega2 - ref) / temperature);
    const double z = b1 + b2;
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = b1 / z;
    m(1, 1) = b2 / z;
    return DensityMatrix(std::move(m));
}

struct EinsteinBalance {
    double absorption;  // |a_{1->2}|^2
    double emission;    // |a_{2->1}|^2
};

/// Stimulated absorption vs emission probabilities over one interval.
inline EinsteinBalance einstein_balance_check(const DiscreteSpectrum& s, const HarmonicPerturbation& p, double dt) {
    require(s.size() == 2, "einstein_balance_check: two-level spectrum required");
    return {std::norm(first_order_amplitude_full(s, p.coupling, p.omega, 0, 1, dt)),
            std::norm(first_order_amplitude_full(s, p.coupling, p.omega, 1, 0, dt))};
}

}  // namespace qcollapse
