#pragma once

// 1D grid quantum dynamics for the classical limit: Strang split-step
// propagation, Ehrenfest moment tracking, collapse-driven random walks of
// the packet means, and the Schrodinger-vs-heat contrast.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "qcollapse/collapse_scheduler.hpp"
#include "qcollapse/numerics.hpp"
#include "qcollapse/quantum_core.hpp"
#include "qcollapse/spectral.hpp"

namespace qcollapse {

/// Gaussian packet with centers (q, p) and widths; sigma_q sigma_p >= 1/2.
/// Widths above the minimum are realized with a position chirp.
struct GaussianPacket {
    double q = 0, p = 0, sigma_q = 1, sigma_p = 0.5;

    static GaussianPacket minimal(double q, double p, double sigma_q) { return {q, p, sigma_q, 0.5 / sigma_q}; }

    void validate() const {
        require(sigma_q > 0 && sigma_p > 0, "GaussianPacket: widths must be positive");
        require(sigma_q * sigma_p >= 0.5 - 1e-12, "GaussianPacket: uncertainty bound sigma_q sigma_p >= 1/2 violated");
    }
};

using Potential1D = std::function<double(double)>;

inline std::vector<complex> packet_wavefunction(const Grid1D& g, const GaussianPacket& pk) {
    pk.validate();
    const double chirp = std::sqrt(std::max(0.0, 4 * pk.sigma_q * pk.sigma_q * pk.sigma_p * pk.sigma_p - 1.0));
    std::vector<complex> psi(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.x(i) - pk.q;
        const double a = x * x / (4 * pk.sigma_q * pk.sigma_q);
        psi[i] = std::exp(-a) * std::polar(1.0, pk.p * x + chirp * a);
    }
    const double n = std::sqrt(grid_norm2(psi, g.dx));
    for (auto& c : psi) c /= n;
    return psi;
}

struct Moments {
    double t = 0;
    double q = 0;
    double p = 0;
    double sigma_q = 0;
    double sigma_p = 0;
};

inline Moments moments(const std::vector<complex>& psi, const Grid1D& g, Fourier1D& fft, double t = 0) {
    double w = 0, mq = 0, mq2 = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double p = std::norm(psi[i]);
        w += p;
        mq += p * g.x(i);
        mq2 += p * g.x(i) * g.x(i);
    }
    std::vector<complex> spec;
    fft.forward(psi, spec);
    double wk = 0, mp = 0, mp2 = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double p = std::norm(spec[i]);
        const double k = g.k(i);
        wk += p;
        mp += p * k;
        mp2 += p * k * k;
    }
    Moments m;
    m.t = t;
    m.q = mq / w;
    m.p = mp / wk;
    m.sigma_q = std::sqrt(std::max(0.0, mq2 / w - m.q * m.q));
    m.sigma_p = std::sqrt(std::max(0.0, mp2 / wk - m.p * m.p));
    return m;
}

/// Strang splitting: half potential kick, exact kinetic drift in Fourier
/// space, half potential kick (hbar = 1).
class SplitStepEvolver {
public:
    SplitStepEvolver(Grid1D grid, Potential1D v, double mass, double dt)
        : grid_(grid), v_(std::move(v)), mass_(mass), dt_(dt) {
        require(mass > 0 && dt > 0, "SplitStepEvolver: mass and dt must be positive");
        build(dt_, half_v_, kin_);
    }

    const Grid1D& grid() const { return grid_; }
    double dt() const { return dt_; }

    void step(std::vector<complex>& psi) { apply(psi, half_v_, kin_); }

    /// Evolves for an arbitrary duration: whole steps plus one shorter step.
    void evolve(std::vector<complex>& psi, double duration) {
        require(duration >= 0, "SplitStepEvolver: negative duration");
        auto whole = static_cast<std::size_t>(std::floor(duration / dt_ + 1e-12));
        double rest = duration - static_cast<double>(whole) * dt_;
        if (rest < 1e-14 * dt_) rest = 0;
        for (std::size_t s = 0; s < whole; ++s) step(psi);
        if (rest > 0) {
            std::vector<complex> hv, kn;
            build(rest, hv, kn);
            apply(psi, hv, kn);
        }
    }

    Fourier1D& fft() { return fft_; }

private:
    void build(double dt, std::vector<complex>& half_v, std::vector<complex>& kin) const {
        half_v.resize(grid_.n);
        kin.resize(grid_.n);
        for (std::size_t i = 0; i < grid_.n; ++i) {
            half_v[i] = std::polar(1.0, -0.5 * dt * v_(grid_.x(i)));
            const double k = grid_.k(i);
            kin[i] = std::polar(1.0, -dt * k * k / (2 * mass_));
        }
    }

    void apply(std::vector<complex>& psi, const std::vector<complex>& half_v, const std::vector<complex>& kin) {
        for (std::size_t i = 0; i < grid_.n; ++i) psi[i] *= half_v[i];
        fft_.forward(psi, spec_);
        for (std::size_t i = 0; i < grid_.n; ++i) spec_[i] *= kin[i];
        fft_.inverse(spec_, psi);
        for (std::size_t i = 0; i < grid_.n; ++i) psi[i] *= half_v[i];
    }

    Grid1D grid_;
    Potential1D v_;
    double mass_;
    double dt_;
    std::vector<complex> half_v_, kin_, spec_;
    Fourier1D fft_;
};

struct GridRunConfig {
    Grid1D grid;
    double mass = 1.0;
    double dt = 0.005;
    std::size_t record_every = 10;  // steps between recorded moments
    double boundary_tolerance = 1e-6;
};

namespace detail {

inline void check_packet_fits(const GridRunConfig& cfg, const GaussianPacket& pk) {
    require(pk.sigma_q >= 8 * cfg.grid.dx, "grid does not resolve packet (need sigma_q >= 8 dx)");
}

inline void check_boundary(const std::vector<complex>& psi, double tol) {
    if (boundary_mass_1d(psi) > tol) throw NumericError("wavefunction reached the grid boundary");
}

}  // namespace detail

/// Moments (<q>, <p>, sigma_q, sigma_p) of a packet evolving under V.
inline std::vector<Moments> ehrenfest_track(const Potential1D& v, const GaussianPacket& packet, double total_time,
                                            const GridRunConfig& cfg) {
    detail::check_packet_fits(cfg, packet);
    SplitStepEvolver ev(cfg.grid, v, cfg.mass, cfg.dt);
    auto psi = packet_wavefunction(cfg.grid, packet);
    detail::check_boundary(psi, cfg.boundary_tolerance);
    std::vector<Moments> out{moments(psi, cfg.grid, ev.fft(), 0.0)};
    const std::size_t steps = static_cast<std::size_t>(std::llround(total_time / cfg.dt));
    for (std::size_t s = 1; s <= steps; ++s) {
        ev.step(psi);
        if (s % cfg.record_every == 0 || s == steps) {
            detail::check_boundary(psi, cfg.boundary_tolerance);
            out.push_back(moments(psi, cfg.grid, ev.fft(), static_cast<double>(s) * cfg.dt));
        }
    }
    return out;
}

struct CollapseWalk {
    std::vector<Moments> series;
    std::vector<double> collapse_times;
    /// Moments immediately before and after each collapse.
    std::vector<Moments> before_collapse;
    std::vector<Moments> after_collapse;
};

/// Re-localizes the wavefunction at Poisson times: a center is drawn from
/// |psi|^2 over grid cells and psi is multiplied by a Gaussian window whose
/// squared modulus has std `sigma_r`, then renormalized. Without a clock the
/// run is identical to ehrenfest_track.
inline CollapseWalk collapse_random_walk(const Potential1D& v, const GaussianPacket& packet,
                                         const std::optional<PoissonClock>& clock, double sigma_r, double total_time,
                                         const GridRunConfig& cfg, Rng& rng) {
    detail::check_packet_fits(cfg, packet);
    require(sigma_r >= 4 * cfg.grid.dx, "collapse_random_walk: sigma_R must be >= 4 dx");
    SplitStepEvolver ev(cfg.grid, v, cfg.mass, cfg.dt);
    auto psi = packet_wavefunction(cfg.grid, packet);
    detail::check_boundary(psi, cfg.boundary_tolerance);

    CollapseWalk walk;
    walk.series.push_back(moments(psi, cfg.grid, ev.fft(), 0.0));
    double next_event = clock ? sample_waiting_time(*clock, rng) : std::numeric_limits<double>::infinity();
    std::vector<double> weights(cfg.grid.n);

    auto localize = [&](double t) {
        walk.before_collapse.push_back(moments(psi, cfg.grid, ev.fft(), t));
        for (std::size_t i = 0; i < cfg.grid.n; ++i) weights[i] = std::norm(psi[i]);
        const double xc = cfg.grid.x(sample_index(weights, uniform01(rng)));
        for (std::size_t i = 0; i < cfg.grid.n; ++i) {
            const double d = cfg.grid.x(i) - xc;
            psi[i] *= std::exp(-d * d / (4 * sigma_r * sigma_r));
        }
        const double n = std::sqrt(grid_norm2(psi, cfg.grid.dx));
        for (auto& c : psi) c /= n;
        walk.collapse_times.push_back(t);
        walk.after_collapse.push_back(moments(psi, cfg.grid, ev.fft(), t));
    };

    const std::size_t steps = static_cast<std::size_t>(std::llround(total_time / cfg.dt));
    for (std::size_t s = 1; s <= steps; ++s) {
        double t = static_cast<double>(s - 1) * cfg.dt;
        const double t_end = static_cast<double>(s) * cfg.dt;
        if (next_event > t_end) {
            ev.step(psi);
        } else {
            while (next_event <= t_end) {
                ev.evolve(psi, next_event - t);
                t = next_event;
                localize(t);
                next_event = t + sample_waiting_time(*clock, rng);
            }
            ev.evolve(psi, t_end - t);
        }
        if (s % cfg.record_every == 0 || s == steps) {
            detail::check_boundary(psi, cfg.boundary_tolerance);
            walk.series.push_back(moments(psi, cfg.grid, ev.fft(), t_end));
        }
    }
    return walk;
}

// ---------------------------------------------------------------------------
// Schrodinger vs heat equation

/// Exact spectral heat flow u_t = alpha u_xx; refuses t < 0 (ill-posed).
inline std::vector<complex> heat_evolve(const std::vector<complex>& u, const Grid1D& g, double alpha, double t,
                                        Fourier1D& fft) {
    require(t >= 0, "heat_evolve: backward heat flow is ill-posed");
    require(alpha >= 0, "heat_evolve: diffusivity must be nonnegative");
    std::vector<complex> spec, out;
    fft.forward(u, spec);
    for (std::size_t i = 0; i < g.n; ++i) spec[i] *= std::exp(-g.k(i) * g.k(i) * alpha * t);
    fft.inverse(spec, out);
    return out;
}

/// Exact free Schrodinger flow with hbar = m = 1 (any sign of t).
inline std::vector<complex> schrodinger_evolve(std::vector<complex> psi, const Grid1D& g, double t, Fourier1D& fft) {
    apply_free_phase_1d(psi, g, 1.0, t, fft);
    return psi;
}

inline complex fourier_mode(const std::vector<complex>& u, std::size_t mode, Fourier1D& fft) {
    std::vector<complex> spec;
    fft.forward(u, spec);
    return spec.at(mode);
}

struct ContrastSample {
    double t = 0;
    double schrodinger_norm = 0;  // L2 norm of the Schrodinger evolution
    double heat_norm = 0;         // L2 norm of the heat evolution
};

struct ContrastRun {
    std::vector<ContrastSample> series;
    std::vector<complex> schrodinger_final;
    std::vector<complex> heat_final;
};

/// Evolves the same real initial profile under i u_t = -u_xx/2 and
/// u_t = alpha u_xx, recording both L2 norms.
inline ContrastRun unitary_vs_diffusive(const std::vector<double>& profile, const Grid1D& g, double alpha,
                                        double total_time, std::size_t samples) {
    require(profile.size() == g.n, "unitary_vs_diffusive: profile does not match grid");
    require(total_time >= 0 && samples >= 1, "unitary_vs_diffusive: need T >= 0 and at least one sample");
    Fourier1D fft;
    std::vector<complex> u0(profile.begin(), profile.end());
    ContrastRun run;
    for (std::size_t s = 0; s <= samples; ++s) {
        const double t = total_time * static_cast<double>(s) / static_cast<double>(samples);
        auto sch = schrodinger_evolve(u0, g, t, fft);
        auto heat = heat_evolve(u0, g, alpha, t, fft);
        run.series.push_back({t, std::sqrt(grid_norm2(sch, g.dx)), std::sqrt(grid_norm2(heat, g.dx))});
        if (s == samples) {
            run.schrodinger_final = std::move(sch);
            run.heat_final = std::move(heat);
        }
    }
    return run;
}

}  // namespace qcollapse
