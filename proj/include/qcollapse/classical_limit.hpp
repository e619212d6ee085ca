#pragma once

// Classical phase-space machinery: symplectic trajectories, Liouville
// volume, Lyapunov exponents, phase-volume (density of states) estimates,
// ensemble entropy with and without collapse jitter, and the symmetric
// random walk.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcollapse/collapse_scheduler.hpp"
#include "qcollapse/numerics.hpp"

namespace qcollapse {

struct PhaseSpacePoint {
    std::vector<double> q;
    std::vector<double> p;

    std::size_t dof() const { return q.size(); }
    bool finite() const {
        for (double x : q)
            if (!std::isfinite(x)) return false;
        for (double x : p)
            if (!std::isfinite(x)) return false;
        return true;
    }
    /// Flattened (q..., p...) coordinates.
    std::vector<double> flat() const {
        std::vector<double> v(q);
        v.insert(v.end(), p.begin(), p.end());
        return v;
    }
};

using PotentialFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

/// Separable Hamiltonian H = |p|^2 / 2m + V(q).
class HamiltonianSystem {
public:
    HamiltonianSystem(std::string name, std::size_t dof, double mass, PotentialFn v, GradientFn grad_v,
                      double probe_scale = 1.0, std::uint64_t probe_seed = 12345)
        : name_(std::move(name)), dof_(dof), mass_(mass), v_(std::move(v)), grad_(std::move(grad_v)) {
        require(dof_ >= 1, "HamiltonianSystem: need at least one degree of freedom");
        require(mass_ > 0, "HamiltonianSystem: mass must be positive");
        validate_gradient(probe_scale, probe_seed);
    }

    const std::string& name() const { return name_; }
    std::size_t dof() const { return dof_; }
    double mass() const { return mass_; }

    double potential(std::span<const double> q) const { return v_(q); }
    void potential_gradient(std::span<const double> q, std::span<double> g) const { grad_(q, g); }

    double energy(const PhaseSpacePoint& x) const {
        double t = 0;
        for (double pi : x.p) t += pi * pi;
        return t / (2.0 * mass_) + v_(x.q);
    }

private:
    void validate_gradient(double scale, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<double> q(dof_), g(dof_), qp(dof_), qm(dof_);
        for (int trial = 0; trial < 8; ++trial) {
            for (auto& x : q) x = scale * (2 * uniform01(rng) - 1);
            grad_(q, g);
            for (std::size_t i = 0; i < dof_; ++i) {
                const double h = 1e-6 * std::max(1.0, std::abs(q[i]));
                qp = q;
                qm = q;
                qp[i] += h;
                qm[i] -= h;
                const double fd = (v_(qp) - v_(qm)) / (2 * h);
                const double tol = 1e-5 * std::max(1.0, std::abs(fd));
                require(std::abs(fd - g[i]) <= tol,
                        "HamiltonianSystem(" + name_ + "): analytic gradient disagrees with finite differences");
            }
        }
    }

    std::string name_;
    std::size_t dof_;
    double mass_;
    PotentialFn v_;
    GradientFn grad_;
};

namespace systems {

inline HamiltonianSystem harmonic(double omega = 1.0, std::size_t dof = 1) {
    return {"harmonic", dof, 1.0,
            [omega](std::span<const double> q) {
                double s = 0;
                for (double x : q) s += x * x;
                return 0.5 * omega * omega * s;
            },
            [omega](std::span<const double> q, std::span<double> g) {
                for (std::size_t i = 0; i < q.size(); ++i) g[i] = omega * omega * q[i];
            }};
}

inline HamiltonianSystem free_particle(std::size_t dof = 1, double mass = 1.0) {
    return {"free", dof, mass, [](std::span<const double>) { return 0.0; },
            [](std::span<const double> q, std::span<double> g) {
                for (std::size_t i = 0; i < q.size(); ++i) g[i] = 0.0;
            }};
}

/// H = p^2/2 - cos q
inline HamiltonianSystem pendulum() {
    return {"pendulum", 1, 1.0, [](std::span<const double> q) { return -std::cos(q[0]); },
            [](std::span<const double> q, std::span<double> g) { g[0] = std::sin(q[0]); }, 3.0};
}

/// H = (px^2 + py^2)/2 + (x^2 + y^2)/2 + x^2 y - y^3/3
inline HamiltonianSystem henon_heiles() {
    return {"henon_heiles", 2, 1.0,
            [](std::span<const double> q) {
                const double x = q[0], y = q[1];
                return 0.5 * (x * x + y * y) + x * x * y - y * y * y / 3.0;
            },
            [](std::span<const double> q, std::span<double> g) {
                const double x = q[0], y = q[1];
                g[0] = x + 2.0 * x * y;
                g[1] = y + x * x - y * y;
            },
            0.5};
}

/// H = p^2/2 + q^4/4
inline HamiltonianSystem quartic() {
    return {"quartic", 1, 1.0, [](std::span<const double> q) { return 0.25 * q[0] * q[0] * q[0] * q[0]; },
            [](std::span<const double> q, std::span<double> g) { g[0] = q[0] * q[0] * q[0]; }};
}

inline HamiltonianSystem by_name(const std::string& name) {
    if (name == "harmonic") return harmonic();
    if (name == "pendulum") return pendulum();
    if (name == "henon_heiles" || name == "henon-heiles") return henon_heiles();
    if (name == "quartic") return quartic();
    if (name == "free") return free_particle();
    throw ValidationError("unknown system '" + name + "'");
}

}  // namespace systems

/// One velocity-Verlet (kick-drift-kick) step. A positive `drag` adds
/// dp/dt = -drag p, applied exactly as half-step contractions around the
/// symplectic step.
inline PhaseSpacePoint hamilton_step(const HamiltonianSystem& sys, PhaseSpacePoint x, double dt, double drag = 0.0) {
    const std::size_t n = sys.dof();
    require(x.q.size() == n && x.p.size() == n, "hamilton_step: dimension mismatch");
    std::vector<double> g(n);
    const double damp = drag > 0 ? std::exp(-0.5 * drag * dt) : 1.0;
    if (drag > 0)
        for (auto& pi : x.p) pi *= damp;
    sys.potential_gradient(x.q, g);
    for (std::size_t i = 0; i < n; ++i) x.p[i] -= 0.5 * dt * g[i];
    for (std::size_t i = 0; i < n; ++i) x.q[i] += dt * x.p[i] / sys.mass();
    sys.potential_gradient(x.q, g);
    for (std::size_t i = 0; i < n; ++i) x.p[i] -= 0.5 * dt * g[i];
    if (drag > 0)
        for (auto& pi : x.p) pi *= damp;
    if (!x.finite()) throw NumericError("hamilton_step: non-finite state");
    return x;
}

inline PhaseSpacePoint integrate(const HamiltonianSystem& sys, PhaseSpacePoint x, double dt, std::size_t steps,
                                 double drag = 0.0) {
    for (std::size_t s = 0; s < steps; ++s) x = hamilton_step(sys, std::move(x), dt, drag);
    return x;
}

inline PhaseSpacePoint flip_momentum(PhaseSpacePoint x) {
    for (auto& pi : x.p) pi = -pi;
    return x;
}

inline std::size_t steps_for(double total_time, double dt) {
    require(total_time >= 0 && dt > 0, "integration: need T >= 0 and dt > 0");
    return static_cast<std::size_t>(std::llround(total_time / dt));
}

// ---------------------------------------------------------------------------
// Liouville volume

/// Simplex of 2 dof + 1 vertices: `center` plus `edge` along each axis.
inline std::vector<PhaseSpacePoint> make_simplex(const PhaseSpacePoint& center, double edge) {
    std::vector<PhaseSpacePoint> v{center};
    const std::size_t d = center.dof();
    for (std::size_t i = 0; i < 2 * d; ++i) {
        PhaseSpacePoint x = center;
        if (i < d)
            x.q[i] += edge;
        else
            x.p[i - d] += edge;
        v.push_back(std::move(x));
    }
    return v;
}

inline double simplex_volume(std::span<const PhaseSpacePoint> cloud) {
    const std::size_t dim = 2 * cloud.front().dof();
    require(cloud.size() == dim + 1, "simplex_volume: need 2*dof + 1 points");
    Eigen::MatrixXd e(dim, dim);
    const auto base = cloud[0].flat();
    for (std::size_t j = 0; j < dim; ++j) {
        const auto v = cloud[j + 1].flat();
        for (std::size_t i = 0; i < dim; ++i) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i] - base[i];
    }
    double fact = 1;
    for (std::size_t k = 2; k <= dim; ++k) fact *= static_cast<double>(k);
    return std::abs(e.determinant()) / fact;
}

/// Ratio of evolved to initial simplex volume after time T.
inline double liouville_volume_check(const HamiltonianSystem& sys, std::span<const PhaseSpacePoint> cloud,
                                     double total_time, double dt, double drag = 0.0) {
    const double v0 = simplex_volume(cloud);
    double scale = 0;
    for (const auto& x : cloud)
        for (double c : x.flat()) scale = std::max(scale, std::abs(c));
    require(v0 > 1e-300 && v0 > std::pow(1e-15 * std::max(scale, 1.0), static_cast<double>(2 * sys.dof())),
            "liouville_volume_check: degenerate cloud");
    const std::size_t steps = steps_for(total_time, dt);
    std::vector<PhaseSpacePoint> evolved;
    for (const auto& x : cloud) evolved.push_back(integrate(sys, x, dt, steps, drag));
    return simplex_volume(evolved) / v0;
}

// ---------------------------------------------------------------------------
// Lyapunov exponent

inline double phase_distance(const PhaseSpacePoint& a, const PhaseSpacePoint& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.dof(); ++i) {
        s += (a.q[i] - b.q[i]) * (a.q[i] - b.q[i]);
        s += (a.p[i] - b.p[i]) * (a.p[i] - b.p[i]);
    }
    return std::sqrt(s);
}

/// Benettin two-trajectory estimate: the shadow trajectory starts `eps0`
/// away in a random direction and is pulled back to `eps0` every
/// `renormalize_every` steps; the exponent is the mean log stretch per time.
inline double lyapunov_estimate(const HamiltonianSystem& sys, const PhaseSpacePoint& x0, double eps0, double total_time,
                                double dt, std::size_t renormalize_every, Rng& rng, double escape_radius = 1e6) {
    require(eps0 > 0 && renormalize_every > 0, "lyapunov_estimate: eps0 and renormalization interval must be positive");
    const std::size_t d = sys.dof();
    std::vector<double> dir(2 * d);
    double nrm = 0;
    for (auto& c : dir) {
        c = standard_normal(rng);
        nrm += c * c;
    }
    nrm = std::sqrt(nrm);
    PhaseSpacePoint a = x0, b = x0;
    for (std::size_t i = 0; i < d; ++i) {
        b.q[i] += eps0 * dir[i] / nrm;
        b.p[i] += eps0 * dir[i + d] / nrm;
    }
    const std::size_t steps = steps_for(total_time, dt);
    double log_sum = 0;
    for (std::size_t s = 1; s <= steps; ++s) {
        a = hamilton_step(sys, std::move(a), dt);
        b = hamilton_step(sys, std::move(b), dt);
        if (s % renormalize_every == 0 || s == steps) {
            const double dist = phase_distance(a, b);
            if (!(dist > 0) || !std::isfinite(dist)) throw NumericError("lyapunov_estimate: degenerate separation");
            for (double c : a.flat())
                if (std::abs(c) > escape_radius) throw NumericError("lyapunov_estimate: trajectory escaped");
            log_sum += std::log(dist / eps0);
            const double k = eps0 / dist;
            for (std::size_t i = 0; i < d; ++i) {
                b.q[i] = a.q[i] + k * (b.q[i] - a.q[i]);
                b.p[i] = a.p[i] + k * (b.p[i] - a.p[i]);
            }
        }
    }
    return log_sum / (static_cast<double>(steps) * dt);
}

// ---------------------------------------------------------------------------
// Phase volume / density of states

/// Sampling box over (q..., p...). Axes flagged `physical` are the system's
/// own configuration domain and are exempt from the containment check.
struct PhaseBox {
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<bool> physical;

    double volume() const {
        double v = 1;
        for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
        return v;
    }
};

struct PhaseVolumeEstimate {
    double gamma0 = 0;         // volume of {H <= E}
    double standard_error = 0;
    double omega = 0;          // dGamma0/dE by central difference
    double omega_standard_error = 0;
};

inline PhaseVolumeEstimate estimate_phase_volume(const HamiltonianSystem& sys, double energy, const PhaseBox& box,
                                                 std::size_t n_samples, double delta_e, Rng& rng) {
    const std::size_t dim = 2 * sys.dof();
    require(box.lo.size() == dim && box.hi.size() == dim, "estimate_phase_volume: box dimension mismatch");
    require(n_samples > 0 && delta_e > 0, "estimate_phase_volume: need samples and delta_e > 0");
    std::vector<bool> physical = box.physical;
    physical.resize(dim, false);

    PhaseSpacePoint x{std::vector<double>(sys.dof()), std::vector<double>(sys.dof())};
    auto set = [&](std::size_t i, double v) {
        if (i < sys.dof())
            x.q[i] = v;
        else
            x.p[i - sys.dof()] = v;
    };

    // The shell {H <= E + dE} must not reach any non-physical face.
    for (std::size_t face = 0; face < 2 * dim; ++face) {
        const std::size_t axis = face / 2;
        if (physical[axis]) continue;
        for (int probe = 0; probe < 2000; ++probe) {
            for (std::size_t i = 0; i < dim; ++i) set(i, box.lo[i] + uniform01(rng) * (box.hi[i] - box.lo[i]));
            set(axis, face % 2 ? box.hi[axis] : box.lo[axis]);
            if (sys.energy(x) <= energy + delta_e)
                throw ValidationError("estimate_phase_volume: sampler box too small (energy shell reaches the boundary)");
        }
    }

    std::size_t inside = 0, lower = 0, upper = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (std::size_t i = 0; i < dim; ++i) set(i, box.lo[i] + uniform01(rng) * (box.hi[i] - box.lo[i]));
        const double h = sys.energy(x);
        if (h <= energy) ++inside;
        if (h <= energy - delta_e) ++lower;
        if (h <= energy + delta_e) ++upper;
    }
    const double n = static_cast<double>(n_samples);
    const double vol = box.volume();
    const double f = static_cast<double>(inside) / n;
    const double fs = static_cast<double>(upper - lower) / n;
    PhaseVolumeEstimate est;
    est.gamma0 = f * vol;
    est.standard_error = vol * std::sqrt(f * (1 - f) / n);
    est.omega = fs * vol / (2 * delta_e);
    est.omega_standard_error = vol * std::sqrt(fs * (1 - fs) / n) / (2 * delta_e);
    return est;
}

// ---------------------------------------------------------------------------
// Ensembles and entropy

using Cloud = std::vector<PhaseSpacePoint>;

/// Uniform cloud over an axis-aligned box; returns points and the box measure.
inline std::pair<Cloud, double> uniform_box_cloud(const PhaseSpacePoint& center, std::span<const double> half_widths,
                                                  std::size_t m, Rng& rng) {
    const std::size_t d = center.dof();
    require(half_widths.size() == 2 * d, "uniform_box_cloud: need one half-width per phase-space axis");
    Cloud cloud(m, center);
    double measure = 1;
    for (double hw : half_widths) measure *= 2 * hw;
    for (auto& x : cloud)
        for (std::size_t i = 0; i < 2 * d; ++i) {
            const double u = (2 * uniform01(rng) - 1) * half_widths[i];
            if (i < d)
                x.q[i] += u;
            else
                x.p[i - d] += u;
        }
    return {std::move(cloud), measure};
}

/// Fixed coarse-graining grid over (q..., p...); points outside are clamped
/// into the edge cells.
struct CoarseGrid {
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<std::size_t> bins;

    std::size_t cell_of(const PhaseSpacePoint& x) const {
        const auto v = x.flat();
        require(v.size() == lo.size(), "CoarseGrid: dimension mismatch");
        std::size_t idx = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double t = (v[i] - lo[i]) / (hi[i] - lo[i]) * static_cast<double>(bins[i]);
            const auto b = static_cast<std::size_t>(std::clamp(t, 0.0, static_cast<double>(bins[i]) - 0.5));
            idx = idx * bins[i] + b;
        }
        return idx;
    }
    std::size_t cell_count() const {
        std::size_t c = 1;
        for (auto b : bins) c *= b;
        return c;
    }
    std::vector<double> distribution(std::span<const PhaseSpacePoint> cloud) const {
        std::vector<double> counts(cell_count(), 0.0);
        for (const auto& x : cloud) counts[cell_of(x)] += 1.0;
        for (auto& c : counts) c /= static_cast<double>(cloud.size());
        return counts;
    }
};

inline double coarse_entropy(std::span<const PhaseSpacePoint> cloud, const CoarseGrid& grid) {
    const auto p = grid.distribution(cloud);
    return shannon_entropy(p);
}

struct EntropyCheckpoint {
    double time = 0;
    double coarse = 0;
    /// ln(support measure) carried along by the flow's Jacobian; NaN when
    /// collapse jitter is active (jitter is not a volume-preserving map).
    double fine = std::numeric_limits<double>::quiet_NaN();
    std::size_t collapses = 0;
};

struct EnsembleOptions {
    std::optional<PoissonClock> clock;   // per-point collapse clock; nullopt = deterministic
    double jitter = 0.0;                 // sigma_J applied to q and p at each collapse
    double dt = 0.01;
    std::size_t checkpoint_every = 100;  // steps
    std::size_t jacobian_probes = 8;     // points whose local volume is tracked
    double probe_edge = 1e-7;
    std::size_t min_points = 10000;
};

namespace detail {

/// Advances each point one step and applies any collapse jitter that fell
/// inside the step. `next_event` holds per-point absolute event times.
inline std::size_t ensemble_step(const HamiltonianSystem& sys, Cloud& cloud, std::vector<double>& next_event, double t,
                                 const EnsembleOptions& opt, Rng& rng) {
    std::size_t events = 0;
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        cloud[k] = hamilton_step(sys, std::move(cloud[k]), opt.dt);
        if (!opt.clock) continue;
        while (next_event[k] <= t + opt.dt) {
            for (auto& qi : cloud[k].q) qi += opt.jitter * standard_normal(rng);
            for (auto& pi : cloud[k].p) pi += opt.jitter * standard_normal(rng);
            next_event[k] += sample_waiting_time(*opt.clock, rng);
            ++events;
        }
    }
    return events;
}

}  // namespace detail

/// Coarse-grained (fixed grid) entropy of an evolving cloud, plus the
/// fine-grained entropy ln(measure) propagated with local flow Jacobians.
inline std::vector<EntropyCheckpoint> ensemble_entropy_evolution(const HamiltonianSystem& sys, Cloud cloud,
                                                                 double support_measure, const CoarseGrid& grid,
                                                                 double total_time, const EnsembleOptions& opt,
                                                                 Rng& rng) {
    require(cloud.size() >= 2 && support_measure > 0, "ensemble_entropy_evolution: need a cloud with positive measure");
    require(opt.checkpoint_every > 0, "ensemble_entropy_evolution: checkpoint interval must be positive");
    require(cloud.size() >= opt.min_points, "ensemble_entropy_evolution: undersampled histogram (too few points)");
    std::vector<double> next_event(cloud.size(), std::numeric_limits<double>::infinity());
    if (opt.clock)
        for (auto& e : next_event) e = sample_waiting_time(*opt.clock, rng);

    std::vector<std::vector<PhaseSpacePoint>> probes;
    std::vector<double> probe_v0;
    if (!opt.clock) {
        const std::size_t n = std::min(opt.jacobian_probes, cloud.size());
        for (std::size_t i = 0; i < n; ++i) {
            probes.push_back(make_simplex(cloud[i * cloud.size() / n], opt.probe_edge));
            probe_v0.push_back(simplex_volume(probes.back()));
        }
    }
    auto fine_entropy = [&]() {
        if (opt.clock) return std::numeric_limits<double>::quiet_NaN();
        double s = 0;
        for (std::size_t i = 0; i < probes.size(); ++i) s += std::log(simplex_volume(probes[i]) / probe_v0[i]);
        return std::log(support_measure) + s / static_cast<double>(probes.size());
    };

    std::vector<EntropyCheckpoint> out;
    std::size_t collapses = 0;
    out.push_back({0.0, coarse_entropy(cloud, grid), fine_entropy(), 0});
    const std::size_t steps = steps_for(total_time, opt.dt);
    for (std::size_t s = 1; s <= steps; ++s) {
        const double t = static_cast<double>(s - 1) * opt.dt;
        collapses += detail::ensemble_step(sys, cloud, next_event, t, opt, rng);
        for (auto& simplex : probes)
            for (auto& v : simplex) v = hamilton_step(sys, std::move(v), opt.dt);
        if (s % opt.checkpoint_every == 0 || s == steps)
            out.push_back({static_cast<double>(s) * opt.dt, coarse_entropy(cloud, grid), fine_entropy(), collapses});
    }
    return out;
}

/// Forward for T, flip momenta, forward for T, flip again. Without collapse
/// this returns the initial cloud up to integrator round-off.
inline Cloud momentum_reversal_replay(const HamiltonianSystem& sys, Cloud cloud, double total_time,
                                      const EnsembleOptions& opt, Rng& rng) {
    std::vector<double> next_event(cloud.size(), std::numeric_limits<double>::infinity());
    if (opt.clock)
        for (auto& e : next_event) e = sample_waiting_time(*opt.clock, rng);
    const std::size_t steps = steps_for(total_time, opt.dt);
    double t = 0;
    for (int leg = 0; leg < 2; ++leg) {
        for (std::size_t s = 0; s < steps; ++s) {
            detail::ensemble_step(sys, cloud, next_event, t, opt, rng);
            t += opt.dt;
        }
        for (auto& x : cloud) x = flip_momentum(std::move(x));
    }
    return cloud;
}

inline double cloud_tv_distance(std::span<const PhaseSpacePoint> a, std::span<const PhaseSpacePoint> b,
                                const CoarseGrid& grid) {
    return total_variation(grid.distribution(a), grid.distribution(b));
}

// ---------------------------------------------------------------------------
// Random walk

struct RandomWalkStats {
    std::size_t steps = 0;
    double step_size = 0;
    /// std of d * m, m = number of rightward steps (binomial count)
    double sigma_count = 0;
    /// std of the position x = (2m - n) d
    double sigma_position = 0;
    double mean_position = 0;
};

/// n-step walk: right with probability p, left otherwise, step length d.
inline RandomWalkStats symmetric_random_walk(std::size_t n_steps, double step, double p_right, std::size_t n_walks,
                                             Rng& rng) {
    require(n_walks >= 2 && n_steps >= 1, "symmetric_random_walk: need walks and steps");
    require(p_right >= 0 && p_right <= 1, "symmetric_random_walk: probability out of range");
    std::bernoulli_distribution right(p_right);
    std::vector<double> counts(n_walks), positions(n_walks);
    for (std::size_t w = 0; w < n_walks; ++w) {
        std::size_t m = 0;
        for (std::size_t s = 0; s < n_steps; ++s) m += right(rng) ? 1 : 0;
        counts[w] = step * static_cast<double>(m);
        positions[w] = step * (2.0 * static_cast<double>(m) - static_cast<double>(n_steps));
    }
    return {n_steps, step, sample_stddev(counts), sample_stddev(positions), mean(positions)};
}

}  // namespace qcollapse
