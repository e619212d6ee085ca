#pragma once

// Timing and orchestration of collapse events: Poisson clocks, GRW rate
// composition, Penrose times, a CSL stochastic step and the alternating
// unitary/collapse trajectory loop.

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "qcollapse/csv.hpp"
#include "qcollapse/numerics.hpp"
#include "qcollapse/quantum_core.hpp"

namespace qcollapse {

class PoissonClock {
public:
    explicit PoissonClock(double rate) : rate_(rate) {
        require(std::isfinite(rate) && rate > 0, "PoissonClock: rate must be positive and finite");
    }
    double rate() const { return rate_; }
    double mean_waiting_time() const { return 1.0 / rate_; }

private:
    double rate_;
};

inline double poisson_pmf(long long k, double lambda) {
    require(k >= 0 && lambda >= 0 && std::isfinite(lambda), "poisson_pmf: negative or non-finite input");
    if (lambda == 0) return k == 0 ? 1.0 : 0.0;
    const double kd = static_cast<double>(k);
    return std::exp(-lambda + kd * std::log(lambda) - std::lgamma(kd + 1.0));
}

inline double sample_waiting_time(const PoissonClock& clock, Rng& rng) {
    return std::exponential_distribution<double>(clock.rate())(rng);
}

/// Collapse rate of a body of n independent constituents.
inline double grw_rate(double n_particles, double lambda_micro) {
    require(n_particles >= 1 && std::isfinite(n_particles), "grw_rate: need at least one constituent");
    require(lambda_micro >= 0 && std::isfinite(lambda_micro), "grw_rate: rate must be nonnegative");
    return n_particles * lambda_micro;
}

/// Gravitational self-energy collapse time tau = hbar / E_delta (hbar = 1).
inline double penrose_time(double energy_difference) {
    require(energy_difference > 0 && std::isfinite(energy_difference), "penrose_time: energy must be positive");
    return 1.0 / energy_difference;
}

/// One Euler-Maruyama step of
///   d|psi> = [-i H + A w(t) - lambda A^2] |psi> dt
/// followed by renormalization. The complex increment w dt has total
/// variance 2 lambda dt and mean 2 lambda <A> dt, i.e. it is drawn under the
/// norm-weighted measure that reproduces Born statistics.
inline StateVector csl_step(const StateVector& psi, const HermitianOperator& h, const HermitianOperator& a,
                            double lambda, double dt, Rng& rng) {
    require(psi.dim() == h.dim() && psi.dim() == a.dim(), "csl_step: dimension mismatch");
    require(lambda >= 0 && dt > 0, "csl_step: lambda >= 0 and dt > 0 required");
    require(lambda * dt < 0.1, "csl_step: step too large (lambda*dt must be < 0.1)");
    const CVector& v = psi.amplitudes();
    const CVector av = a.matrix() * v;
    const double mean_a = v.dot(av).real();
    const double s = std::sqrt(lambda * dt);
    const complex w_dt(2.0 * lambda * mean_a * dt + s * standard_normal(rng), s * standard_normal(rng));
    const complex minus_i(0.0, -1.0);
    CVector next = v + (minus_i * dt) * (h.matrix() * v) + w_dt * av - (lambda * dt) * (a.matrix() * av);
    const double n = next.norm();
    if (!(n > 0) || !std::isfinite(n)) throw NumericError("csl_step: state collapsed to zero norm");
    return StateVector(next / n);
}

struct CollapseEvent {
    double time = 0.0;
    std::size_t chosen_index = 0;
    double info_change = 0.0;
    StateVector pre_state;
    StateVector post_state;
};

struct TrajectorySample {
    double time = 0.0;
    StateVector state;
};

struct AlternatingTrajectory {
    std::vector<TrajectorySample> samples;
    std::vector<CollapseEvent> events;
};

/// Rate hook: collapse rate as a function of the current state and time.
using RateFunction = std::function<double(const StateVector&, double)>;

/// Alternates exact unitary segments with instantaneous Born collapses at
/// exponentially distributed waiting times. Samples are recorded at
/// multiples of `sample_dt` (t = 0 and t = T included).
inline AlternatingTrajectory run_alternating(const StateVector& psi0, const HermitianOperator& h,
                                             const PoissonClock& clock, std::span<const StateVector> basis,
                                             double total_time, double sample_dt, Rng& rng,
                                             const RateFunction& rate_fn = {}) {
    require(total_time > 0 && std::isfinite(total_time), "run_alternating: T must be positive");
    require(sample_dt > 0, "run_alternating: sample_dt must be positive");
    require(psi0.dim() == h.dim(), "run_alternating: dimension mismatch");
    validate_orthonormal(basis, psi0.dim());

    const UnitaryEvolver evolver(h);
    AlternatingTrajectory traj;
    CVector psi = psi0.amplitudes();
    double t = 0.0;

    auto next_wait = [&](const CVector& state, double now) {
        if (!rate_fn) return sample_waiting_time(clock, rng);
        const double r = rate_fn(StateVector(state, true), now);
        require(r >= 0 && std::isfinite(r), "run_alternating: rate hook returned an invalid rate");
        if (r == 0) return std::numeric_limits<double>::infinity();
        return sample_waiting_time(PoissonClock(r), rng);
    };

    double next_event = next_wait(psi, t);
    traj.samples.push_back({0.0, StateVector(psi, true)});
    std::size_t sample_k = 1;

    while (true) {
        const double next_sample = std::min(static_cast<double>(sample_k) * sample_dt, total_time);
        if (next_event <= next_sample) {
            psi = evolver.apply(psi, next_event - t);
            t = next_event;
            StateVector pre(psi, true);
            CollapseOutcome out = collapse(pre, basis, rng);
            const double info = collapse_info_measure(pre, out.state);
            traj.events.push_back({t, out.index, info, pre, out.state});
            psi = out.state.amplitudes();
            next_event = t + next_wait(psi, t);
            continue;
        }
        psi = evolver.apply(psi, next_sample - t);
        t = next_sample;
        traj.samples.push_back({t, StateVector(psi, true)});
        if (t >= total_time) break;
        ++sample_k;
    }
    return traj;
}

/// Trajectory export: one row per sample or event, time ordered.
/// Columns: t, re_k/im_k per amplitude, event_flag, chosen_index (-1 for samples).
inline void write_trajectory_csv(std::ostream& os, const AlternatingTrajectory& traj) {
    CsvWriter csv(os);
    const std::size_t dim = traj.samples.front().state.dim();
    std::vector<std::string> header{"t"};
    for (std::size_t k = 0; k < dim; ++k) {
        header.push_back("re_" + std::to_string(k));
        header.push_back("im_" + std::to_string(k));
    }
    header.push_back("event_flag");
    header.push_back("chosen_index");
    csv.header(header);

    auto row = [&](double t, const StateVector& s, int flag, long long idx) {
        csv.field(t);
        for (std::size_t k = 0; k < dim; ++k) {
            csv.field(s[k].real());
            csv.field(s[k].imag());
        }
        csv.field(static_cast<long long>(flag));
        csv.field(idx);
        csv.end_row();
    };

    std::size_t si = 0, ei = 0;
    while (si < traj.samples.size() || ei < traj.events.size()) {
        const bool take_event =
            ei < traj.events.size() && (si >= traj.samples.size() || traj.events[ei].time <= traj.samples[si].time);
        if (take_event) {
            const auto& e = traj.events[ei++];
            row(e.time, e.post_state, 1, static_cast<long long>(e.chosen_index));
        } else {
            const auto& s = traj.samples[si++];
            row(s.time, s.state, 0, -1);
        }
    }
}

}  // namespace qcollapse
