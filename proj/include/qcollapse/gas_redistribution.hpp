#pragma once

// Random pairwise energy exchange among N classical particles,
// E'_i = r (E_i + E_j), E'_j = E_i + E_j - E'_i.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "qcollapse/numerics.hpp"

namespace qcollapse {

struct EnergyEnsemble {
    std::vector<double> energies;
    /// Compensated sum recorded at creation; the exchange rule preserves it.
    double total = 0.0;

    std::size_t size() const { return energies.size(); }
    double mean() const { return total / static_cast<double>(energies.size()); }
    double current_total() const { return compensated_sum(energies); }
};

struct EnergyHistogram {
    double bin_width = 0.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t n_total = 0;

    double bin_center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * bin_width; }
    /// phi(i) / bin_width, i.e. the empirical probability density.
    std::vector<double> density() const {
        std::vector<double> d(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i)
            d[i] = static_cast<double>(counts[i]) / (static_cast<double>(n_total) * bin_width);
        return d;
    }
    std::vector<double> probabilities() const { return normalized<std::uint64_t>(counts); }
};

inline EnergyEnsemble make_ensemble(std::vector<double> energies) {
    require(energies.size() >= 2, "EnergyEnsemble: need N >= 2");
    for (double e : energies) require(e >= 0 && std::isfinite(e), "EnergyEnsemble: energies must be nonnegative");
    EnergyEnsemble ens{std::move(energies), 0.0};
    ens.total = ens.current_total();
    return ens;
}

/// E_i = r E0 with r uniform on [0, 1].
inline EnergyEnsemble init_uniform(std::size_t n, double e0, Rng& rng) {
    require(n >= 2, "init_uniform: need N >= 2");
    require(e0 > 0 && std::isfinite(e0), "init_uniform: E0 must be positive");
    std::vector<double> e(n);
    for (auto& x : e) x = uniform01(rng) * e0;
    return make_ensemble(std::move(e));
}

/// Splits the pair sum with fraction r for particle i. The larger share is
/// rounded first and the smaller one obtained by an exact subtraction, so
/// E'_i + E'_j reproduces E_i + E_j bit for bit.
inline void exchange_pair(EnergyEnsemble& ens, std::size_t i, std::size_t j, double r) {
    const double s = ens.energies[i] + ens.energies[j];
    if (r >= 0.5) {
        const double big = r * s;
        ens.energies[i] = big;
        ens.energies[j] = s - big;
    } else {
        const double big = (1.0 - r) * s;
        ens.energies[j] = big;
        ens.energies[i] = s - big;
    }
}

/// One exchange in place: i uniform, j uniform among the other N - 1.
inline void redistribute(EnergyEnsemble& ens, Rng& rng) {
    const std::size_t n = ens.size();
    std::uniform_int_distribution<std::size_t> pick_i(0, n - 1), pick_j(0, n - 2);
    const std::size_t i = pick_i(rng);
    std::size_t j = pick_j(rng);
    if (j >= i) ++j;
    exchange_pair(ens, i, j, uniform01(rng));
}

inline EnergyEnsemble redistribution_step(EnergyEnsemble ens, Rng& rng) {
    require(ens.size() >= 2, "redistribution_step: need N >= 2");
    redistribute(ens, rng);
    return ens;
}

/// Fixed-width histogram; the bin count grows to cover the largest energy.
inline EnergyHistogram histogram(const EnergyEnsemble& ens, double bin_width) {
    require(bin_width > 0, "histogram: bin width must be positive");
    EnergyHistogram h;
    h.bin_width = bin_width;
    h.n_total = ens.size();
    for (double e : ens.energies) {
        const auto b = static_cast<std::size_t>(e / bin_width);
        if (b >= h.counts.size()) h.counts.resize(b + 1, 0);
        ++h.counts[b];
    }
    return h;
}

struct EquilibriumRun {
    std::vector<std::uint64_t> iterations;
    std::vector<EnergyHistogram> histograms;
};

/// Runs `n_iterations` exchanges, histogramming every `sample_every` steps
/// (the initial state is always the first sample).
inline EquilibriumRun run_to_equilibrium(EnergyEnsemble& ens, std::uint64_t n_iterations, std::uint64_t sample_every,
                                         double bin_width, Rng& rng) {
    require(sample_every > 0, "run_to_equilibrium: sample_every must be positive");
    EquilibriumRun run;
    run.iterations.push_back(0);
    run.histograms.push_back(histogram(ens, bin_width));
    for (std::uint64_t it = 1; it <= n_iterations; ++it) {
        redistribute(ens, rng);
        if (it % sample_every == 0 || it == n_iterations) {
            run.iterations.push_back(it);
            run.histograms.push_back(histogram(ens, bin_width));
        }
    }
    return run;
}

inline double boltzmann_pdf(double eps, double mean) {
    require(mean > 0 && eps >= 0, "boltzmann_pdf: need mean > 0 and eps >= 0");
    return std::exp(-eps / mean) / mean;
}

inline double boltzmann_cdf(double eps, double mean) {
    require(mean > 0 && eps >= 0, "boltzmann_cdf: need mean > 0 and eps >= 0");
    return -std::expm1(-eps / mean);
}

/// KL(histogram || exponential), with the exponential integrated over each bin.
inline double kl_from_exponential(const EnergyHistogram& h, double mean) {
    const auto p = h.probabilities();
    double kl = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0) continue;
        const double lo = static_cast<double>(i) * h.bin_width, hi = lo + h.bin_width;
        const double q = std::exp(-lo / mean) * -std::expm1(-(hi - lo) / mean);
        kl += p[i] * std::log(p[i] / q);
    }
    return kl;
}

inline double shannon_entropy_of_histogram(const EnergyHistogram& h) {
    require(h.n_total > 0, "shannon_entropy_of_histogram: empty histogram");
    const auto p = h.probabilities();
    return shannon_entropy(p);
}

inline double histogram_tv(const EnergyHistogram& a, const EnergyHistogram& b) {
    require(a.bin_width == b.bin_width, "histogram_tv: bin widths differ");
    return total_variation(a.probabilities(), b.probabilities());
}

/// Stationarity test: the last two samples differ by TV below `threshold`.
inline bool is_stationary(const EquilibriumRun& run, double threshold = 0.005) {
    if (run.histograms.size() < 2) return false;
    const auto n = run.histograms.size();
    return histogram_tv(run.histograms[n - 1], run.histograms[n - 2]) < threshold;
}

}  // namespace qcollapse
