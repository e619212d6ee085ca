#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcollapse {

using complex = std::complex<double>;
using Rng = std::mt19937_64;

/// Raised when an input violates a documented precondition or type invariant.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation cannot produce a trustworthy result
/// (non-finite state, integrator escape, residue above tolerance).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Validation tolerances shared by every module.
struct Tolerances {
    double norm = 1e-10;
    double trace = 1e-10;
    double hermitian = 1e-12;
    double psd = 1e-10;
    double entropy_cutoff = 1e-14;
    double orthonormal = 1e-9;
    double probability_sum = 1e-9;
    double forbidden_probability = 1e-20;
};

inline Tolerances& tolerances() {
    static Tolerances t;
    return t;
}

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ValidationError(what);
}

/// Per-replica stream derived from a master seed: seed + index.
inline Rng stream_for(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(master_seed + index);
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng& rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

/// Shannon entropy in nats with 0 ln 0 := 0. Terms are summed in sorted
/// order, so the result is an exactly symmetric function of its inputs.
inline double shannon_entropy(std::span<const double> probabilities) {
    std::vector<double> p(probabilities.begin(), probabilities.end());
    std::sort(p.begin(), p.end());
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log(x);
    return h;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_line: need >= 2 paired samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0, "fit_line: degenerate abscissa");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

inline double mean(std::span<const double> xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_stddev(std::span<const double> xs) {
    const double m = mean(xs);
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

/// Total-variation distance between two discrete distributions (zero-padded).
inline double total_variation(std::span<const double> p, std::span<const double> q) {
    const std::size_t n = std::max(p.size(), q.size());
    double tv = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = i < p.size() ? p[i] : 0.0;
        const double b = i < q.size() ? q[i] : 0.0;
        tv += std::abs(a - b);
    }
    return 0.5 * tv;
}

/// Normalize nonnegative counts to a probability vector.
template <class T>
std::vector<double> normalized(std::span<const T> counts) {
    double total = 0;
    for (auto c : counts) total += static_cast<double>(c);
    require(total > 0, "normalized: empty counts");
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / total;
    return p;
}

}  // namespace qcollapse
