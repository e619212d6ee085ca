#pragma once

// Information measures on finite distributions, in nats (0 ln 0 = 0).

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "qcollapse/numerics.hpp"

namespace qcollapse {

struct InfoEvent {
    double p = 1.0;

    explicit InfoEvent(double prob) : p(prob) {
        require(prob > 0 && prob <= 1.0, "InfoEvent: probability must lie in (0, 1]");
    }
};

/// -ln p in nats.
inline double info_measure(const InfoEvent& e) { return e.p == 1.0 ? 0.0 : -std::log(e.p); }

inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

/// Row-major table P(x, y) over an nx by ny grid.
class JointDistribution {
public:
    JointDistribution(std::size_t nx, std::size_t ny, std::vector<double> table)
        : nx_(nx), ny_(ny), table_(std::move(table)) {
        require(nx >= 1 && ny >= 1, "JointDistribution: empty shape");
        require(table_.size() == nx * ny, "JointDistribution: table size does not match shape");
        for (double v : table_) require(v >= 0 && std::isfinite(v), "JointDistribution: entries must be nonnegative");
        require(std::abs(compensated_sum(table_) - 1.0) <= 1e-12, "JointDistribution: table must sum to 1");
    }

    static JointDistribution product(std::span<const double> px, std::span<const double> py) {
        std::vector<double> t(px.size() * py.size());
        for (std::size_t i = 0; i < px.size(); ++i)
            for (std::size_t j = 0; j < py.size(); ++j) t[i * py.size() + j] = px[i] * py[j];
        return JointDistribution(px.size(), py.size(), std::move(t));
    }

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double operator()(std::size_t x, std::size_t y) const { return table_[x * ny_ + y]; }
    const std::vector<double>& table() const { return table_; }

    std::vector<double> marginal_x() const {
        std::vector<double> m(nx_);
        for (std::size_t i = 0; i < nx_; ++i) {
            CompensatedSum s;
            for (std::size_t j = 0; j < ny_; ++j) s.add((*this)(i, j));
            m[i] = s.value();
        }
        return m;
    }
    std::vector<double> marginal_y() const {
        std::vector<double> m(ny_);
        for (std::size_t j = 0; j < ny_; ++j) {
            CompensatedSum s;
            for (std::size_t i = 0; i < nx_; ++i) s.add((*this)(i, j));
            m[j] = s.value();
        }
        return m;
    }

private:
    std::size_t nx_, ny_;
    std::vector<double> table_;
};

struct EntropySet {
    double h_x = 0;
    double h_y = 0;
    double h_xy = 0;
    double h_x_given_y = 0;
    double mutual = 0;
};

inline EntropySet entropies(const JointDistribution& j) {
    const auto px = j.marginal_x(), py = j.marginal_y();
    EntropySet e;
    e.h_x = shannon_entropy(px);
    e.h_y = shannon_entropy(py);
    e.h_xy = shannon_entropy(j.table());
    CompensatedSum cond, mi;
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y) {
            const double p = j(x, y);
            if (p <= 0) continue;
            cond.add(-p * std::log(p / py[y]));
            mi.add(p * std::log(p / (px[x] * py[y])));
        }
    e.h_x_given_y = std::max(0.0, cond.value());
    e.mutual = std::max(0.0, mi.value());
    return e;
}

inline double mutual_information(const JointDistribution& j) { return entropies(j).mutual; }

struct ConservationResult {
    double before = 0;
    double after = 0;
    bool bijective = false;
};

/// Pushes `dist` through `mapping` (outcome k goes to mapping[k]) and
/// compares entropies. A bijection leaves the entropy unchanged exactly;
/// merging outcomes can only lower it.
inline ConservationResult transform_conservation_check(std::span<const double> dist,
                                                       std::span<const std::size_t> mapping) {
    require(mapping.size() == dist.size(), "transform_conservation_check: mapping must be defined on every outcome");
    for (double v : dist) require(v >= 0 && std::isfinite(v), "transform_conservation_check: negative probability");
    require(std::abs(compensated_sum(dist) - 1.0) <= 1e-12, "transform_conservation_check: distribution must sum to 1");
    std::size_t range = 0;
    for (auto m : mapping) range = std::max(range, m + 1);
    std::vector<double> image(range, 0.0);
    std::vector<int> hits(range, 0);
    for (std::size_t k = 0; k < dist.size(); ++k) {
        image[mapping[k]] += dist[k];
        ++hits[mapping[k]];
    }
    ConservationResult r;
    r.bijective = range == dist.size();
    for (int h : hits) r.bijective = r.bijective && h == 1;
    r.before = shannon_entropy(dist);
    r.after = shannon_entropy(image);
    return r;
}

}  // namespace qcollapse
