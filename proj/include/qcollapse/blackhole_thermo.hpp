#pragma once

// Kerr-Newman horizon mechanics and thermodynamics in geometric units
// (G = c = 1, and hbar = k_B = 1 for temperature and entropy).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "qcollapse/numerics.hpp"

namespace qcollapse {

struct BlackHoleParams {
    double M = 1.0;
    double Q = 0.0;
    /// Spin parameter a = L / M.
    double a = 0.0;

    static BlackHoleParams from_angular_momentum(double m, double q, double l) {
        require(m > 0, "BlackHoleParams: mass must be positive");
        return {m, q, l / m};
    }
    double angular_momentum() const { return a * M; }
    double discriminant() const { return M * M - Q * Q - a * a; }
    bool extremal() const { return std::abs(discriminant()) < 1e-12 * M * M; }
};

namespace detail {

/// Validates and returns sqrt(M^2 - Q^2 - a^2), snapping near-extremal values to 0.
inline double horizon_root(const BlackHoleParams& p) {
    require(std::isfinite(p.M) && std::isfinite(p.Q) && std::isfinite(p.a), "BlackHoleParams: non-finite parameter");
    require(p.M > 0, "BlackHoleParams: mass must be positive");
    const double d = p.discriminant();
    if (p.extremal()) return 0.0;
    if (d < 0) {
        std::ostringstream os;
        os.precision(17);
        os << "naked singularity: discriminant M^2 - Q^2 - a^2 = " << d << " < 0";
        throw ValidationError(os.str());
    }
    return std::sqrt(d);
}

}  // namespace detail

struct Horizons {
    double r_plus = 0;
    double r_minus = 0;
};

inline Horizons horizons(const BlackHoleParams& p) {
    const double s = detail::horizon_root(p);
    return {p.M + s, p.M - s};
}

/// Ergosurface radii at polar angle theta; r_+ of the ergosphere is never
/// inside the horizon.
inline Horizons ergosphere(const BlackHoleParams& p, double theta) {
    detail::horizon_root(p);
    const double c = std::cos(theta);
    const double d = std::max(0.0, p.M * p.M - p.Q * p.Q - p.a * p.a * c * c);
    return {p.M + std::sqrt(d), p.M - std::sqrt(d)};
}

/// Christodoulou-Ruffini form (M^2 - Q^2/2 + M sqrt(disc)) / 2, square-rooted.
inline double irreducible_mass(const BlackHoleParams& p) {
    const double s = detail::horizon_root(p);
    return std::sqrt((p.M * p.M - 0.5 * p.Q * p.Q + p.M * s) / 2.0);
}

/// Same quantity from the horizon radius: (r_+^2 + a^2) / 4.
inline double irreducible_mass_from_horizon(const BlackHoleParams& p) {
    const double rp = horizons(p).r_plus;
    return std::sqrt((rp * rp + p.a * p.a) / 4.0);
}

/// 4 pi (r_+^2 + a^2).
inline double horizon_area(const BlackHoleParams& p) {
    const double rp = horizons(p).r_plus;
    return 4.0 * std::numbers::pi * (rp * rp + p.a * p.a);
}

inline double horizon_area_from_irreducible_mass(const BlackHoleParams& p) {
    const double mi = irreducible_mass(p);
    return 16.0 * std::numbers::pi * mi * mi;
}

/// Mass as a function of (area, angular momentum, charge).
inline double smarr_mass(double area, double l, double q) {
    require(area > 0, "smarr_mass: area must be positive");
    const double pi = std::numbers::pi;
    return std::sqrt(area / (16 * pi) + 4 * pi * l * l / area + q * q / 2 + pi * q * q * q * q / area);
}

struct SmarrCoefficients {
    double tension = 0;  // dM/dA
    double omega = 0;    // dM/dL
    double phi = 0;      // dM/dQ
};

inline SmarrCoefficients smarr_coefficients(const BlackHoleParams& p) {
    const double pi = std::numbers::pi;
    const double A = horizon_area(p);
    const double L = p.angular_momentum();
    const double Q = p.Q;
    SmarrCoefficients c;
    if (p.extremal()) {
        c.tension = 0.0;
    } else {
        c.tension = std::max(0.0, (1.0 / (16 * pi) - 4 * pi * L * L / (A * A) - pi * Q * Q * Q * Q / (A * A)) / (2 * p.M));
    }
    c.omega = 4 * pi * L / (p.M * A);
    c.phi = (Q / 2 + 2 * pi * Q * Q * Q / A) / p.M;
    return c;
}

/// Central differences of smarr_mass around the state's (A, L, Q).
inline SmarrCoefficients smarr_finite_difference(const BlackHoleParams& p, double rel_step = 1e-5) {
    const double A = horizon_area(p), L = p.angular_momentum(), Q = p.Q;
    auto step = [&](double x) { return rel_step * std::max(std::abs(x), 1.0); };
    const double hA = step(A), hL = step(L), hQ = step(Q);
    SmarrCoefficients c;
    c.tension = (smarr_mass(A + hA, L, Q) - smarr_mass(A - hA, L, Q)) / (2 * hA);
    c.omega = (smarr_mass(A, L + hL, Q) - smarr_mass(A, L - hL, Q)) / (2 * hL);
    c.phi = (smarr_mass(A, L, Q + hQ) - smarr_mass(A, L, Q - hQ)) / (2 * hQ);
    return c;
}

struct HawkingThermo {
    double kappa = 0;        // surface gravity, 8 pi dM/dA
    double temperature = 0;  // kappa / 2 pi
    double entropy = 0;      // A / 4
    double irreducible_mass = 0;
};

inline HawkingThermo hawking_thermo(const BlackHoleParams& p) {
    HawkingThermo h;
    h.kappa = 8.0 * std::numbers::pi * smarr_coefficients(p).tension;
    h.temperature = h.kappa / (2.0 * std::numbers::pi);
    h.entropy = horizon_area(p) / 4.0;
    h.irreducible_mass = irreducible_mass(p);
    return h;
}

struct HorizonData {
    double r_plus = 0, r_minus = 0;
    double area = 0;
    double irreducible_mass = 0;
    double temperature = 0;
    double entropy = 0;
    double kappa = 0;
    bool extremal = false;
};

inline HorizonData horizon_data(const BlackHoleParams& p) {
    const auto h = horizons(p);
    const auto th = hawking_thermo(p);
    return {h.r_plus, h.r_minus, horizon_area(p), th.irreducible_mass, th.temperature, th.entropy, th.kappa,
            p.extremal()};
}

enum class Transformation { reversible, irreversible, forbidden };

inline const char* to_string(Transformation t) {
    switch (t) {
        case Transformation::reversible: return "reversible";
        case Transformation::irreversible: return "irreversible";
        case Transformation::forbidden: return "forbidden";
    }
    return "?";
}

/// Classifies by the change in irreducible mass; |dM_irr| <= 1e-10 M_irr counts as conserved.
inline Transformation classify_transformation(const BlackHoleParams& before, const BlackHoleParams& after) {
    const double m0 = irreducible_mass(before), m1 = irreducible_mass(after);
    const double d = m1 - m0;
    if (std::abs(d) <= 1e-10 * std::max(m0, m1)) return Transformation::reversible;
    return d > 0 ? Transformation::irreversible : Transformation::forbidden;
}

struct AreaCheck {
    double area_before = 0;
    double area_after = 0;
    bool holds = false;
};

/// Total horizon area may not decrease from `before` to `after`.
inline AreaCheck area_theorem_check(std::span<const BlackHoleParams> before, std::span<const BlackHoleParams> after) {
    AreaCheck c;
    CompensatedSum a0, a1;
    for (const auto& p : before) a0.add(horizon_area(p));
    for (const auto& p : after) a1.add(horizon_area(p));
    c.area_before = a0.value();
    c.area_after = a1.value();
    c.holds = c.area_after >= c.area_before * (1.0 - 1e-14);
    return c;
}

inline AreaCheck area_theorem_check(std::span<const BlackHoleParams> components, const BlackHoleParams& merged) {
    return area_theorem_check(components, std::span<const BlackHoleParams>(&merged, 1));
}

/// S + sum(A_i) / 4.
inline double generalized_entropy(double s_outside, std::span<const BlackHoleParams> holes) {
    CompensatedSum s;
    s.add(s_outside);
    for (const auto& p : holes) s.add(horizon_area(p) / 4.0);
    return s.value();
}

struct EntropyBalance {
    double delta_generalized = 0;
    bool non_decreasing = false;
    /// dS_U sits on zero within 1e-12 of the magnitudes involved.
    bool boundary = false;
};

/// Bookkeeping for an area change `delta_area` accompanied by `delta_s_outside`.
/// Reported only; nothing is enforced.
inline EntropyBalance evaporation_balance(double delta_area, double delta_s_outside) {
    EntropyBalance b;
    b.delta_generalized = delta_s_outside + delta_area / 4.0;
    const double scale = std::max({std::abs(delta_s_outside), std::abs(delta_area / 4.0), 1.0});
    b.boundary = std::abs(b.delta_generalized) <= 1e-12 * scale;
    b.non_decreasing = b.boundary || b.delta_generalized > 0;
    return b;
}

/// r* = r + 2M ln|r/2M - 1|.
inline double tortoise(double r, double m) {
    require(m > 0, "tortoise: mass must be positive");
    require(r > 0, "tortoise: radius must be positive");
    if (r == 2 * m) throw ValidationError("tortoise: coordinate is singular at r = 2M");
    return r + 2 * m * std::log(std::abs((r - 2 * m) / (2 * m)));
}

enum class NullBranch { ingoing, outgoing };
enum class NullRegion { exterior, interior };

struct GeodesicRequest {
    double M = 1.0;
    double r_min = 0;
    double r_max = 0;
    std::size_t samples = 200;
    NullBranch branch = NullBranch::outgoing;
    NullRegion region = NullRegion::exterior;
    /// Required fractional gap between the range and r = 2M.
    double margin = 1e-6;
    /// The curve passes through (r_ref, t_ref); r_ref defaults to r_max.
    double r_ref = std::numeric_limits<double>::quiet_NaN();
    double t_ref = 0.0;
};

struct NullPoint {
    double r = 0;
    double t = 0;
    double v = 0;  // ingoing Eddington-Finkelstein coordinate t + r*
};

/// Radial null curve dt/dr = +-1/(1 - 2M/r), integrated in closed form as t = +-r* + const.
inline std::vector<NullPoint> radial_null_geodesics(const GeodesicRequest& q) {
    require(q.M > 0, "radial_null_geodesics: mass must be positive");
    require(q.samples >= 2, "radial_null_geodesics: need at least two samples");
    require(q.r_min > 0 && q.r_max > q.r_min, "radial_null_geodesics: need 0 < r_min < r_max");
    const double rs = 2 * q.M;
    if (q.region == NullRegion::exterior) {
        require(q.r_min >= rs * (1 + q.margin), "radial_null_geodesics: exterior range crosses or touches r = 2M");
    } else {
        require(q.r_max <= rs * (1 - q.margin), "radial_null_geodesics: interior range crosses or touches r = 2M");
    }
    const double r_ref = std::isnan(q.r_ref) ? q.r_max : q.r_ref;
    require((q.region == NullRegion::exterior) == (r_ref > rs), "radial_null_geodesics: reference point in wrong region");
    const double sign = q.branch == NullBranch::outgoing ? 1.0 : -1.0;
    const double rs_ref = tortoise(r_ref, q.M);
    std::vector<NullPoint> out(q.samples);
    for (std::size_t i = 0; i < q.samples; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(q.samples - 1);
        const double r = q.r_max - f * (q.r_max - q.r_min);
        const double rstar = tortoise(r, q.M);
        const double t = q.t_ref + sign * (rstar - rs_ref);
        out[i] = {r, t, t + rstar};
    }
    return out;
}

}  // namespace qcollapse
