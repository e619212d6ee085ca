#pragma once

// A photon meeting a screen of absorbers: sequential group-by-group
// collapse versus a single Born draw, and a double-slit experiment on a
// transverse grid (paraxial free propagation, hbar = 1).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcollapse/numerics.hpp"
#include "qcollapse/quantum_core.hpp"
#include "qcollapse/spectral.hpp"

namespace qcollapse {

/// c[0] is the vacuum channel (zero when absent); c[1..N] are absorbers.
class AbsorptionAmplitudes {
public:
    AbsorptionAmplitudes(std::vector<complex> c, bool has_vacuum) : c_(std::move(c)), vacuum_(has_vacuum) {
        require(c_.size() >= 2, "AbsorptionAmplitudes: need at least one absorber");
        require(vacuum_ || c_[0] == 0.0, "AbsorptionAmplitudes: vacuum amplitude set but channel absent");
        double s = 0;
        for (const auto& a : c_) s += std::norm(a);
        require(std::abs(s - 1.0) <= 1e-9, "AbsorptionAmplitudes: amplitudes must be normalized");
    }

    /// Absorbers only, no vacuum channel.
    static AbsorptionAmplitudes absorbers(std::span<const complex> c) {
        std::vector<complex> v{0.0};
        v.insert(v.end(), c.begin(), c.end());
        return {std::move(v), false};
    }

    std::size_t absorber_count() const { return c_.size() - 1; }
    bool has_vacuum() const { return vacuum_; }
    const std::vector<complex>& amplitudes() const { return c_; }
    std::vector<double> probabilities() const {
        std::vector<double> p(c_.size());
        for (std::size_t k = 0; k < c_.size(); ++k) p[k] = std::norm(c_[k]);
        return p;
    }

private:
    std::vector<complex> c_;
    bool vacuum_;
};

/// Ordered, disjoint, covering groups of absorber indices (1-based).
class ScreenPartition {
public:
    ScreenPartition(std::vector<std::vector<std::size_t>> groups, std::size_t n_absorbers) : groups_(std::move(groups)) {
        std::vector<bool> seen(n_absorbers + 1, false);
        std::size_t covered = 0;
        for (const auto& g : groups_) {
            require(!g.empty(), "ScreenPartition: empty group");
            for (std::size_t k : g) {
                require(k >= 1 && k <= n_absorbers, "ScreenPartition: index out of range");
                require(!seen[k], "ScreenPartition: groups overlap");
                seen[k] = true;
                ++covered;
            }
        }
        require(covered == n_absorbers, "ScreenPartition: groups do not cover every absorber");
    }

    static ScreenPartition contiguous(std::size_t n_absorbers, std::size_t group_size) {
        require(group_size >= 1, "ScreenPartition: group size must be >= 1");
        std::vector<std::vector<std::size_t>> g;
        for (std::size_t k = 1; k <= n_absorbers; k += group_size) {
            std::vector<std::size_t> grp;
            for (std::size_t j = k; j < std::min(n_absorbers + 1, k + group_size); ++j) grp.push_back(j);
            g.push_back(std::move(grp));
        }
        return {std::move(g), n_absorbers};
    }

    static ScreenPartition random(std::size_t n_absorbers, std::size_t n_groups, Rng& rng) {
        require(n_groups >= 1 && n_groups <= n_absorbers, "ScreenPartition: bad group count");
        std::vector<std::size_t> idx(n_absorbers);
        std::iota(idx.begin(), idx.end(), 1);
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<std::vector<std::size_t>> g(n_groups);
        for (std::size_t i = 0; i < n_groups; ++i) g[i].push_back(idx[i]);
        std::uniform_int_distribution<std::size_t> pick(0, n_groups - 1);
        for (std::size_t i = n_groups; i < n_absorbers; ++i) g[pick(rng)].push_back(idx[i]);
        return {std::move(g), n_absorbers};
    }

    const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }

private:
    std::vector<std::vector<std::size_t>> groups_;
};

/// Decides one group's collapse. `probabilities` lists the current
/// normalized absorption probability of each member followed by the
/// rejection probability; the return value indexes that list.
using GroupDecision = std::function<std::size_t(std::span<const double> probabilities)>;

/// Sequential collapse over the partition. For each group in order, a member
/// absorbs with its current normalized |c_k|^2; otherwise the group's
/// amplitudes are zeroed and the remainder renormalized by 1/sqrt(q), where
/// q is the surviving probability. Returns the absorbing index, or 0 when
/// every group rejected (photon escapes).
///
/// The renormalization is carried as the surviving mass `remaining`, so the
/// current normalized weight of channel k is |c_k|^2 / remaining.
inline std::size_t sequential_absorption(const AbsorptionAmplitudes& amps, const ScreenPartition& part,
                                         const GroupDecision& decide) {
    const auto w = amps.probabilities();
    const auto& groups = part.groups();
    std::vector<double> group_mass(groups.size());
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        for (std::size_t k : groups[gi]) group_mass[gi] += w[k];
    // remaining[gi]: vacuum plus every group not yet excluded before gi
    std::vector<double> remaining(groups.size() + 1);
    remaining[groups.size()] = amps.has_vacuum() ? w[0] : 0.0;
    for (std::size_t gi = groups.size(); gi-- > 0;) remaining[gi] = remaining[gi + 1] + group_mass[gi];

    std::vector<double> probs;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& g = groups[gi];
        const double q = remaining[gi];
        if (!(q > 0)) throw NumericError("sequential_absorption: normalization failure after rejection");
        probs.assign(g.size() + 1, 0.0);
        for (std::size_t m = 0; m < g.size(); ++m) probs[m] = w[g[m]] / q;
        probs[g.size()] = remaining[gi + 1] / q;
        const std::size_t choice = decide(probs);
        require(choice <= g.size(), "sequential_absorption: decision out of range");
        if (choice < g.size()) return g[choice];
    }
    return 0;
}

inline std::size_t sequential_absorption(const AbsorptionAmplitudes& amps, const ScreenPartition& part, Rng& rng) {
    return sequential_absorption(amps, part, [&rng](std::span<const double> p) { return sample_index(p, uniform01(rng)); });
}

/// Single Born draw over all channels (vacuum included).
inline std::size_t direct_born_sample(const AbsorptionAmplitudes& amps, Rng& rng) {
    const auto p = amps.probabilities();
    return sample_index(p, uniform01(rng));
}

// ---------------------------------------------------------------------------
// Grid wavefunctions

struct GridWavefunction {
    std::vector<complex> psi;
    double dx = 1.0;
    std::size_t nx = 0;
    std::size_t ny = 1;  // 1 for a 1D grid

    std::size_t dims() const { return ny == 1 ? 1 : 2; }
    double cell() const { return dims() == 1 ? dx : dx * dx; }
    double norm2() const { return grid_norm2(psi, cell()); }
    Grid1D x_grid() const { return Grid1D::centered(nx, dx); }
    Grid1D y_grid() const { return Grid1D::centered(ny, dx); }
    complex& at(std::size_t ix, std::size_t iy = 0) { return psi[iy * nx + ix]; }
    complex at(std::size_t ix, std::size_t iy = 0) const { return psi[iy * nx + ix]; }

    void validate() const {
        require(nx >= 2 && ny >= 1 && psi.size() == nx * ny, "GridWavefunction: extent does not match data");
        require(std::abs(norm2() - 1.0) <= 1e-8, "GridWavefunction: discrete L2 norm must be 1");
    }
    void normalize() {
        const double n = norm2();
        require(n > 0, "GridWavefunction: zero wavefunction");
        const double s = 1.0 / std::sqrt(n);
        for (auto& a : psi) a *= s;
    }
};

/// Gaussian packet on a centered 1D grid: |psi|^2 has std `sigma`.
inline GridWavefunction gaussian_1d(std::size_t n, double dx, double x0, double sigma, double k0) {
    GridWavefunction w{std::vector<complex>(n), dx, n, 1};
    const Grid1D g = w.x_grid();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.x(i) - x0;
        w.psi[i] = std::exp(-x * x / (4 * sigma * sigma)) * std::polar(1.0, k0 * g.x(i));
    }
    w.normalize();
    return w;
}

/// Probability in the outer sixteenth of the grid on any side.
inline double boundary_mass(const GridWavefunction& w) {
    if (w.ny == 1) return boundary_mass_1d(w.psi);
    const std::size_t bx = w.nx / 16, by = w.ny / 16;
    double edge = 0, total = 0;
    for (std::size_t iy = 0; iy < w.ny; ++iy)
        for (std::size_t ix = 0; ix < w.nx; ++ix) {
            const double p = std::norm(w.at(ix, iy));
            total += p;
            if (ix < bx || ix >= w.nx - bx || iy < by || iy >= w.ny - by) edge += p;
        }
    return edge / total;
}

/// Exact free evolution (V = 0) by Fourier phases, n_steps of length dt.
/// Throws when more than `guard` of the probability reaches the boundary
/// band, where periodic wrap-around would corrupt the solution.
inline GridWavefunction free_propagate(GridWavefunction w, double mass, double dt, std::size_t n_steps,
                                       double guard = 1e-4) {
    w.validate();
    require(mass > 0, "free_propagate: mass must be positive");
    require(boundary_mass(w) <= guard, "free_propagate: wavefunction touches the grid boundary");
    Fourier1D fft;
    for (std::size_t s = 0; s < n_steps; ++s) {
        if (w.ny == 1) {
            apply_free_phase_1d(w.psi, w.x_grid(), mass, dt, fft);
            continue;
        }
        std::vector<complex> line(w.nx);
        for (std::size_t iy = 0; iy < w.ny; ++iy) {
            for (std::size_t ix = 0; ix < w.nx; ++ix) line[ix] = w.at(ix, iy);
            apply_free_phase_1d(line, w.x_grid(), mass, dt, fft);
            for (std::size_t ix = 0; ix < w.nx; ++ix) w.at(ix, iy) = line[ix];
        }
        line.resize(w.ny);
        for (std::size_t ix = 0; ix < w.nx; ++ix) {
            for (std::size_t iy = 0; iy < w.ny; ++iy) line[iy] = w.at(ix, iy);
            apply_free_phase_1d(line, w.y_grid(), mass, dt, fft);
            for (std::size_t iy = 0; iy < w.ny; ++iy) w.at(ix, iy) = line[iy];
        }
    }
    if (boundary_mass(w) > guard) throw ValidationError("free_propagate: grid too small, wavefunction reached the boundary");
    return w;
}

struct MaskResult {
    GridWavefunction state;
    double survival_probability = 0.0;
    /// -ln(survival): information carried by the (irreversible) mask collapse.
    double info_change = 0.0;
};

/// Projects onto the open cells (mask value 1) and renormalizes.
inline MaskResult apply_slits(const GridWavefunction& w, std::span<const std::uint8_t> mask) {
    w.validate();
    require(mask.size() == w.psi.size(), "apply_slits: mask does not match grid");
    MaskResult r{w, 0.0, 0.0};
    for (std::size_t i = 0; i < mask.size(); ++i) {
        require(mask[i] <= 1, "apply_slits: mask values must be 0 or 1");
        if (!mask[i]) r.state.psi[i] = 0.0;
    }
    r.survival_probability = r.state.norm2();
    if (!(r.survival_probability > tolerances().forbidden_probability))
        throw ValidationError("apply_slits: mask blocks the entire wavefunction");
    r.state.normalize();
    r.info_change = -std::log(r.survival_probability);
    return r;
}

// ---------------------------------------------------------------------------
// Double slit

/// Transverse (x) geometry in grid cells; propagation along z is mapped to
/// time with mass = k0 (paraxial free Schrodinger equation).
struct DoubleSlitConfig {
    std::size_t grid_cells = 4096;
    double dx = 1.0;
    std::size_t screen_cells = 1024;
    std::size_t screen_bin = 8;       // cells per histogram bin
    double k0 = 1.0;                  // longitudinal wavenumber (2 pi / wavelength)
    double incident_width = 120.0;    // std of |psi|^2 at the slit plane, in length units
    double slit_width = 8.0;          // cells
    double slit_separation = 48.0;    // center-to-center, cells
    double source_distance = 0.0;     // free flight before the slits
    double screen_distance = 500.0;   // slit plane to screen
    bool left_open = true;
    bool right_open = true;
    bool which_path = false;
    std::size_t photons = 100000;
    /// 0: direct Born draw per photon; >0: sequential collapse with
    /// contiguous groups of this many screen cells.
    std::size_t sequential_group = 0;
    double boundary_guard = 1e-3;

    double fringe_period() const { return 2.0 * std::numbers::pi * screen_distance / (k0 * slit_separation * dx); }
};

/// Aggregated validation messages (empty when the geometry is usable).
inline std::vector<std::string> validate_double_slit(const DoubleSlitConfig& c) {
    std::vector<std::string> err;
    if (c.grid_cells < 64) err.push_back("grid_cells must be >= 64");
    if (c.dx <= 0) err.push_back("dx must be positive");
    if (c.screen_cells == 0 || c.screen_cells > c.grid_cells) err.push_back("screen_cells must be in [1, grid_cells]");
    if (c.screen_bin == 0 || c.screen_cells % c.screen_bin != 0) err.push_back("screen_bin must divide screen_cells");
    if (c.k0 <= 0) err.push_back("k0 must be positive");
    if (c.slit_width < 1) err.push_back("slit_width must be at least one cell");
    if (c.slit_separation < 8) err.push_back("slit separation must be >= 8 cells");
    if (c.slit_separation <= c.slit_width) err.push_back("slit separation must exceed slit width");
    if (c.screen_distance <= 0) err.push_back("screen_distance must be positive");
    if (c.source_distance < 0) err.push_back("source_distance must be nonnegative");
    if (c.incident_width <= 0) err.push_back("incident_width must be positive");
    if (!c.left_open && !c.right_open) err.push_back("at least one slit must be open");
    if (c.photons == 0) err.push_back("photons must be positive");
    if (err.empty() && c.screen_cells * c.dx / c.fringe_period() < 5.0)
        err.push_back("geometry develops fewer than 5 fringes across the screen");
    return err;
}

struct DoubleSlitResult {
    std::vector<std::uint64_t> cell_counts;  // per screen cell
    std::vector<std::uint64_t> bin_counts;   // per histogram bin
    double left_probability = 0.0;           // mask-split weights (which-path)
    double right_probability = 0.0;
    double survival_probability = 0.0;
    double bin_width = 0.0;                  // length units
    double fringe_period = 0.0;
    std::uint64_t escaped = 0;               // photons that missed the screen line
};

namespace detail {

inline std::vector<std::uint8_t> slit_mask(const DoubleSlitConfig& c, bool left, bool right) {
    const Grid1D g = Grid1D::centered(c.grid_cells, c.dx);
    std::vector<std::uint8_t> m(c.grid_cells, 0);
    const double half_w = 0.5 * c.slit_width * c.dx;
    const double offset = 0.5 * c.slit_separation * c.dx;
    for (std::size_t i = 0; i < c.grid_cells; ++i) {
        const double x = g.x(i);
        if (left && std::abs(x + offset) < half_w) m[i] = 1;
        if (right && std::abs(x - offset) < half_w) m[i] = 1;
    }
    return m;
}

inline AbsorptionAmplitudes screen_amplitudes(const GridWavefunction& w, std::size_t screen_cells) {
    const std::size_t first = (w.nx - screen_cells) / 2;
    std::vector<complex> c(screen_cells + 1, 0.0);
    double on_screen = 0;
    for (std::size_t i = 0; i < screen_cells; ++i) on_screen += std::norm(w.psi[first + i]);
    // Probability landing off the screen line is the vacuum channel.
    const double total = w.norm2() / w.dx;
    const double off = std::max(0.0, total - on_screen);
    c[0] = std::sqrt(off / total);
    for (std::size_t i = 0; i < screen_cells; ++i) c[i + 1] = w.psi[first + i] / std::sqrt(total);
    double s = 0;
    for (auto& a : c) s += std::norm(a);
    for (auto& a : c) a /= std::sqrt(s);
    return {std::move(c), true};
}

}  // namespace detail

/// Screen-plane wavefunction for a given set of open slits.
inline GridWavefunction double_slit_screen_state(const DoubleSlitConfig& c, bool left, bool right,
                                                 double* survival = nullptr) {
    GridWavefunction w = gaussian_1d(c.grid_cells, c.dx, 0.0, c.incident_width, 0.0);
    if (c.source_distance > 0) w = free_propagate(std::move(w), c.k0, c.source_distance, 1, c.boundary_guard);
    const auto mask = detail::slit_mask(c, left, right);
    MaskResult m = apply_slits(w, mask);
    if (survival) *survival = m.survival_probability;
    return free_propagate(std::move(m.state), c.k0, c.screen_distance, 1, c.boundary_guard);
}

/// Fires `photons` photons through the slits and histograms impacts on the
/// screen line. The unitary legs are deterministic, so each distinct branch
/// (coherent / left / right) is propagated once and then sampled per photon.
inline DoubleSlitResult run_double_slit(const DoubleSlitConfig& c, Rng& rng) {
    const auto errors = validate_double_slit(c);
    if (!errors.empty()) throw ValidationError("double slit: " + errors.front());

    DoubleSlitResult r;
    r.cell_counts.assign(c.screen_cells, 0);
    r.bin_counts.assign(c.screen_cells / c.screen_bin, 0);
    r.bin_width = static_cast<double>(c.screen_bin) * c.dx;
    r.fringe_period = c.fringe_period();

    // mask-split probabilities of the incident packet
    {
        GridWavefunction w = gaussian_1d(c.grid_cells, c.dx, 0.0, c.incident_width, 0.0);
        if (c.source_distance > 0) w = free_propagate(std::move(w), c.k0, c.source_distance, 1, c.boundary_guard);
        const auto ml = detail::slit_mask(c, c.left_open, false);
        const auto mr = detail::slit_mask(c, false, c.right_open);
        double pl = 0, pr = 0;
        for (std::size_t i = 0; i < c.grid_cells; ++i) {
            pl += ml[i] * std::norm(w.psi[i]) * c.dx;
            pr += mr[i] * std::norm(w.psi[i]) * c.dx;
        }
        r.survival_probability = pl + pr;
        r.left_probability = pl / (pl + pr);
        r.right_probability = pr / (pl + pr);
    }

    std::vector<AbsorptionAmplitudes> branches;
    std::vector<double> branch_weight;
    if (c.which_path && c.left_open && c.right_open) {
        branches.push_back(detail::screen_amplitudes(double_slit_screen_state(c, true, false), c.screen_cells));
        branches.push_back(detail::screen_amplitudes(double_slit_screen_state(c, false, true), c.screen_cells));
        branch_weight = {r.left_probability, r.right_probability};
    } else {
        branches.push_back(
            detail::screen_amplitudes(double_slit_screen_state(c, c.left_open, c.right_open), c.screen_cells));
        branch_weight = {1.0};
    }

    std::optional<ScreenPartition> part;
    if (c.sequential_group > 0) part = ScreenPartition::contiguous(c.screen_cells, c.sequential_group);

    for (std::size_t n = 0; n < c.photons; ++n) {
        const std::size_t b = branches.size() == 1 ? 0 : sample_index(branch_weight, uniform01(rng));
        std::size_t k = part ? sequential_absorption(branches[b], *part, rng) : direct_born_sample(branches[b], rng);
        if (k == 0) {
            ++r.escaped;
            continue;
        }
        ++r.cell_counts[k - 1];
        ++r.bin_counts[(k - 1) / c.screen_bin];
    }
    return r;
}

/// (I_max - I_min) / (I_max + I_min) over bins whose centers lie within
/// `half_window` of the screen center.
inline double fringe_visibility(std::span<const std::uint64_t> bins, double bin_width, double half_window) {
    const double center = 0.5 * static_cast<double>(bins.size()) * bin_width;
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double x = (static_cast<double>(i) + 0.5) * bin_width - center;
        if (std::abs(x) > half_window) continue;
        lo = std::min(lo, static_cast<double>(bins[i]));
        hi = std::max(hi, static_cast<double>(bins[i]));
    }
    require(hi >= lo && hi > 0, "fringe_visibility: empty window");
    return (hi - lo) / (hi + lo);
}

}  // namespace qcollapse
