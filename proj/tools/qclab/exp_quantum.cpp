#include <cmath>
#include <numbers>

#include "experiments.hpp"
#include "qcollapse/collapse_scheduler.hpp"
#include "qcollapse/perturbation.hpp"
#include "qcollapse/quantum_core.hpp"
#include "qcollapse/screen_collapse.hpp"
#include "table.hpp"

namespace qclab {

using namespace qcollapse;

namespace {

/// Tight-binding chain: on-site energy detuning * k, hopping between neighbours.
HermitianOperator chain_hamiltonian(std::size_t dim, double coupling, double detuning) {
    const auto n = static_cast<Eigen::Index>(dim);
    CMatrix m = CMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        m(k, k) = detuning * static_cast<double>(k);
        if (k + 1 < n) m(k, k + 1) = m(k + 1, k) = coupling;
    }
    return HermitianOperator(std::move(m));
}

Json to_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

}  // namespace

Experiment alternating_experiment() {
    Experiment e;
    e.name = "alternating";
    e.description = "Unitary evolution interrupted by Poisson-timed Born collapses in the computational basis";
    e.params = {
        {"dim", Kind::integer, "4", "Hilbert-space dimension"},
        {"rate", Kind::real, "1", "collapse rate (events per unit time)"},
        {"duration", Kind::real, "10", "total evolution time"},
        {"sample_dt", Kind::real, "0.1", "spacing of recorded state samples"},
        {"coupling", Kind::real, "1", "nearest-neighbour hopping amplitude"},
        {"detuning", Kind::real, "0.5", "on-site energy step between levels"},
        {"initial", Kind::integer, "0", "initial basis state"},
    };
    e.check = [](const ParamSet& p) {
        Problems pr;
        pr.require(p.size("dim") >= 2 && p.size("dim") <= 64, "dim must lie in [2, 64]");
        pr.require(p.real("rate") > 0, "rate must be positive");
        pr.require(p.real("duration") > 0, "duration must be positive");
        pr.require(p.real("sample_dt") > 0, "sample_dt must be positive");
        if (p.real("duration") > 0 && p.real("sample_dt") > 0)
            pr.require(p.real("duration") / p.real("sample_dt") <= 1e6, "more than 10^6 samples requested");
        pr.require(p.size("initial") < p.size("dim"), "initial state index must be < dim");
        pr.require(p.real("rate") * p.real("duration") <= 1e6, "expected event count exceeds 10^6");
        return pr.list;
    };
    e.run = [](const ParamSet& p, std::uint64_t seed) {
        const std::size_t dim = p.size("dim");
        const auto h = chain_hamiltonian(dim, p.real("coupling"), p.real("detuning"));
        const auto basis = computational_basis(dim);
        Rng rng(seed);
        const auto traj = run_alternating(StateVector::basis(dim, p.size("initial")), h, PoissonClock(p.real("rate")),
                                          basis, p.real("duration"), p.real("sample_dt"), rng);
        std::ostringstream os;
        os.imbue(std::locale::classic());
        write_trajectory_csv(os, traj);

        RunResult r;
        r.tables.push_back({"alternating.csv", os.str()});
        std::vector<double> hits(dim, 0.0);
        CompensatedSum info;
        for (const auto& ev : traj.events) {
            hits[ev.chosen_index] += 1;
            info.add(ev.info_change);
        }
        std::vector<double> final_pop(dim);
        for (std::size_t k = 0; k < dim; ++k) final_pop[k] = std::norm(traj.samples.back().state[k]);
        r.summary["events"] = traj.events.size();
        r.summary["expected_events"] = p.real("rate") * p.real("duration");
        r.summary["mean_info_change_nats"] =
            traj.events.empty() ? 0.0 : info.value() / static_cast<double>(traj.events.size());
        r.summary["collapse_index_counts"] = to_json(hits);
        r.summary["final_populations"] = to_json(final_pop);
        return r;
    };
    return e;
}

Experiment screen_experiment() {
    Experiment e;
    e.name = "screen";
    e.description = "Sequential group-by-group absorption on a screen compared with the Born distribution";
    e.params = {
        {"cells", Kind::integer, "100", "number of absorbing cells"},
        {"groups", Kind::integer, "17", "number of groups in the random ordered partition"},
        {"trials", Kind::integer, "100000", "photons per method"},
        {"profile_sigma", Kind::real, "7", "std of the Gaussian |c_k|^2 profile, in cells"},
        {"vacuum", Kind::real, "0", "probability of passing the screen unabsorbed"},
    };
    e.check = [](const ParamSet& p) {
        Problems pr;
        pr.require(p.size("cells") >= 1, "cells must be >= 1");
        pr.require(p.size("groups") >= 1 && p.size("groups") <= p.size("cells"), "groups must lie in [1, cells]");
        pr.require(p.size("trials") >= 1, "trials must be >= 1");
        pr.require(p.real("profile_sigma") > 0, "profile_sigma must be positive");
        pr.require(p.real("vacuum") >= 0 && p.real("vacuum") < 1, "vacuum must lie in [0, 1)");
        return pr.list;
    };
    e.run = [](const ParamSet& p, std::uint64_t seed) {
        const std::size_t n = p.size("cells");
        const double sigma = p.real("profile_sigma"), vac = p.real("vacuum");
        Rng rng(seed);
        std::vector<complex> c(n + 1, 0.0);
        const double mid = 0.5 * static_cast<double>(n + 1);
        double s = 0;
        for (std::size_t k = 1; k <= n; ++k) {
            const double x = static_cast<double>(k) - mid;
            c[k] = std::polar(std::exp(-x * x / (4 * sigma * sigma)), 2 * std::numbers::pi * uniform01(rng));
            s += std::norm(c[k]);
        }
        for (std::size_t k = 1; k <= n; ++k) c[k] *= std::sqrt((1 - vac) / s);
        c[0] = std::sqrt(vac);
        const AbsorptionAmplitudes amps(c, vac > 0);
        const auto part = ScreenPartition::random(n, p.size("groups"), rng);

        const std::size_t trials = p.size("trials");
        std::vector<std::uint64_t> seq(n + 1, 0), direct(n + 1, 0);
        for (std::size_t t = 0; t < trials; ++t) ++seq[sequential_absorption(amps, part, rng)];
        for (std::size_t t = 0; t < trials; ++t) ++direct[direct_born_sample(amps, rng)];
        const auto born = amps.probabilities();
        const auto fs = normalized<std::uint64_t>(seq), fd = normalized<std::uint64_t>(direct);

        Table tab("screen.csv", {"cell", "born_probability", "sequential_frequency", "direct_frequency"});
        for (std::size_t k = 0; k <= n; ++k) tab.row(k, born[k], fs[k], fd[k]);
        RunResult r;
        r.tables.push_back(tab.finish());
        r.summary["cells"] = n;
        r.summary["groups"] = part.groups().size();
        r.summary["trials"] = trials;
        r.summary["tv_sequential_vs_born"] = total_variation(fs, born);
        r.summary["tv_direct_vs_born"] = total_variation(fd, born);
        r.summary["escaped_sequential"] = seq[0];
        r.summary["escaped_direct"] = direct[0];
        return r;
    };
    return e;
}

namespace {

DoubleSlitConfig slit_config(const ParamSet& p) {
    DoubleSlitConfig c;
    c.grid_cells = p.size("grid_cells");
    c.dx = p.real("dx");
    c.screen_cells = p.size("screen_cells");
    c.screen_bin = p.size("screen_bin");
    c.k0 = p.real("k0");
    c.incident_width = p.real("incident_width");
    c.slit_width = p.real("slit_width");
    c.slit_separation = p.real("slit_separation");
    c.source_distance = p.real("source_distance");
    c.screen_distance = p.real("screen_distance");
    c.left_open = p.boolean("left_open");
    c.right_open = p.boolean("right_open");
    c.which_path = p.boolean("which_path");
    c.photons = p.size("photons");
    c.sequential_group = p.size("sequential_group");
    return c;
}

}  // namespace

Experiment doubleslit_experiment() {
    const DoubleSlitConfig d;
    Experiment e;
    e.name = "doubleslit";
    e.description = "Photon-by-photon double-slit histogram, coherent or with which-path collapse at the slits";
    e.params = {
        {"photons", Kind::integer, std::to_string(d.photons), "photons fired"},
        {"which_path", Kind::boolean, "false", "collapse onto one slit before propagation"},
        {"left_open", Kind::boolean, "true", "left slit open"},
        {"right_open", Kind::boolean, "true", "right slit open"},
        {"grid_cells", Kind::integer, std::to_string(d.grid_cells), "transverse grid cells"},
        {"dx", Kind::real, format_double(d.dx), "cell size"},
        {"screen_cells", Kind::integer, std::to_string(d.screen_cells), "central cells forming the screen"},
        {"screen_bin", Kind::integer, std::to_string(d.screen_bin), "cells per histogram bin"},
        {"k0", Kind::real, format_double(d.k0), "longitudinal wavenumber"},
        {"incident_width", Kind::real, format_double(d.incident_width), "std of the incident |psi|^2"},
        {"slit_width", Kind::real, format_double(d.slit_width), "slit width in cells"},
        {"slit_separation", Kind::real, format_double(d.slit_separation), "slit centre spacing in cells"},
        {"source_distance", Kind::real, format_double(d.source_distance), "flight before the slits"},
        {"screen_distance", Kind::real, format_double(d.screen_distance), "flight from slits to screen"},
        {"sequential_group", Kind::integer, "0", "0 for a direct Born draw, else cells per sequential group"},
        {"visibility_window", Kind::real, "0.75", "half-window for visibility, in fringe periods"},
    };
    e.check = [](const ParamSet& p) {
        auto errors = validate_double_slit(slit_config(p));
        if (p.real("visibility_window") <= 0) errors.push_back("visibility_window must be positive");
        return errors;
    };
    e.run = [](const ParamSet& p, std::uint64_t seed) {
        const auto c = slit_config(p);
        Rng rng(seed);
        const auto res = run_double_slit(c, rng);
        Table tab("doubleslit.csv", {"bin", "x_center", "count", "frequency"});
        const double center = 0.5 * static_cast<double>(res.bin_counts.size()) * res.bin_width;
        const auto freq = normalized<std::uint64_t>(res.bin_counts);
        for (std::size_t i = 0; i < res.bin_counts.size(); ++i)
            tab.row(i, (static_cast<double>(i) + 0.5) * res.bin_width - center, res.bin_counts[i], freq[i]);
        RunResult r;
        r.tables.push_back(tab.finish());
        r.summary["photons"] = c.photons;
        r.summary["which_path"] = c.which_path;
        r.summary["fringe_period"] = res.fringe_period;
        r.summary["visibility"] =
            fringe_visibility(res.bin_counts, res.bin_width, p.real("visibility_window") * res.fringe_period);
        r.summary["survival_probability"] = res.survival_probability;
        r.summary["left_probability"] = res.left_probability;
        r.summary["right_probability"] = res.right_probability;
        r.summary["escaped"] = res.escaped;
        return r;
    };
    return e;
}

namespace {

struct PerturbSetup {
    DiscreteSpectrum spectrum;
    HermitianOperator coupling;
};

PerturbSetup perturb_setup(const ParamSet& p) {
    const std::size_t n = p.size("levels");
    std::vector<double> e(n);
    for (std::size_t k = 0; k < n; ++k) e[k] = p.real("spacing") * static_cast<double>(k);
    const auto m = static_cast<Eigen::Index>(n);
    CMatrix w = CMatrix::Zero(m, m);
    for (Eigen::Index k = 0; k + 1 < m; ++k) w(k, k + 1) = w(k + 1, k) = p.real("coupling");
    return {DiscreteSpectrum(std::move(e)), HermitianOperator(std::move(w))};
}

}  // namespace

Experiment perturb_experiment() {
    Experiment e;
    e.name = "perturb";
    e.description = "First-order transition probability under a harmonic drive against exact integration";
    e.params = {
        {"levels", Kind::integer, "2", "equally spaced levels"},
        {"spacing", Kind::real, "1", "level spacing"},
        {"coupling", Kind::real, "0.01", "nearest-neighbour matrix element of the drive"},
        {"initial", Kind::integer, "0", "initial level"},
        {"final", Kind::integer, "1", "final level"},
        {"duration", Kind::real, "20", "interaction time"},
        {"omega_min", Kind::real, "0", "lowest drive frequency"},
        {"omega_max", Kind::real, "2", "highest drive frequency"},
        {"points", Kind::integer, "81", "frequencies in the sweep"},
        {"exact", Kind::boolean, "true", "also integrate the amplitude equations"},
    };
    e.check = [](const ParamSet& p) {
        Problems pr;
        pr.require(p.size("levels") >= 2 && p.size("levels") <= 32, "levels must lie in [2, 32]");
        pr.require(p.real("spacing") > 0, "spacing must be positive");
        pr.require(p.size("initial") < p.size("levels") && p.size("final") < p.size("levels"),
                   "initial and final must be valid level indices");
        pr.require(p.size("initial") != p.size("final"), "initial and final levels must differ");
        pr.require(p.real("duration") > 0, "duration must be positive");
        pr.require(p.real("omega_min") >= 0 && p.real("omega_max") > p.real("omega_min"),
                   "need 0 <= omega_min < omega_max");
        pr.require(p.size("points") >= 2 && p.size("points") <= 100000, "points must lie in [2, 100000]");
        return pr.list;
    };
    e.run = [](const ParamSet& p, std::uint64_t) {
        const auto setup = perturb_setup(p);
        const std::size_t i = p.size("initial"), f = p.size("final"), pts = p.size("points");
        const double T = p.real("duration"), lo = p.real("omega_min"), hi = p.real("omega_max");
        std::vector<double> grid(pts);
        for (std::size_t k = 0; k < pts; ++k) grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(pts - 1);
        const auto curve = resonance_curve(setup.spectrum, setup.coupling, i, f, T, grid);

        const double span = setup.spectrum.energies().back() - setup.spectrum.energies().front();
        const double max_freq = std::max(hi, span);
        const auto steps = static_cast<std::size_t>(std::ceil(60.0 * max_freq * T)) + 1000;

        Table tab("perturb.csv", {"omega", "first_order_probability", "exact_probability", "norm_error"});
        double peak_omega = grid.front(), peak_p = -1, worst_rel = 0, worst_norm = 0;
        for (std::size_t k = 0; k < pts; ++k) {
            double exact = std::nan(""), norm_err = std::nan("");
            if (p.boolean("exact")) {
                const auto run = integrate_interaction_picture(setup.spectrum, HarmonicPerturbation(setup.coupling, grid[k]),
                                                               i, T, steps);
                double s = 0;
                for (const auto& a : run.amplitudes) s += std::norm(a);
                exact = std::norm(run.amplitudes[f]);
                norm_err = std::abs(s - 1.0);
                worst_norm = std::max(worst_norm, norm_err);
                if (exact < 0.05 && exact > 1e-12)
                    worst_rel = std::max(worst_rel, std::abs(curve[k].probability - exact) / exact);
            }
            if (curve[k].probability > peak_p) {
                peak_p = curve[k].probability;
                peak_omega = grid[k];
            }
            tab.row(grid[k], curve[k].probability, exact, norm_err);
        }
        RunResult r;
        r.tables.push_back(tab.finish());
        r.summary["bohr_frequency"] = std::abs(setup.spectrum.bohr_frequency(f, i));
        r.summary["peak_omega"] = peak_omega;
        r.summary["peak_probability"] = peak_p;
        if (p.boolean("exact")) {
            r.summary["integrator_steps"] = steps;
            r.summary["max_relative_difference_weak"] = worst_rel;
            r.summary["max_norm_error"] = worst_norm;
        }
        return r;
    };
    return e;
}

}  // namespace qclab
