#include <cmath>

#include "experiments.hpp"
#include "qcollapse/classical_limit.hpp"
#include "table.hpp"

namespace qclab {

using namespace qcollapse;

namespace {

const std::vector<std::string> kSystems = {"harmonic", "pendulum", "henon_heiles", "quartic", "free"};

/// Starting point used when q and p are left empty.
PhaseSpacePoint default_start(const HamiltonianSystem& sys) {
    if (sys.name() == "henon_heiles") {
        PhaseSpacePoint x{{0.0, -0.1}, {0.0, 0.0}};
        x.p[0] = std::sqrt(2 * (0.125 - sys.potential(x.q)));
        return x;
    }
    if (sys.name() == "free") return {{0.0}, {1.0}};
    return {{1.0}, {0.0}};
}

/// Resolves the q/p lists against the system; appends problems to `errors`.
PhaseSpacePoint start_point(const ParamSet& p, const HamiltonianSystem& sys, std::vector<std::string>& errors) {
    PhaseSpacePoint x = default_start(sys);
    const auto q = parse_real_list(p.text("q"));
    const auto mom = parse_real_list(p.text("p"));
    if (!q || !mom) {
        errors.push_back("q and p must be comma-separated numbers");
        return x;
    }
    if (!q->empty()) {
        if (q->size() != sys.dof())
            errors.push_back("q needs " + std::to_string(sys.dof()) + " component(s) for " + sys.name());
        else
            x.q = *q;
    }
    if (!mom->empty()) {
        if (mom->size() != sys.dof())
            errors.push_back("p needs " + std::to_string(sys.dof()) + " component(s) for " + sys.name());
        else
            x.p = *mom;
    }
    return x;
}

std::vector<std::string> point_columns(std::size_t dof) {
    std::vector<std::string> c;
    for (std::size_t i = 0; i < dof; ++i) c.push_back("q" + std::to_string(i));
    for (std::size_t i = 0; i < dof; ++i) c.push_back("p" + std::to_string(i));
    return c;
}

}  // namespace

Experiment classical_experiment() {
    Experiment e;
    e.name = "classical";
    e.description = "Symplectic trajectory with Lyapunov exponent and Liouville volume diagnostics";
    e.params = {
        {"system", Kind::text, "harmonic", "harmonic | pendulum | henon_heiles | quartic | free", kSystems},
        {"dt", Kind::real, "0.01", "time step"},
        {"duration", Kind::real, "2000", "integration time"},
        {"q", Kind::text, "", "initial positions, comma separated (empty: system default)"},
        {"p", Kind::text, "", "initial momenta, comma separated (empty: system default)"},
        {"drag", Kind::real, "0", "linear momentum drag gamma"},
        {"eps", Kind::real, "1e-8", "initial shadow separation for the Lyapunov estimate"},
        {"renormalize_every", Kind::integer, "10", "steps between shadow renormalizations"},
        {"simplex_edge", Kind::real, "1e-6", "edge of the simplex tracked for the volume ratio"},
        {"record_every", Kind::integer, "100", "steps between trajectory rows"},
    };
    e.check = [](const ParamSet& p) {
        Problems pr;
        const auto sys = systems::by_name(p.text("system"));
        start_point(p, sys, pr.list);
        pr.require(p.real("dt") > 0 && p.real("dt") <= 0.1, "dt must lie in (0, 0.1]");
        pr.require(p.real("duration") > 0, "duration must be positive");
        if (p.real("dt") > 0) pr.require(p.real("duration") / p.real("dt") <= 1e8, "more than 10^8 steps requested");
        pr.require(p.real("drag") >= 0, "drag must be nonnegative");
        pr.require(p.real("eps") > 0 && p.real("eps") < 1e-2, "eps must lie in (0, 0.01)");
        pr.require(p.size("renormalize_every") >= 1, "renormalize_every must be >= 1");
        pr.require(p.real("simplex_edge") > 0 && p.real("simplex_edge") <= 1e-2, "simplex_edge must lie in (0, 0.01]");
        pr.require(p.size("record_every") >= 1, "record_every must be >= 1");
        return pr.list;
    };
    e.run = [](const ParamSet& p, std::uint64_t seed) {
        const auto sys = systems::by_name(p.text("system"));
        std::vector<std::string> ignored;
        const auto x0 = start_point(p, sys, ignored);
        const double dt = p.real("dt"), T = p.real("duration"), drag = p.real("drag");
        const std::size_t steps = steps_for(T, dt), every = p.size("record_every");

        auto cols = point_columns(sys.dof());
        cols.insert(cols.begin(), "t");
        cols.push_back("energy");
        Table traj("classical.csv", cols);
        auto emit = [&](double t, const PhaseSpacePoint& x) {
            auto& w = traj.writer();
            w.field(t);
            for (double v : x.flat()) w.field(v);
            w.field(sys.energy(x));
            w.end_row();
        };
        const double e0 = sys.energy(x0);
        double drift = 0;
        PhaseSpacePoint x = x0;
        emit(0.0, x);
        for (std::size_t s = 1; s <= steps; ++s) {
            try {
                x = hamilton_step(sys, std::move(x), dt, drag);
            } catch (const NumericError& ex) {
                throw NumericError(std::string(ex.what()) + " at t = " + format_double(static_cast<double>(s) * dt) +
                                   " (" + sys.name() + ", dt = " + format_double(dt) + ")");
            }
            drift = std::max(drift, std::abs(sys.energy(x) - e0));
            if (s % every == 0 || s == steps) emit(static_cast<double>(s) * dt, x);
        }

        RunResult r;
        r.tables.push_back(traj.finish());
        r.summary["system"] = sys.name();
        r.summary["steps"] = steps;
        r.summary["initial_energy"] = e0;
        r.summary["max_energy_deviation"] = drift;
        const auto simplex = make_simplex(x0, p.real("simplex_edge"));
        r.summary["volume_ratio"] = liouville_volume_check(sys, simplex, T, dt, drag);
        r.summary["expected_volume_ratio"] = std::exp(-drag * static_cast<double>(sys.dof()) * static_cast<double>(steps) * dt);
        if (drag == 0) {
            Rng rng(seed);
            r.summary["lyapunov"] = lyapunov_estimate(sys, x0, p.real("eps"), T, dt, p.size("renormalize_every"), rng);
        }
        return r;
    };
    return e;
}

Experiment entropy_experiment() {
    Experiment e;
    e.name = "entropy";
    e.description = "Coarse-grained entropy of a phase-space cloud with and without collapse jitter, plus reversal replay";
    e.params = {
        {"system", Kind::text, "harmonic", "harmonic | pendulum | henon_heiles | quartic | free", kSystems},
        {"points", Kind::integer, "10000", "cloud size"},
        {"rate", Kind::real, "1", "per-point collapse rate (0 disables collapse)"},
        {"jitter", Kind::real, "0.05", "std of the collapse kick on every phase-space axis"},
        {"duration", Kind::real, "20", "evolution time"},
        {"dt", Kind::real, "0.01", "time step"},
        {"checkpoint_every", Kind::integer, "100", "steps between entropy checkpoints"},
        {"q", Kind::text, "", "cloud centre positions (empty: system default)"},
        {"p", Kind::text, "", "cloud centre momenta (empty: system default)"},
        {"half_width", Kind::real, "0.1", "half-width of the initial box on every axis"},
        {"grid_extent", Kind::real, "3", "coarse grid covers [-extent, extent] on every axis"},
        {"grid_bins", Kind::integer, "120", "coarse grid bins per axis"},
        {"replay", Kind::boolean, "true", "also run the momentum-reversal replay"},
    };
    e.check = [](const ParamSet& p) {
        Problems pr;
        const auto sys = systems::by_name(p.text("system"));
        start_point(p, sys, pr.list);
        pr.require(p.size("points") >= EnsembleOptions{}.min_points, "points must be >= 10000 for a resolved histogram");
        pr.require(p.size("points") <= 10000000, "points must be <= 10^7");
        pr.require(p.real("rate") >= 0, "rate must be nonnegative");
        pr.require(p.real("jitter") >= 0, "jitter must be nonnegative");
        pr.require(p.real("dt") > 0 && p.real("dt") <= 0.1, "dt must lie in (0, 0.1]");
        pr.require(p.real("duration") > 0, "duration must be positive");
        pr.require(p.size("checkpoint_every") >= 1, "checkpoint_every must be >= 1");
        pr.require(p.real("half_width") > 0, "half_width must be positive");
        pr.require(p.real("grid_extent") > 0, "grid_extent must be positive");
        pr.require(p.size("grid_bins") >= 2, "grid_bins must be >= 2");
        if (p.size("grid_bins") >= 2)
            pr.require(std::pow(static_cast<double>(p.size("grid_bins")), 2.0 * static_cast<double>(sys.dof())) <= 1e7,
                       "coarse grid exceeds 10^7 cells");
        return pr.list;
    };
    e.run = [](const ParamSet& p, std::uint64_t seed) {
        const auto sys = systems::by_name(p.text("system"));
        std::vector<std::string> ignored;
        const auto centre = start_point(p, sys, ignored);
        const std::size_t axes = 2 * sys.dof();
        const std::vector<double> hw(axes, p.real("half_width"));
        Rng rng(seed);
        auto [cloud, measure] = uniform_box_cloud(centre, hw, p.size("points"), rng);
        const double ext = p.real("grid_extent");
        const CoarseGrid grid{std::vector<double>(axes, -ext), std::vector<double>(axes, ext),
                              std::vector<std::size_t>(axes, p.size("grid_bins"))};
        EnsembleOptions opt;
        opt.dt = p.real("dt");
        opt.checkpoint_every = p.size("checkpoint_every");
        if (p.real("rate") > 0) {
            opt.clock = PoissonClock(p.real("rate"));
            opt.jitter = p.real("jitter");
        }
        const auto series = ensemble_entropy_evolution(sys, cloud, measure, grid, p.real("duration"), opt, rng);

        Table tab("entropy.csv", {"t", "coarse_entropy_nats", "fine_entropy_nats", "collapses"});
        std::size_t up = 0;
        double fine_dev = 0;
        for (std::size_t i = 0; i < series.size(); ++i) {
            const auto& c = series[i];
            tab.row(c.time, c.coarse, c.fine, c.collapses);
            if (i) up += c.coarse > series[i - 1].coarse ? 1 : 0;
            if (!std::isnan(c.fine)) fine_dev = std::max(fine_dev, std::abs(c.fine - series.front().fine));
        }
        RunResult r;
        r.tables.push_back(tab.finish());
        r.summary["system"] = sys.name();
        r.summary["collapse"] = opt.clock.has_value();
        r.summary["checkpoints"] = series.size();
        r.summary["increasing_fraction"] =
            series.size() > 1 ? static_cast<double>(up) / static_cast<double>(series.size() - 1) : 0.0;
        r.summary["initial_coarse_entropy"] = series.front().coarse;
        r.summary["final_coarse_entropy"] = series.back().coarse;
        r.summary["collapses"] = series.back().collapses;
        if (!opt.clock) r.summary["max_fine_entropy_deviation"] = fine_dev;
        if (p.boolean("replay")) {
            const auto back = momentum_reversal_replay(sys, cloud, p.real("duration"), opt, rng);
            r.summary["replay_tv_distance"] = cloud_tv_distance(back, cloud, grid);
        }
        return r;
    };
    return e;
}

}  // namespace qclab
