#include <cmath>

#include "experiments.hpp"
#include "qcollapse/gas_redistribution.hpp"
#include "table.hpp"

namespace qclab {

using namespace qcollapse;

Experiment gas_experiment() {
    Experiment e;
    e.name = "gas";
    e.description = "Random pairwise energy exchange relaxing a uniform gas to the Boltzmann distribution";
    e.params = {
        {"n", Kind::integer, "100000", "number of particles"},
        {"e0", Kind::real, "100", "initial energies uniform on [0, e0], meV"},
        {"iters", Kind::integer, "5000000", "pair exchanges"},
        {"bin_width", Kind::real, "5", "histogram bin width, meV"},
        {"samples", Kind::integer, "10", "histograms recorded after the initial one"},
    };
    e.check = [](const ParamSet& p) {
        Problems pr;
        pr.require(p.size("n") >= 2, "n must be >= 2");
        pr.require(p.size("n") <= 100000000, "n must be <= 10^8");
        pr.require(p.real("e0") > 0, "e0 must be positive");
        pr.require(p.integer("iters") >= 1, "iters must be >= 1");
        pr.require(p.real("bin_width") > 0, "bin_width must be positive");
        if (p.real("e0") > 0 && p.real("bin_width") > 0)
            pr.require(p.real("e0") / p.real("bin_width") <= 1e5, "bin_width must be at least e0 / 10^5");
        pr.require(p.size("samples") >= 1 && p.integer("samples") <= p.integer("iters"),
                   "samples must lie in [1, iters]");
        return pr.list;
    };
    e.run = [](const ParamSet& p, std::uint64_t seed) {
        Rng rng(seed);
        auto ens = init_uniform(p.size("n"), p.real("e0"), rng);
        const std::uint64_t iters = p.integer("iters");
        const std::uint64_t every = std::max<std::uint64_t>(1, iters / p.integer("samples"));
        const auto run = run_to_equilibrium(ens, iters, every, p.real("bin_width"), rng);
        const double mean_e = ens.mean();
        const double energy_error = std::abs(ens.current_total() - ens.total) / ens.total;

        const auto& last = run.histograms.back();
        Table hist("gas_histogram.csv",
                   {"bin_center_meV", "count", "probability", "boltzmann_probability"});
        const auto prob = last.probabilities();
        for (std::size_t i = 0; i < last.counts.size(); ++i) {
            const double lo = static_cast<double>(i) * last.bin_width;
            const double q = boltzmann_cdf(lo + last.bin_width, mean_e) - boltzmann_cdf(lo, mean_e);
            hist.row(last.bin_center(i), last.counts[i], prob[i], q);
        }

        Table trace("gas_trace.csv", {"iteration", "kl_nats", "entropy_nats", "tv_to_previous"});
        Json kl = Json::array();
        for (std::size_t k = 0; k < run.histograms.size(); ++k) {
            const double d = kl_from_exponential(run.histograms[k], mean_e);
            const double tv = k ? histogram_tv(run.histograms[k], run.histograms[k - 1]) : std::nan("");
            trace.row(run.iterations[k], d, shannon_entropy_of_histogram(run.histograms[k]), tv);
            kl.push_back({{"iteration", run.iterations[k]}, {"kl", d}});
        }

        RunResult r;
        r.tables.push_back(hist.finish());
        r.tables.push_back(trace.finish());
        r.summary["n"] = ens.size();
        r.summary["iterations"] = iters;
        r.summary["mean_energy_meV"] = mean_e;
        r.summary["sample_mean_energy_meV"] = ens.current_total() / static_cast<double>(ens.size());
        r.summary["relative_energy_error"] = energy_error;
        r.summary["final_kl"] = kl.back()["kl"];
        r.summary["kl_trace"] = kl;
        return r;
    };
    return e;
}

}  // namespace qclab
