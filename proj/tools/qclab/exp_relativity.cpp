#include <cmath>

#include "experiments.hpp"
#include "qcollapse/blackhole_thermo.hpp"
#include "table.hpp"

namespace qclab {

using namespace qcollapse;

namespace {

std::vector<std::string> horizon_problems(double m, double q, double l) {
    Problems pr;
    pr.require(m > 0, "m must be positive");
    if (m > 0) {
        const auto bh = BlackHoleParams::from_angular_momentum(m, q, l);
        if (bh.discriminant() < 0 && !bh.extremal()) {
            std::ostringstream os;
            os.precision(17);
            os << "naked singularity: discriminant M^2 - Q^2 - a^2 = " << bh.discriminant() << " < 0";
            pr.list.push_back(os.str());
        }
    }
    return pr.list;
}

}  // namespace

Experiment blackhole_experiment() {
    Experiment e;
    e.name = "blackhole";
    e.description = "Horizon, area, irreducible mass, Hawking temperature and Smarr coefficients of a Kerr-Newman hole";
    e.params = {
        {"m", Kind::real, "1", "mass M"},
        {"q", Kind::real, "0", "charge Q"},
        {"l", Kind::real, "0", "angular momentum L = a M"},
    };
    e.check = [](const ParamSet& p) { return horizon_problems(p.real("m"), p.real("q"), p.real("l")); };
    e.run = [](const ParamSet& p, std::uint64_t) {
        const auto bh = BlackHoleParams::from_angular_momentum(p.real("m"), p.real("q"), p.real("l"));
        const auto h = horizon_data(bh);
        const auto c = smarr_coefficients(bh);

        Table tab("blackhole.csv", {"m", "q", "l", "r_plus", "r_minus", "area", "irreducible_mass", "entropy",
                                    "temperature", "surface_gravity", "tension", "omega", "phi"});
        tab.row(bh.M, bh.Q, bh.angular_momentum(), h.r_plus, h.r_minus, h.area, h.irreducible_mass, h.entropy,
                h.temperature, h.kappa, c.tension, c.omega, c.phi);
        RunResult r;
        r.tables.push_back(tab.finish());
        r.summary["params"] = {{"m", bh.M}, {"q", bh.Q}, {"l", bh.angular_momentum()}, {"a", bh.a}};
        r.summary["horizon"] = {{"r_plus", h.r_plus},
                                {"r_minus", h.r_minus},
                                {"area", h.area},
                                {"irreducible_mass", h.irreducible_mass},
                                {"entropy", h.entropy},
                                {"temperature", h.temperature},
                                {"surface_gravity", h.kappa},
                                {"extremal", h.extremal}};
        r.summary["smarr"] = {{"tension", c.tension}, {"omega", c.omega}, {"phi", c.phi}};
        // Central differences step across the horizon condition for (near-)extremal holes.
        try {
            const auto fd = smarr_finite_difference(bh);
            r.summary["smarr_finite_difference"] = {{"tension", fd.tension}, {"omega", fd.omega}, {"phi", fd.phi}};
        } catch (const ValidationError&) {
            r.summary["smarr_finite_difference"] = nullptr;
        }
        return r;
    };
    return e;
}

Experiment geodesics_experiment() {
    Experiment e;
    e.name = "geodesics";
    e.description = "Radial null geodesics of a Schwarzschild hole in (r, t) and ingoing Eddington-Finkelstein v";
    e.params = {
        {"m", Kind::real, "1", "mass M"},
        {"r_min", Kind::real, "2.2", "smallest radius"},
        {"r_max", Kind::real, "20", "largest radius"},
        {"samples", Kind::integer, "200", "points per curve"},
        {"branch", Kind::text, "both", "outgoing | ingoing | both", {"outgoing", "ingoing", "both"}},
        {"region", Kind::text, "exterior", "exterior | interior", {"exterior", "interior"}},
        {"margin", Kind::real, "1e-6", "fractional gap kept from r = 2M"},
        {"r_ref", Kind::real, "0", "radius where the curve has t = t_ref (0 selects r_max)"},
        {"t_ref", Kind::real, "0", "time at r_ref"},
    };
    auto request = [](const ParamSet& p, NullBranch b) {
        GeodesicRequest q;
        q.M = p.real("m");
        q.r_min = p.real("r_min");
        q.r_max = p.real("r_max");
        q.samples = p.size("samples");
        q.branch = b;
        q.region = p.text("region") == "interior" ? NullRegion::interior : NullRegion::exterior;
        q.margin = p.real("margin");
        if (p.real("r_ref") != 0) q.r_ref = p.real("r_ref");
        q.t_ref = p.real("t_ref");
        return q;
    };
    e.check = [](const ParamSet& p) {
        Problems pr;
        const double m = p.real("m"), lo = p.real("r_min"), hi = p.real("r_max"), margin = p.real("margin");
        pr.require(m > 0, "m must be positive");
        pr.require(lo > 0 && hi > lo, "need 0 < r_min < r_max");
        pr.require(p.size("samples") >= 2 && p.size("samples") <= 10000000, "samples must lie in [2, 10^7]");
        pr.require(margin > 0 && margin < 1, "margin must lie in (0, 1)");
        if (m > 0 && lo > 0 && hi > lo) {
            const double rs = 2 * m;
            const bool exterior = p.text("region") == "exterior";
            if (exterior)
                pr.require(lo >= rs * (1 + margin), "exterior range must stay outside r = 2M (r_min >= 2M(1 + margin))");
            else
                pr.require(hi <= rs * (1 - margin), "interior range must stay inside r = 2M (r_max <= 2M(1 - margin))");
            const double ref = p.real("r_ref") != 0 ? p.real("r_ref") : hi;
            pr.require(ref > 0 && exterior == (ref > rs), "r_ref must lie in the selected region");
        }
        return pr.list;
    };
    e.run = [request](const ParamSet& p, std::uint64_t) {
        std::vector<std::pair<const char*, NullBranch>> branches;
        if (p.text("branch") != "ingoing") branches.emplace_back("outgoing", NullBranch::outgoing);
        if (p.text("branch") != "outgoing") branches.emplace_back("ingoing", NullBranch::ingoing);
        Table tab("geodesics.csv", {"branch", "r", "t", "v"});
        RunResult r;
        Json ends = Json::object();
        for (const auto& [name, b] : branches) {
            const auto pts = radial_null_geodesics(request(p, b));
            for (const auto& pt : pts) tab.row(name, pt.r, pt.t, pt.v);
            ends[name] = {{"t_at_r_max", pts.front().t}, {"t_at_r_min", pts.back().t}};
        }
        r.tables.push_back(tab.finish());
        r.summary["m"] = p.real("m");
        r.summary["horizon_radius"] = 2 * p.real("m");
        r.summary["samples"] = p.size("samples");
        r.summary["curves"] = ends;
        return r;
    };
    return e;
}

}  // namespace qclab
