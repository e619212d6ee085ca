#include <fstream>
#include <sstream>

#include "experiments.hpp"
#include "qcollapse/info_theory.hpp"
#include "table.hpp"

namespace qclab {

using namespace qcollapse;

namespace {

using Rows = std::vector<std::vector<double>>;

/// Rows separated by ';' (inline) or newlines (file); '#' starts a comment.
std::optional<Rows> parse_rows(const std::string& text, char row_sep, std::string& error) {
    Rows rows;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line, row_sep)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto v = parse_real_list(line);
        if (!v) {
            error = "row " + std::to_string(n) + " is not a comma-separated list of numbers";
            return std::nullopt;
        }
        rows.push_back(*v);
    }
    return rows;
}

struct JointInput {
    std::optional<JointDistribution> joint;
    std::vector<std::string> errors;
};

JointInput load_joint(const ParamSet& p) {
    JointInput in;
    const bool inline_set = !p.text("joint").empty(), file_set = !p.text("table").empty();
    if (inline_set == file_set) {
        in.errors.push_back("give exactly one of joint (inline rows) or table (CSV path)");
        return in;
    }
    std::string text = p.text("joint");
    char sep = ';';
    if (file_set) {
        std::ifstream f(p.text("table"));
        if (!f) {
            in.errors.push_back("cannot read table '" + p.text("table") + "'");
            return in;
        }
        std::ostringstream ss;
        ss << f.rdbuf();
        text = ss.str();
        sep = '\n';
    }
    std::string err;
    auto rows = parse_rows(text, sep, err);
    if (!rows) {
        in.errors.push_back(err);
        return in;
    }
    if (rows->empty() || rows->front().empty()) {
        in.errors.push_back("joint table is empty");
        return in;
    }
    const std::size_t ny = rows->front().size();
    std::vector<double> flat;
    double total = 0;
    for (const auto& r : *rows) {
        if (r.size() != ny) {
            in.errors.push_back("joint table rows have different lengths");
            return in;
        }
        for (double v : r) {
            if (v < 0) {
                in.errors.push_back("joint table entries must be nonnegative");
                return in;
            }
            flat.push_back(v);
            total += v;
        }
    }
    if (p.boolean("normalize")) {
        if (!(total > 0)) {
            in.errors.push_back("joint table has zero total weight");
            return in;
        }
        for (auto& v : flat) v /= total;
    }
    try {
        in.joint.emplace(rows->size(), ny, std::move(flat));
    } catch (const ValidationError& ex) {
        in.errors.push_back(ex.what());
    }
    return in;
}

}  // namespace

Experiment info_experiment() {
    Experiment e;
    e.name = "info";
    e.description = "Entropies, conditional entropy and mutual information of a joint distribution";
    e.params = {
        {"joint", Kind::text, "", "inline joint table, rows separated by ';', e.g. 0.25,0.25;0.25,0.25"},
        {"table", Kind::text, "", "path to a CSV joint table (one row per x value)"},
        {"normalize", Kind::boolean, "false", "rescale the table to unit total (accepts raw counts)"},
    };
    e.check = [](const ParamSet& p) { return load_joint(p).errors; };
    e.run = [](const ParamSet& p, std::uint64_t) {
        auto in = load_joint(p);
        if (!in.joint) throw ValidationError(in.errors.front());
        const auto s = entropies(*in.joint);
        const std::pair<const char*, double> rows[] = {
            {"H(X)", s.h_x}, {"H(Y)", s.h_y}, {"H(X,Y)", s.h_xy}, {"H(X|Y)", s.h_x_given_y}, {"I(X;Y)", s.mutual}};
        Table tab("info.csv", {"quantity", "nats", "bits"});
        RunResult r;
        Json ent = Json::object();
        for (const auto& [name, v] : rows) {
            tab.row(name, v, nats_to_bits(v));
            ent[name] = {{"nats", v}, {"bits", nats_to_bits(v)}};
        }
        r.tables.push_back(tab.finish());
        r.summary["shape"] = {in.joint->nx(), in.joint->ny()};
        r.summary["entropies"] = ent;
        return r;
    };
    return e;
}

}  // namespace qclab
