#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>

#include "CLI11.hpp"
#include "config_file.hpp"
#include "experiments.hpp"
#include "qcollapse/numerics.hpp"

namespace fs = std::filesystem;
using namespace qclab;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { ok = 0, internal = 1, invalid = 2, numeric = 3 };

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

int report_error(const std::string& kind, const std::vector<std::string>& errors, const std::string& experiment,
                 int code) {
    Json r = {{"status", "error"}, {"kind", kind}};
    if (!experiment.empty()) r["experiment"] = experiment;
    r["errors"] = errors;
    std::cerr << r.dump(2) << '\n';
    return code;
}

/// Values collected from the command line for one subcommand.
struct Invocation {
    const Experiment* exp = nullptr;
    bool validate_only = false;
    std::string config_path;
    std::string seed, out, format;
    std::map<std::string, std::string> strings;
    std::map<std::string, std::unique_ptr<bool>> flags;
    std::map<std::string, CLI::Option*> options;
    CLI::App* app = nullptr;
};

void add_common(CLI::App* sub, Invocation& inv) {
    sub->add_option("--config", inv.config_path, "key = value file with [experiment] sections");
    sub->add_option("--seed", inv.seed, "64-bit master seed (default 1)");
    sub->add_option("--out", inv.out, "output directory (default: $QCLAB_OUT, else ./qclab_out)");
    sub->add_option("--format", inv.format, "csv | json | both (default both)");
}

void add_schema(CLI::App* sub, Invocation& inv) {
    for (const auto& spec : inv.exp->params) {
        const std::string flag = flag_name(spec.key);
        std::string help = spec.help + " [default: " + (spec.default_value.empty() ? "\"\"" : spec.default_value) + "]";
        if (spec.kind == Kind::boolean) {
            auto& b = inv.flags[spec.key] = std::make_unique<bool>(false);
            const std::string names = flag + ",!--no-" + flag.substr(2);
            inv.options[spec.key] = sub->add_flag(names, *b, help);
        } else {
            inv.options[spec.key] = sub->add_option(flag, inv.strings[spec.key], help);
        }
    }
}

bool valid_format(const std::string& f) { return f == "csv" || f == "json" || f == "both"; }

int execute(Invocation& inv) {
    const Experiment& exp = *inv.exp;
    std::vector<std::string> errors;
    ParamSet params(exp.params);
    std::map<std::string, ConfigEntry> global;
    std::optional<std::string> config_file;

    if (!inv.config_path.empty()) {
        config_file = inv.config_path;
        const ConfigFile cfg = read_config(inv.config_path, errors);
        global = cfg.global;
        for (const auto& [key, entry] : cfg.global)
            if (key != "seed" && key != "out" && key != "format")
                errors.push_back(cfg.path + ":" + std::to_string(entry.line) + ": unknown global key '" + key +
                                 "' (allowed: seed, out, format)");
        for (const auto& [section, entries] : cfg.sections) {
            const Experiment* target = find_experiment(section);
            if (!target) {
                errors.push_back(cfg.path + ": unknown section [" + section + "]");
                continue;
            }
            ParamSet scratch(target->params);
            ParamSet& dest = target == inv.exp ? params : scratch;
            for (const auto& [key, entry] : entries) {
                const auto err = dest.set(key, entry.value,
                                          cfg.path + ":" + std::to_string(entry.line) + " [" + section + "]");
                if (!err.empty()) errors.push_back(err);
            }
        }
    }

    for (const auto& spec : exp.params) {
        CLI::Option* opt = inv.options.at(spec.key);
        if (opt->count() == 0) continue;
        const std::string raw = spec.kind == Kind::boolean ? (*inv.flags.at(spec.key) ? "true" : "false")
                                                           : inv.strings.at(spec.key);
        const auto err = params.set(spec.key, raw, "flag " + flag_name(spec.key));
        if (!err.empty()) errors.push_back(err);
    }

    auto pick = [&](const std::string& flag_value, const std::string& key) -> std::optional<std::string> {
        if (!flag_value.empty()) return flag_value;
        if (const auto it = global.find(key); it != global.end()) return it->second.value;
        return std::nullopt;
    };

    std::uint64_t seed = 1;
    if (const auto s = pick(inv.seed, "seed")) {
        const auto v = parse_integer(*s);
        if (v)
            seed = *v;
        else
            errors.push_back("seed must be an unsigned 64-bit integer, got '" + *s + "'");
    }
    std::string format = pick(inv.format, "format").value_or("both");
    if (!valid_format(format)) errors.push_back("format must be csv, json or both, got '" + format + "'");
    std::string out = pick(inv.out, "out").value_or("");
    if (out.empty()) {
        const char* env = std::getenv("QCLAB_OUT");
        out = env && *env ? env : "qclab_out";
    }

    if (errors.empty()) {
        try {
            for (auto& e : exp.check(params)) errors.push_back(std::move(e));
        } catch (const qcollapse::ValidationError& ex) {
            errors.push_back(ex.what());
        }
    }

    if (inv.validate_only) {
        Json r = {{"status", errors.empty() ? "ok" : "invalid"}, {"experiment", exp.name}, {"errors", errors}};
        std::cout << r.dump(2) << '\n';
        return errors.empty() ? Exit::ok : Exit::invalid;
    }
    if (!errors.empty()) return report_error("validation", errors, exp.name, Exit::invalid);

    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    try {
        result = exp.run(params, seed);
    } catch (const qcollapse::ValidationError& ex) {
        return report_error("validation", {ex.what()}, exp.name, Exit::invalid);
    } catch (const qcollapse::NumericError& ex) {
        return report_error("numeric", {ex.what()}, exp.name, Exit::numeric);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Json echo = Json::object();
    for (const auto& spec : exp.params) echo[spec.key] = params.values().at(spec.key);

    std::vector<std::pair<std::string, std::string>> files;
    if (format != "json")
        for (auto& t : result.tables) files.emplace_back(t.name, std::move(t.content));
    if (format != "csv") {
        Json doc = {{"experiment", exp.name}, {"seed", seed}, {"params", echo}, {"summary", result.summary}};
        files.emplace_back(exp.name + ".json", doc.dump(2) + "\n");
    }

    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) return report_error("io", {"cannot create output directory '" + out + "': " + ec.message()}, exp.name, Exit::internal);

    Json listing = Json::array();
    for (const auto& [name, content] : files) {
        std::ofstream f(fs::path(out) / name, std::ios::binary);
        f << content;
        if (!f) return report_error("io", {"cannot write " + (fs::path(out) / name).string()}, exp.name, Exit::internal);
        listing.push_back({{"name", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
    }
    Json manifest = {{"artifact", "qclab"},
                     {"version", kVersion},
                     {"experiment", exp.name},
                     {"seed", seed},
                     {"format", format},
                     {"config_file", config_file ? Json(*config_file) : Json(nullptr)},
                     {"params", echo},
                     {"wall_clock_seconds", wall},
                     {"files", listing}};
    std::ofstream mf(fs::path(out) / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << '\n';
    if (!mf) return report_error("io", {"cannot write manifest"}, exp.name, Exit::internal);

    std::cout << exp.name << ": wrote " << files.size() + 1 << " file(s) to " << out << '\n';
    return Exit::ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qclab: collapse, thermalization and horizon-thermodynamics experiments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::vector<std::unique_ptr<Invocation>> invocations;
    CLI::App* validate = app.add_subcommand("validate", "check a configuration without running it");
    validate->require_subcommand(1);

    for (const auto& exp : experiments()) {
        for (bool dry : {false, true}) {
            auto inv = std::make_unique<Invocation>();
            inv->exp = &exp;
            inv->validate_only = dry;
            inv->app = (dry ? validate : &app)->add_subcommand(exp.name, exp.description);
            add_common(inv->app, *inv);
            add_schema(inv->app, *inv);
            invocations.push_back(std::move(inv));
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        // Name an unknown subcommand instead of CLI11's generic message.
        for (int i = 1; i < argc; ++i) {
            const std::string word = argv[i];
            if (word.empty() || word.front() == '-') break;
            if (word == "validate") continue;
            if (!find_experiment(word)) return report_error("usage", {"unknown subcommand '" + word + "'"}, "", Exit::invalid);
            break;
        }
        return report_error("usage", {e.what()}, "", Exit::invalid);
    }

    try {
        for (auto& inv : invocations)
            if (inv->app->parsed()) return execute(*inv);
    } catch (const qcollapse::NumericError& e) {
        return report_error("numeric", {e.what()}, "", Exit::numeric);
    } catch (const std::exception& e) {
        return report_error("internal", {e.what()}, "", Exit::internal);
    }
    return report_error("usage", {"no experiment selected"}, "", Exit::invalid);
}
