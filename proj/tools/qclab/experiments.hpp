#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "params.hpp"

namespace qclab {

using Json = nlohmann::ordered_json;

struct CsvArtifact {
    std::string name;  // file name inside the output directory
    std::string content;
};

struct RunResult {
    std::vector<CsvArtifact> tables;
    Json summary = Json::object();
};

struct Experiment {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
    /// Physics and geometry preconditions; every problem is reported.
    std::function<std::vector<std::string>(const ParamSet&)> check;
    std::function<RunResult(const ParamSet&, std::uint64_t seed)> run;
};

const std::vector<Experiment>& experiments();

// Factories, one per experiment family.
Experiment alternating_experiment();
Experiment gas_experiment();
Experiment screen_experiment();
Experiment doubleslit_experiment();
Experiment perturb_experiment();
Experiment classical_experiment();
Experiment entropy_experiment();
Experiment info_experiment();
Experiment blackhole_experiment();
Experiment geodesics_experiment();

const Experiment* find_experiment(const std::string& name);

}  // namespace qclab
