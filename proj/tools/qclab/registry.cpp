#include "experiments.hpp"

namespace qclab {

const std::vector<Experiment>& experiments() {
    static const std::vector<Experiment> all = {
        alternating_experiment(), gas_experiment(),      screen_experiment(),  doubleslit_experiment(),
        perturb_experiment(),     classical_experiment(), entropy_experiment(), info_experiment(),
        blackhole_experiment(),   geodesics_experiment(),
    };
    return all;
}

const Experiment* find_experiment(const std::string& name) {
    for (const auto& e : experiments())
        if (e.name == name) return &e;
    return nullptr;
}

}  // namespace qclab
