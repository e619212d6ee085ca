#pragma once

#include "qcollapse/numerics.hpp"
#include "qcollapse/quantum_core.hpp"
#include "qcollapse/collapse_scheduler.hpp"
#include "qcollapse/perturbation.hpp"
#include "qcollapse/gas_redistribution.hpp"
#include "qcollapse/spectral.hpp"
#include "qcollapse/screen_collapse.hpp"
#include "qcollapse/classical_limit.hpp"
#include "qcollapse/quantum_grid.hpp"
#include "qcollapse/info_theory.hpp"
#include "qcollapse/blackhole_thermo.hpp"
#include "qcollapse/csv.hpp"
