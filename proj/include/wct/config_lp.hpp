#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "wct/instance.hpp"

namespace wct {

inline constexpr int kDefaultConfigCap = 14;

// All subsets of the jobs eligible on one machine, as bitmasks over the full
// job index range, with their Smith-rule costs. masks[k] and costs[k] line up.
struct MachineConfigs {
  std::vector<std::uint32_t> masks;
  std::vector<double> costs;
};

MachineConfigs enumerate_configs(const Instance& inst, int machine,
                                 int job_cap = kDefaultConfigCap);

// Optimal solution of the configuration relaxation
//   min sum_{i,f} y_{if} cost_i(f)
//   s.t. sum_f y_{if} = 1 per machine, sum_i sum_{f contains j} y_{if} = 1 per
//   job, y >= 0,
// solved exactly over all enumerated configurations.
struct ConfigLPSolution {
  int machines = 0;
  int jobs = 0;
  std::vector<std::tuple<int, std::uint32_t, double>> masses;  // nonzero (machine, mask, y)
  std::vector<std::vector<double>> z;                          // z[i][j] = mass on i containing j
  double objective = 0.0;
  double dual_objective = 0.0;
  double duality_gap = 0.0;  // |primal - dual| plus the worst dual infeasibility
  int iterations = 0;
};

ConfigLPSolution solve_config_lp(const Instance& inst, int job_cap = kDefaultConfigCap);

// sum_f y_{if} cost_i(f), recomputed from the instance
double lp_cost_on_machine(const ConfigLPSolution& sol, const Instance& inst, int machine);

nlohmann::ordered_json lp_solution_to_json(const ConfigLPSolution& sol);

}  // namespace wct
