#include "wct/config_lp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wct/simplex.hpp"

namespace wct {

MachineConfigs enumerate_configs(const Instance& inst, int machine, int job_cap) {
  if (inst.jobs > job_cap)
    throw std::invalid_argument(
        "instance has " + std::to_string(inst.jobs) + " jobs but the configuration cap is " +
        std::to_string(job_cap) + "; use a smaller instance or raise the cap");
  std::vector<int> elig;
  for (int j = 0; j < inst.jobs; ++j)
    if (inst.eligible(machine, j)) elig.push_back(j);
  int k = static_cast<int>(elig.size());
  std::vector<double> p(k), w(k);
  for (int t = 0; t < k; ++t) {
    p[t] = inst.proc[machine][elig[t]]->value();
    w[t] = inst.weight[machine][elig[t]]->value();
  }
  // pairwise delay terms min(p_a w_b, p_b w_a)
  std::vector<std::vector<double>> cross(k, std::vector<double>(k, 0.0));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (a != b) cross[a][b] = std::min(p[a] * w[b], p[b] * w[a]);

  MachineConfigs out;
  std::size_t count = std::size_t{1} << k;
  out.masks.resize(count);
  out.costs.resize(count);
  out.masks[0] = 0;
  out.costs[0] = 0.0;
  for (std::size_t local = 1; local < count; ++local) {
    auto lmask = static_cast<std::uint32_t>(local);
    int a = std::countr_zero(lmask);
    std::uint32_t rest = lmask & (lmask - 1);
    double cost = out.costs[rest] + p[a] * w[a];
    std::uint32_t scan = rest;
    while (scan != 0) {
      int b = std::countr_zero(scan);
      scan &= scan - 1;
      cost += cross[a][b];
    }
    out.costs[local] = cost;
    std::uint32_t full = out.masks[rest] | (std::uint32_t{1} << elig[a]);
    out.masks[local] = full;
  }
  return out;
}

ConfigLPSolution solve_config_lp(const Instance& inst, int job_cap) {
  std::vector<PartitionColumn> cols;
  std::vector<MachineConfigs> per_machine(inst.machines);
  for (int i = 0; i < inst.machines; ++i) {
    per_machine[i] = enumerate_configs(inst, i, job_cap);
    for (std::size_t t = 0; t < per_machine[i].masks.size(); ++t)
      cols.push_back({i, per_machine[i].masks[t], per_machine[i].costs[t]});
  }
  SimplexResult res = solve_partition_lp(inst.machines, inst.jobs, cols);
  if (res.status == SimplexResult::Status::iteration_limit)
    throw std::runtime_error("configuration LP solver hit its iteration cap");
  if (res.status != SimplexResult::Status::optimal)
    throw std::runtime_error("configuration LP unexpectedly infeasible or unbounded");

  ConfigLPSolution sol;
  sol.machines = inst.machines;
  sol.jobs = inst.jobs;
  sol.z.assign(inst.machines, std::vector<double>(inst.jobs, 0.0));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    double mass = res.y[c];
    if (mass <= 0.0) continue;
    sol.masses.emplace_back(cols[c].owner_row, cols[c].member_mask, mass);
    std::uint32_t mask = cols[c].member_mask;
    while (mask != 0) {
      int j = std::countr_zero(mask);
      mask &= mask - 1;
      sol.z[cols[c].owner_row][j] += mass;
    }
  }
  sol.objective = res.objective;
  sol.dual_objective = res.dual_objective;
  sol.duality_gap = res.duality_gap + res.max_reduced_cost_violation * inst.machines;
  sol.iterations = res.iterations;
  return sol;
}

double lp_cost_on_machine(const ConfigLPSolution& sol, const Instance& inst, int machine) {
  double cost = 0.0;
  for (const auto& [i, mask, mass] : sol.masses) {
    if (i != machine) continue;
    std::vector<int> jobs;
    std::uint32_t scan = mask;
    while (scan != 0) {
      int j = std::countr_zero(scan);
      scan &= scan - 1;
      jobs.push_back(j);
    }
    cost += mass * smith_cost(inst, machine, jobs).value();
  }
  return cost;
}

nlohmann::ordered_json lp_solution_to_json(const ConfigLPSolution& sol) {
  nlohmann::ordered_json j;
  j["objective"] = sol.objective;
  j["duality_gap"] = sol.duality_gap;
  nlohmann::ordered_json masses = nlohmann::ordered_json::array();
  for (const auto& [i, mask, mass] : sol.masses) {
    nlohmann::ordered_json jobs = nlohmann::ordered_json::array();
    std::uint32_t scan = mask;
    while (scan != 0) {
      int job = std::countr_zero(scan);
      scan &= scan - 1;
      jobs.push_back(job);
    }
    masses.push_back({{"machine", i}, {"jobs", jobs}, {"mass", mass}});
  }
  j["masses"] = std::move(masses);
  j["z"] = sol.z;
  return j;
}

}  // namespace wct
