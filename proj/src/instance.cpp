#include "wct/instance.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace wct {

Instance Instance::make(int machines, int jobs) {
  Instance inst;
  inst.machines = machines;
  inst.jobs = jobs;
  inst.proc.assign(machines, std::vector<std::optional<Rational>>(jobs));
  inst.weight.assign(machines, std::vector<std::optional<Rational>>(jobs));
  return inst;
}

void Instance::validate() const {
  if (machines <= 0 || jobs <= 0) throw std::invalid_argument("instance needs machines and jobs");
  if (static_cast<int>(proc.size()) != machines || static_cast<int>(weight.size()) != machines)
    throw std::invalid_argument("table row count does not match machine count");
  for (int i = 0; i < machines; ++i) {
    if (static_cast<int>(proc[i].size()) != jobs || static_cast<int>(weight[i].size()) != jobs)
      throw std::invalid_argument("table column count does not match job count");
    for (int j = 0; j < jobs; ++j) {
      if (proc[i][j].has_value() != weight[i][j].has_value())
        throw std::invalid_argument("proc/weight engaged on different pairs");
      if (proc[i][j] && !(proc[i][j]->is_positive() && weight[i][j]->is_positive()))
        throw std::invalid_argument("processing times and weights must be positive");
    }
  }
  for (int j = 0; j < jobs; ++j) {
    bool any = false;
    for (int i = 0; i < machines && !any; ++i) any = eligible(i, j);
    if (!any)
      throw std::invalid_argument("job " + std::to_string(j) + " cannot run on any machine");
  }
}

namespace {

bool column_constant(const std::vector<std::vector<std::optional<Rational>>>& table, int machines,
                     int jobs) {
  for (int j = 0; j < jobs; ++j) {
    std::optional<Rational> seen;
    for (int i = 0; i < machines; ++i) {
      if (!table[i][j]) continue;
      if (!seen)
        seen = table[i][j];
      else if (*seen != *table[i][j])
        return false;
    }
  }
  return true;
}

}  // namespace

bool proc_machine_independent(const Instance& inst) {
  return column_constant(inst.proc, inst.machines, inst.jobs);
}

bool weight_machine_independent(const Instance& inst) {
  return column_constant(inst.weight, inst.machines, inst.jobs);
}

void Instance::refresh_flags() {
  sizes_machine_independent = proc_machine_independent(*this);
  weights_machine_dependent = !weight_machine_independent(*this);
}

Instance swap_sizes_and_weights(const Instance& inst) {
  Instance out = inst;
  std::swap(out.proc, out.weight);
  out.refresh_flags();
  return out;
}

Rational smith_cost(const Instance& inst, int machine, const std::vector<int>& jobs) {
  for (int j : jobs) {
    if (j < 0 || j >= inst.jobs || machine < 0 || machine >= inst.machines ||
        !inst.eligible(machine, j))
      throw std::invalid_argument("job " + std::to_string(j) + " is not eligible on machine " +
                                  std::to_string(machine));
  }
  Rational cost(0);
  for (size_t a = 0; a < jobs.size(); ++a) {
    const Rational& pa = *inst.proc[machine][jobs[a]];
    const Rational& wa = *inst.weight[machine][jobs[a]];
    cost += pa * wa;
    for (size_t b = a + 1; b < jobs.size(); ++b) {
      const Rational& pb = *inst.proc[machine][jobs[b]];
      const Rational& wb = *inst.weight[machine][jobs[b]];
      cost += min(pa * wb, pb * wa);
    }
  }
  return cost;
}

Rational total_cost(const Instance& inst, const std::vector<int>& machine_of) {
  if (static_cast<int>(machine_of.size()) != inst.jobs)
    throw std::invalid_argument("assignment must place every job");
  std::vector<std::vector<int>> on_machine(inst.machines);
  for (int j = 0; j < inst.jobs; ++j) {
    int i = machine_of[j];
    if (i < 0 || i >= inst.machines) throw std::invalid_argument("assignment machine out of range");
    on_machine[i].push_back(j);
  }
  Rational cost(0);
  for (int i = 0; i < inst.machines; ++i) cost += smith_cost(inst, i, on_machine[i]);
  return cost;
}

Assignment make_assignment(const Instance& inst, std::vector<int> machine_of) {
  Assignment asg;
  asg.total_cost = total_cost(inst, machine_of);
  asg.machine_of = std::move(machine_of);
  return asg;
}

std::vector<int> smith_order(const Instance& inst, int machine) {
  std::vector<int> order;
  for (int j = 0; j < inst.jobs; ++j)
    if (inst.eligible(machine, j)) order.push_back(j);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    // w_a/p_a > w_b/p_b without division
    return *inst.weight[machine][a] * *inst.proc[machine][b] >
           *inst.weight[machine][b] * *inst.proc[machine][a];
  });
  return order;
}

std::vector<double> machine_independent_sizes(const Instance& inst) {
  std::vector<double> sizes(inst.jobs, 0.0);
  for (int j = 0; j < inst.jobs; ++j) {
    std::optional<Rational> seen;
    for (int i = 0; i < inst.machines; ++i) {
      if (!inst.eligible(i, j)) continue;
      if (!seen)
        seen = inst.proc[i][j];
      else if (*seen != *inst.proc[i][j])
        throw std::invalid_argument("job sizes depend on the machine; swap the instance first");
    }
    sizes[j] = seen->value();
  }
  return sizes;
}

}  // namespace wct
