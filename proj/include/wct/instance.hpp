#pragma once

#include <optional>
#include <vector>

#include "wct/rational.hpp"

namespace wct {

// A scheduling instance on unrelated machines. proc[i][j] is the processing
// time of job j on machine i and weight[i][j] its weight there; a disengaged
// optional means job j may never run on machine i (infinite processing time).
// proc and weight are engaged on exactly the same (i, j) pairs.
//
// Standard inputs have machine-independent weights; the size/weight swap turns
// them into instances with machine-independent sizes, which is what the class
// partition and the rounding work on. Both flags are canonical, i.e. always
// recomputed from the tables rather than trusted from input.
struct Instance {
  int machines = 0;
  int jobs = 0;
  std::vector<std::vector<std::optional<Rational>>> proc;
  std::vector<std::vector<std::optional<Rational>>> weight;
  bool weights_machine_dependent = false;
  bool sizes_machine_independent = false;

  static Instance make(int machines, int jobs);

  bool eligible(int machine, int job) const { return proc[machine][job].has_value(); }

  // Throws std::invalid_argument if any invariant is broken: shapes must
  // match, engaged entries must be strictly positive, proc/weight must be
  // engaged in pairs, and every job needs at least one machine to run on.
  void validate() const;

  void refresh_flags();

  friend bool operator==(const Instance& a, const Instance& b) = default;
};

struct Assignment {
  std::vector<int> machine_of;
  Rational total_cost;
};

bool proc_machine_independent(const Instance& inst);
bool weight_machine_independent(const Instance& inst);

// Exchanges processing times and weights on every eligible pair. Ineligible
// pairs stay ineligible. Assignment costs are preserved exactly.
Instance swap_sizes_and_weights(const Instance& inst);

// Optimal (Smith rule) weighted completion time of scheduling the given job
// set on one machine, via the order-free pair formula
//   sum_j p_j w_j + sum_{j<j'} min(p_j w_j', p_j' w_j).
// Throws if some job is not eligible on the machine.
Rational smith_cost(const Instance& inst, int machine, const std::vector<int>& jobs);

// Total cost of a full assignment: sum of smith_cost over machines.
Rational total_cost(const Instance& inst, const std::vector<int>& machine_of);

Assignment make_assignment(const Instance& inst, std::vector<int> machine_of);

// Jobs sorted for machine `machine` by descending Smith ratio w/p, ties by
// ascending job index. Only eligible jobs are returned.
std::vector<int> smith_order(const Instance& inst, int machine);

// The common size p_j of each job across machines (post-swap instances).
// Throws if sizes actually depend on the machine.
std::vector<double> machine_independent_sizes(const Instance& inst);

}  // namespace wct
