#pragma once

#include <cstdint>

#include "wct/config_lp.hpp"
#include "wct/instance.hpp"
#include "wct/rounding.hpp"

namespace wct {

// Shared front half of every run: swap sizes and weights, solve the
// configuration relaxation on the swapped instance, cache the job sizes.
struct Pipeline {
  Instance original;
  Instance post_swap;
  std::vector<double> job_size;
  ConfigLPSolution lp;
};

Pipeline prepare_pipeline(const Instance& original, int config_cap = kDefaultConfigCap);

struct SolveOutcome {
  std::vector<int> machine_of;
  Rational cost;
  double ratio = 0.0;  // cost / LP objective
  double beta = 1.0;
};

// One full randomized run: draw beta, build the marked graph, round every
// class, cost the assignment on the original instance.
SolveOutcome solve_once(const Pipeline& pipe, std::uint64_t seed, double rho,
                        const RoundOptions& opts = {});

// Weighted completion time of the jobs a given assignment puts on one
// machine, in doubles (pair formula, order free).
double machine_completion_cost(const Instance& inst, int machine,
                               const std::vector<int>& machine_of);

}  // namespace wct
