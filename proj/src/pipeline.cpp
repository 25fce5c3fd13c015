#include "wct/pipeline.hpp"

#include <cmath>
#include <stdexcept>

namespace wct {

Pipeline prepare_pipeline(const Instance& original, int config_cap) {
  original.validate();
  if (!weight_machine_independent(original))
    throw std::invalid_argument(
        "machine-dependent weights are not supported: the class partition needs "
        "machine-independent sizes after the swap");
  Pipeline pipe;
  pipe.original = original;
  pipe.post_swap = swap_sizes_and_weights(original);
  pipe.job_size = machine_independent_sizes(pipe.post_swap);
  pipe.lp = solve_config_lp(pipe.post_swap, config_cap);
  return pipe;
}

SolveOutcome solve_once(const Pipeline& pipe, std::uint64_t seed, double rho,
                        const RoundOptions& opts) {
  SolveOutcome out;
  RngStream beta_rng(derive_seed(seed, seed_tag::beta));
  out.beta = sample_beta(beta_rng, rho);
  ShiftedClasses classes = make_classes(pipe.job_size, out.beta, rho);
  EdgeGraph graph = build_graph(pipe.lp.z, pipe.post_swap, classes);
  out.machine_of = round_all(graph, seed, opts);
  out.cost = total_cost(pipe.original, out.machine_of);
  out.ratio = out.cost.value() / pipe.lp.objective;
  return out;
}

double machine_completion_cost(const Instance& inst, int machine,
                               const std::vector<int>& machine_of) {
  std::vector<int> jobs;
  for (int j = 0; j < inst.jobs; ++j)
    if (machine_of[j] == machine) jobs.push_back(j);
  double cost = 0.0;
  for (std::size_t a = 0; a < jobs.size(); ++a) {
    if (!inst.eligible(machine, jobs[a]))
      throw std::invalid_argument("assigned job is not eligible on its machine");
    double pa = inst.proc[machine][jobs[a]]->value();
    double wa = inst.weight[machine][jobs[a]]->value();
    cost += pa * wa;
    for (std::size_t b = a + 1; b < jobs.size(); ++b) {
      double pb = inst.proc[machine][jobs[b]]->value();
      double wb = inst.weight[machine][jobs[b]]->value();
      cost += std::min(pa * wb, pb * wa);
    }
  }
  return cost;
}

}  // namespace wct
