#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wct/pipeline.hpp"

namespace wct {

// Both prefix forms run over the machine's eligible jobs sorted by descending
// Smith ratio (ties by job index); entry t belongs to the prefix of the first
// t+1 jobs in that order.

// Inner terms of the threshold form of the LP cost on one machine,
//   1/2 ( sum_{j in prefix} z_ij p_j^2  +  sum_f y_if p^2(f cap prefix) ).
// Weighting each term by the drop in Smith ratio reproduces the LP cost
// exactly; lp_cost_rewrite does that summation.
std::vector<double> lp_cost_prefix_terms(const ConfigLPSolution& sol, const Instance& post_swap,
                                         int machine);
double lp_cost_rewrite(const ConfigLPSolution& sol, const Instance& post_swap, int machine);

// Inner terms of the upper bound on the expected weighted completion time of
// the rounded solution on one machine, conditioned on beta:
//   sum_{j in prefix} z_ij p_j^2 + 1/2 vol^2(prefix)
//     - 1/2 sum_k min(vol(prefix cap class k), beta rho^k)^2.
std::vector<double> rounded_cost_prefix_terms(const std::vector<std::vector<double>>& z,
                                              const Instance& post_swap, int machine, double beta,
                                              double rho);
double rounded_cost_bound(const std::vector<std::vector<double>>& z, const Instance& post_swap,
                          int machine, double beta, double rho);

struct MachineCostReport {
  int machine = 0;
  double lp_cost = 0.0;         // direct configuration sum
  double rewritten_cost = 0.0;  // threshold form; equals lp_cost
  std::vector<std::pair<double, double>> bound_per_beta;  // (beta, bound), one per stratum
  double wc_mean = 0.0;
  double wc_halfwidth = 0.0;  // 4 sigma of the mean
  double wc_minus_bound_mean = 0.0;
  double wc_minus_bound_halfwidth = 0.0;
  int trials = 0;
};

struct MonteCarloReport {
  double lp_objective = 0.0;
  double duality_gap = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  double rho = 2.0;
  std::optional<double> fixed_beta;
  std::vector<MachineCostReport> per_machine;
  double mean_cost = 0.0;
  double mean_ratio = 0.0;
  double ratio_halfwidth = 0.0;  // 4 sigma of the ratio mean
};

// Repeated randomized runs. Unless a fixed beta is given, beta is drawn with
// stratified sampling over the 10 log-scale strata of [1, rho). Aggregation is
// pairwise and chunked deterministically, so reports do not depend on the
// thread count.
MonteCarloReport monte_carlo(const Pipeline& pipe, int trials, std::uint64_t seed, double rho,
                             std::optional<double> fixed_beta = std::nullopt);
MonteCarloReport monte_carlo(const Instance& original, int trials, std::uint64_t seed, double rho,
                             std::optional<double> fixed_beta = std::nullopt);

// Rounding statistics for a fixed graph (fixed beta): per-edge selection
// frequencies, products over unmarked pairs sharing a (machine, class) group,
// selected volume of each marked group against an unmarked edge, and
// per-machine completion times.
struct PairStat {
  int e1 = 0, e2 = 0;
  double mean_product = 0.0;
  double x_product = 0.0;
  double sigma = 0.0;
};

struct CrossGroupStat {
  int edge = 0;  // the unmarked edge
  double mean = 0.0;
  double lp_value = 0.0;
  double sigma = 0.0;
};

struct FixedBetaStats {
  int trials = 0;
  double beta = 1.0;
  std::vector<double> edge_mean;   // per edge id
  std::vector<double> edge_sigma;  // 1 sigma of the mean
  std::vector<PairStat> unmarked_pairs;
  std::vector<CrossGroupStat> cross_group;
  std::vector<double> wc_mean, wc_sigma;  // per machine
  std::vector<double> bound;              // per machine, at this beta
  long long iterations = 0;
  int max_class_iterations = 0;
};

FixedBetaStats collect_fixed_beta_stats(const Pipeline& pipe, const EdgeGraph& graph, int trials,
                                        std::uint64_t seed, bool check_invariants = false);

}  // namespace wct
