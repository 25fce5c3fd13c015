#pragma once

#include <cstdint>
#include <vector>

namespace wct {

// Dense primal simplex for LPs of the shape
//
//   min c.y   s.t.  A y = 1 on every row,  y >= 0,
//
// where each column has 0/1 coefficients: a single "owner" row plus a set of
// "member" rows given as a bitmask. This covers set-partition style
// relaxations with one column per (owner, subset) pair. Two-phase method with
// an explicit basis inverse; pricing runs Dantzig's rule and switches to
// Bland's rule while pivots stall, which protects against cycling on the
// heavily degenerate instances this gets used on.
struct PartitionColumn {
  int owner_row = 0;
  std::uint32_t member_mask = 0;
  double cost = 0.0;
};

struct SimplexResult {
  enum class Status { optimal, infeasible, unbounded, iteration_limit };
  Status status = Status::optimal;
  std::vector<double> y;      // per input column
  std::vector<double> duals;  // per row, owners first
  double objective = 0.0;
  double dual_objective = 0.0;
  double duality_gap = 0.0;                 // |objective - dual_objective|
  double max_reduced_cost_violation = 0.0;  // most negative reduced cost at the end
  int iterations = 0;
};

struct SimplexOptions {
  double pivot_tol = 1e-10;
  int max_iterations = 200000;
  int refactor_every = 64;
  int stall_before_bland = 12;
};

SimplexResult solve_partition_lp(int owner_rows, int member_rows,
                                 const std::vector<PartitionColumn>& cols,
                                 const SimplexOptions& opt = {});

}  // namespace wct
