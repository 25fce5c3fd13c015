#include "wct/simplex.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wct {

namespace {

class PartitionSimplex {
 public:
  PartitionSimplex(int owner_rows, int member_rows, const std::vector<PartitionColumn>& cols,
                   const SimplexOptions& opt)
      : owners_(owner_rows),
        members_(member_rows),
        rows_(owner_rows + member_rows),
        cols_(cols),
        opt_(opt) {
    if (member_rows > 24) throw std::invalid_argument("too many member rows for dense pricing");
    ncols_ = static_cast<int>(cols_.size());
    mask_sum_.assign(std::size_t{1} << members_, 0.0);
    basic_.resize(rows_);
    x_basic_.assign(rows_, 1.0);
    binv_.assign(static_cast<std::size_t>(rows_) * rows_, 0.0);
    for (int r = 0; r < rows_; ++r) {
      basic_[r] = ncols_ + r;  // artificial basis
      binv_[idx(r, r)] = 1.0;
    }
    in_basis_.assign(ncols_ + rows_, 0);
    for (int r = 0; r < rows_; ++r) in_basis_[ncols_ + r] = 1;
  }

  SimplexResult run() {
    SimplexResult res;
    phase1_ = true;
    Status st = iterate(res);
    if (st != Status::optimal) return finish(res, st);
    double art = artificial_mass();
    if (art > 1e-7) return finish(res, Status::infeasible);
    drive_out_artificials();
    phase1_ = false;
    bland_mode_ = false;
    stall_ = 0;
    st = iterate(res);
    return finish(res, st);
  }

 private:
  using Status = SimplexResult::Status;

  std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * rows_ + c; }

  double col_cost(int c) const {
    if (c >= ncols_) return phase1_ ? 1.0 : 0.0;
    return phase1_ ? 0.0 : cols_[c].cost;
  }

  // a_col dotted with an arbitrary row vector v (v has owner entries first)
  double column_dot(int c, const std::vector<double>& v) const {
    if (c >= ncols_) return v[c - ncols_];
    const PartitionColumn& col = cols_[c];
    return v[col.owner_row] + mask_dot(col.member_mask, v);
  }

  double mask_dot(std::uint32_t mask, const std::vector<double>& v) const {
    double s = 0.0;
    while (mask != 0) {
      int j = std::countr_zero(mask);
      mask &= mask - 1;
      s += v[owners_ + j];
    }
    return s;
  }

  // member-mask prefix sums of pi, so pricing one column is O(1)
  void build_mask_sums(const std::vector<double>& pi) {
    mask_sum_[0] = 0.0;
    for (std::uint32_t mask = 1; mask < mask_sum_.size(); ++mask) {
      std::uint32_t low = mask & (~mask + 1);
      mask_sum_[mask] = mask_sum_[mask ^ low] + pi[owners_ + std::countr_zero(low)];
    }
  }

  std::vector<double> compute_duals() const {
    std::vector<double> pi(rows_, 0.0);
    for (int r = 0; r < rows_; ++r) {
      double cb = col_cost(basic_[r]);
      if (cb == 0.0) continue;
      for (int c = 0; c < rows_; ++c) pi[c] += cb * binv_[idx(r, c)];
    }
    return pi;
  }

  // entering column or -1 at optimality; also reports the most negative
  // reduced cost over all non-basic structural columns
  int price(const std::vector<double>& pi, double* min_rc) {
    build_mask_sums(pi);
    int best = -1;
    double best_rc = -opt_.pivot_tol;
    *min_rc = 0.0;
    for (int c = 0; c < ncols_; ++c) {
      if (in_basis_[c]) continue;
      const PartitionColumn& col = cols_[c];
      double rc = col_cost(c) - pi[col.owner_row] - mask_sum_[col.member_mask];
      if (rc < *min_rc) *min_rc = rc;
      if (rc < best_rc) {
        if (bland_mode_) return c;  // lowest index wins
        best_rc = rc;
        best = c;
      }
    }
    return best;
  }

  std::vector<double> ftran(int c) const {
    std::vector<double> u(rows_, 0.0);
    auto add_unit = [&](int row) {
      for (int r = 0; r < rows_; ++r) u[r] += binv_[idx(r, row)];
    };
    if (c >= ncols_) {
      add_unit(c - ncols_);
      return u;
    }
    const PartitionColumn& col = cols_[c];
    add_unit(col.owner_row);
    std::uint32_t mask = col.member_mask;
    while (mask != 0) {
      int j = std::countr_zero(mask);
      mask &= mask - 1;
      add_unit(owners_ + j);
    }
    return u;
  }

  // smallest ratio; ties resolved toward the smallest basic variable index
  int ratio_test(const std::vector<double>& u, double* theta) const {
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows_; ++r) {
      if (u[r] <= opt_.pivot_tol) continue;
      double ratio = x_basic_[r] / u[r];
      if (ratio < best - 1e-12 ||
          (ratio < best + 1e-12 && (leave == -1 || basic_[r] < basic_[leave]))) {
        best = std::min(best, ratio);
        leave = r;
      }
    }
    *theta = best;
    return leave;
  }

  void pivot(int enter, int leave_row, const std::vector<double>& u, double theta) {
    for (int r = 0; r < rows_; ++r) x_basic_[r] -= theta * u[r];
    x_basic_[leave_row] = theta;
    double piv = u[leave_row];
    for (int c = 0; c < rows_; ++c) binv_[idx(leave_row, c)] /= piv;
    for (int r = 0; r < rows_; ++r) {
      if (r == leave_row || u[r] == 0.0) continue;
      double f = u[r];
      for (int c = 0; c < rows_; ++c) binv_[idx(r, c)] -= f * binv_[idx(leave_row, c)];
    }
    in_basis_[basic_[leave_row]] = 0;
    in_basis_[enter] = 1;
    basic_[leave_row] = enter;
    for (double& xb : x_basic_)
      if (xb < 0.0 && xb > -1e-9) xb = 0.0;
  }

  void refactorize() {
    // rebuild binv_ from the basic columns by Gauss-Jordan with partial pivot
    std::vector<double> m(static_cast<std::size_t>(rows_) * 2 * rows_, 0.0);
    auto at = [&](int r, int c) -> double& {
      return m[static_cast<std::size_t>(r) * 2 * rows_ + c];
    };
    for (int r = 0; r < rows_; ++r) {
      int c = basic_[r];
      if (c >= ncols_) {
        at(c - ncols_, r) = 1.0;
      } else {
        at(cols_[c].owner_row, r) += 1.0;
        std::uint32_t mask = cols_[c].member_mask;
        while (mask != 0) {
          int j = std::countr_zero(mask);
          mask &= mask - 1;
          at(owners_ + j, r) += 1.0;
        }
      }
      at(r, rows_ + r) = 1.0;
    }
    for (int col = 0; col < rows_; ++col) {
      int piv = col;
      for (int r = col + 1; r < rows_; ++r)
        if (std::fabs(at(r, col)) > std::fabs(at(piv, col))) piv = r;
      if (std::fabs(at(piv, col)) < 1e-13) throw std::runtime_error("singular basis");
      if (piv != col)
        for (int c = 0; c < 2 * rows_; ++c) std::swap(at(piv, c), at(col, c));
      double d = at(col, col);
      for (int c = 0; c < 2 * rows_; ++c) at(col, c) /= d;
      for (int r = 0; r < rows_; ++r) {
        if (r == col) continue;
        double f = at(r, col);
        if (f == 0.0) continue;
        for (int c = 0; c < 2 * rows_; ++c) at(r, c) -= f * at(col, c);
      }
    }
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < rows_; ++c) binv_[idx(r, c)] = at(r, rows_ + c);
    for (int r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (int c = 0; c < rows_; ++c) s += binv_[idx(r, c)];
      x_basic_[r] = std::max(s, 0.0);
    }
  }

  Status iterate(SimplexResult& res) {
    int since_refactor = 0;
    while (true) {
      if (res.iterations >= opt_.max_iterations) return Status::iteration_limit;
      std::vector<double> pi = compute_duals();
      double min_rc = 0.0;
      int enter = price(pi, &min_rc);
      if (enter < 0) {
        last_duals_ = std::move(pi);
        last_min_rc_ = min_rc;
        return Status::optimal;
      }
      std::vector<double> u = ftran(enter);
      double theta = 0.0;
      int leave = ratio_test(u, &theta);
      if (leave < 0) return Status::unbounded;
      pivot(enter, leave, u, theta);
      ++res.iterations;
      if (theta <= 1e-12) {
        if (++stall_ >= opt_.stall_before_bland) bland_mode_ = true;
      } else {
        stall_ = 0;
        bland_mode_ = false;
      }
      if (++since_refactor >= opt_.refactor_every) {
        refactorize();
        since_refactor = 0;
      }
    }
  }

  double artificial_mass() const {
    double s = 0.0;
    for (int r = 0; r < rows_; ++r)
      if (basic_[r] >= ncols_) s += x_basic_[r];
    return s;
  }

  void drive_out_artificials() {
    for (int r = 0; r < rows_; ++r) {
      if (basic_[r] < ncols_) continue;
      // row r of binv_ applied to each structural column, first nonzero wins
      std::vector<double> row(rows_);
      for (int c = 0; c < rows_; ++c) row[c] = binv_[idx(r, c)];
      int found = -1;
      for (int c = 0; c < ncols_ && found < 0; ++c) {
        if (in_basis_[c]) continue;
        if (std::fabs(column_dot(c, row)) > 1e-7) found = c;
      }
      if (found < 0) continue;  // redundant row, artificial stays pinned at zero
      std::vector<double> u = ftran(found);
      pivot(found, r, u, x_basic_[r] / u[r]);
    }
  }

  SimplexResult finish(SimplexResult res, Status st) {
    res.status = st;
    res.y.assign(ncols_, 0.0);
    if (st != Status::optimal) return res;
    double obj = 0.0;
    for (int r = 0; r < rows_; ++r) {
      if (basic_[r] >= ncols_) continue;
      double v = std::max(x_basic_[r], 0.0);
      res.y[basic_[r]] = v;
      obj += v * cols_[basic_[r]].cost;
    }
    res.objective = obj;
    res.duals = last_duals_;
    res.dual_objective = 0.0;
    for (double d : last_duals_) res.dual_objective += d;
    res.duality_gap = std::fabs(res.objective - res.dual_objective);
    res.max_reduced_cost_violation = std::max(0.0, -last_min_rc_);
    return res;
  }

  int owners_, members_, rows_;
  std::vector<PartitionColumn> cols_;
  SimplexOptions opt_;
  int ncols_ = 0;
  bool phase1_ = true;
  bool bland_mode_ = false;
  int stall_ = 0;
  std::vector<int> basic_;
  std::vector<char> in_basis_;
  std::vector<double> x_basic_;
  std::vector<double> binv_;
  std::vector<double> mask_sum_;
  std::vector<double> last_duals_;
  double last_min_rc_ = 0.0;
};

}  // namespace

SimplexResult solve_partition_lp(int owner_rows, int member_rows,
                                 const std::vector<PartitionColumn>& cols,
                                 const SimplexOptions& opt) {
  PartitionSimplex solver(owner_rows, member_rows, cols, opt);
  return solver.run();
}

}  // namespace wct
