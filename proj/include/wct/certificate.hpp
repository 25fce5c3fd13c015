#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace wct::cert {

// The certificate covers rho = 2 and the three job-size groups [1,2), [2,4),
// [4,8) after scaling. For each of the 10 log-uniform intervals of
// L = scaled total volume in [2,4), a row carries a ratio alpha and Lagrangian
// multipliers for two relaxations: the "capped" one, whose smallest group is
// replaced by its cap (two multipliers), and the "uncapped" one with all three
// group multipliers. The row is valid when every case objective is
// non-positive at both interval endpoints, and the certified ratio is the mean
// alpha over the ten intervals.

enum class ElemType { s, t0, t1, t2, b };

struct FixedElem {
  double value = 0.0;
  ElemType type = ElemType::s;
};

struct FlexRange {
  ElemType type = ElemType::s;
  double lo = 0.0;
  double hi = 0.0;
  bool unbounded = false;  // range [lo, infinity)
};

// A size-configuration pattern: fixed elements plus at most one flexible
// element ranging over an interval. Open lower ends are widened to closed
// ones; the extra endpoint only over-checks.
struct SizeConfigCase {
  std::string id;
  std::vector<FixedElem> fixed;
  std::optional<FlexRange> flex;
};

struct CappedParams {
  double mu = 0.0, l1 = 0.0, l2 = 0.0;
};

struct UncappedParams {
  double mu = 0.0, l0 = 0.0, l1 = 0.0, l2 = 0.0;
};

struct CertificateRow {
  int interval = 1;  // o in 1..10, L in [2^(1+(o-1)/10), 2^(1+o/10))
  double alpha = 1.5;
  CappedParams capped;
  UncappedParams uncapped;
};

double interval_lo(int o);
double interval_hi(int o);

// Minimum alpha forced by the plain volume bound, 3/2 - 2/L^2.
double baseline_alpha(double L);

const std::vector<SizeConfigCase>& capped_cases();    // 6 patterns
const std::vector<SizeConfigCase>& uncapped_cases();  // 23 patterns

// Dual objective values for a concrete element multiset.
double capped_value(const std::vector<FixedElem>& elems, double alpha, double L,
                    const CappedParams& p);
double uncapped_value(const std::vector<FixedElem>& elems, double alpha, double L,
                      const UncappedParams& p);

// Maximum of the chosen objective over the case's flexible element. The
// quadratic coefficient in the flexible element is 1 - alpha < 0, so the
// maximum sits at the concave vertex or a range endpoint. Throws for
// alpha <= 1.
struct CaseMax {
  double value = 0.0;
  double arg = 0.0;  // maximizing flexible value; NaN when the case has none
};
CaseMax max_capped(const SizeConfigCase& c, double alpha, double L, const CappedParams& p);
CaseMax max_uncapped(const SizeConfigCase& c, double alpha, double L, const UncappedParams& p);

inline constexpr double kCaseMargin = 1e-9;

struct Violation {
  int interval = 0;
  double L = 0.0;
  std::string case_id;
  bool capped_program = false;
  double arg = 0.0;
  double value = 0.0;
};

struct IntervalCheck {
  int interval = 0;
  bool pass = false;
  double baseline_requirement = 0.0;  // baseline_alpha at the right endpoint
  double worst_value = 0.0;           // largest case maximum seen
  std::optional<Violation> worst;     // set when the interval fails
};

// An interval passes when alpha clears the baseline requirement at the right
// endpoint and every case maximum at both endpoints stays within kCaseMargin.
IntervalCheck check_interval(const CertificateRow& row);

struct TableCheck {
  bool pass = false;
  double mean_alpha = 0.0;
  std::vector<IntervalCheck> intervals;
};

// Full verification: rows must cover intervals 1..10 exactly, every interval
// must pass, and the mean alpha must stay below 1.36.
TableCheck check_table(const std::vector<CertificateRow>& rows);

// The parameters shipped with the tool (rows for all 10 intervals).
const std::vector<CertificateRow>& reference_table();

struct GridAxis {
  double lo = 0.0, hi = 0.0, step = 1.0;
};

struct SearchGrid {
  std::array<GridAxis, 3> capped;    // mu, l1, l2
  std::array<GridAxis, 4> uncapped;  // mu, l0, l1, l2
  int refine_rounds = 2;
  double alpha_precision = 1e-7;
};

// Grid box of the given half-width and step around a row's parameters,
// clamped at zero (multipliers are non-negative).
SearchGrid grid_around(const CertificateRow& row, double half_width, double step);

// Coarse grid scan, binary search on alpha per grid point, then
// refine_rounds rounds of 10x finer scans around the incumbent. Throws if no
// grid point admits any feasible alpha.
CertificateRow search_params(int interval, const SearchGrid& grid);

// Wire format: array of rows with fields
// {o, alpha, mu13, l1_13, l2_13, mu14, l0, l1, l2}.
std::vector<CertificateRow> rows_from_json(const nlohmann::json& j);
nlohmann::ordered_json rows_to_json(const std::vector<CertificateRow>& rows);

}  // namespace wct::cert
