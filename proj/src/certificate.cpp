#include "wct/certificate.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wct::cert {

namespace {

// the 11 boundaries 2^(1 + t/10), t = 0..10, computed once
const std::array<double, 11>& interval_boundaries() {
  static const std::array<double, 11> bounds = [] {
    std::array<double, 11> b{};
    for (int t = 0; t <= 10; ++t) b[t] = std::exp2(1.0 + t / 10.0);
    return b;
  }();
  return bounds;
}

int checked_interval(int o) {
  if (o < 1 || o > 10) throw std::out_of_range("interval index must be in 1..10");
  return o;
}

}  // namespace

double interval_lo(int o) { return interval_boundaries()[checked_interval(o) - 1]; }
double interval_hi(int o) { return interval_boundaries()[checked_interval(o)]; }

double baseline_alpha(double L) { return 1.5 - 2.0 / (L * L); }

namespace {

const char* type_name(ElemType t) {
  switch (t) {
    case ElemType::s: return "s";
    case ElemType::t0: return "0";
    case ElemType::t1: return "1";
    case ElemType::t2: return "2";
    case ElemType::b: return "b";
  }
  return "?";
}

std::string case_id(const std::vector<FixedElem>& fixed, const FlexRange& flex) {
  std::string id;
  for (const FixedElem& e : fixed) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g%s+", e.value, type_name(e.type));
    id += buf;
  }
  char buf[64];
  if (flex.unbounded)
    std::snprintf(buf, sizeof buf, "%s[%g,inf)", type_name(flex.type), flex.lo);
  else
    std::snprintf(buf, sizeof buf, "%s[%g,%g]", type_name(flex.type), flex.lo, flex.hi);
  id += buf;
  return id;
}

SizeConfigCase make_case(std::vector<FixedElem> fixed, FlexRange flex) {
  SizeConfigCase c;
  c.id = case_id(fixed, flex);
  c.fixed = std::move(fixed);
  c.flex = flex;
  return c;
}

}  // namespace

const std::vector<SizeConfigCase>& capped_cases() {
  static const std::vector<SizeConfigCase> cases = [] {
    std::vector<SizeConfigCase> cs;
    // one element
    cs.push_back(make_case({}, {ElemType::s, 0.0, 2.0, false}));
    cs.push_back(make_case({}, {ElemType::t1, 2.0, 4.0, false}));
    cs.push_back(make_case({}, {ElemType::t2, 4.0, 8.0, false}));
    cs.push_back(make_case({}, {ElemType::b, 8.0, 0.0, true}));
    // a fixed 2 of type s plus one more element
    cs.push_back(make_case({{2.0, ElemType::s}}, {ElemType::s, 0.0, 2.0, false}));
    cs.push_back(make_case({{2.0, ElemType::s}}, {ElemType::t1, 2.0, 4.0, false}));
    return cs;
  }();
  return cases;
}

const std::vector<SizeConfigCase>& uncapped_cases() {
  static const std::vector<SizeConfigCase> cases = [] {
    std::vector<SizeConfigCase> cs;
    const FlexRange fs{ElemType::s, 0.0, 1.0, false};
    const FlexRange f0{ElemType::t0, 1.0, 2.0, false};
    const FlexRange f1{ElemType::t1, 2.0, 4.0, false};
    const FlexRange f2{ElemType::t2, 4.0, 8.0, false};
    const FlexRange fb{ElemType::b, 8.0, 0.0, true};
    const FixedElem one_s{1.0, ElemType::s};
    const FixedElem two_0{2.0, ElemType::t0};
    const FixedElem two_1{2.0, ElemType::t1};
    // one element: 5 cases
    for (const FlexRange& f : {fs, f0, f1, f2, fb}) cs.push_back(make_case({}, f));
    // two elements: 9 cases
    for (const FixedElem& a1 : {one_s, two_0, two_1})
      for (const FlexRange& f : {fs, f0, f1}) cs.push_back(make_case({a1}, f));
    // three elements led by a 1 of type s: 6 cases
    for (const FixedElem& a2 : {one_s, two_0, two_1})
      for (const FlexRange& f : {fs, f0}) cs.push_back(make_case({one_s, a2}, f));
    // two 1s of type s plus a group-1 element
    cs.push_back(make_case({one_s, one_s}, f1));
    // three 1s of type s plus one more element: 2 cases
    for (const FlexRange& f : {fs, f0}) cs.push_back(make_case({one_s, one_s, one_s}, f));
    return cs;
  }();
  return cases;
}

namespace {

struct Sums {
  double total = 0.0, squares = 0.0, v0 = 0.0, v1 = 0.0, v2 = 0.0;
};

Sums accumulate(const std::vector<FixedElem>& elems) {
  Sums s;
  for (const FixedElem& e : elems) {
    s.total += e.value;
    s.squares += e.value * e.value;
    switch (e.type) {
      case ElemType::t0: s.v0 += e.value; break;
      case ElemType::t1: s.v1 += e.value; break;
      case ElemType::t2: s.v2 += e.value; break;
      default: break;
    }
  }
  return s;
}

double multiplier_for(ElemType t, const CappedParams& p) {
  if (t == ElemType::t0) throw std::logic_error("group-0 element in a capped case");
  if (t == ElemType::t1) return p.l1;
  if (t == ElemType::t2) return p.l2;
  return 0.0;
}

double multiplier_for(ElemType t, const UncappedParams& p) {
  switch (t) {
    case ElemType::t0: return p.l0;
    case ElemType::t1: return p.l1;
    case ElemType::t2: return p.l2;
    default: return 0.0;
  }
}

template <class Params, class Value>
CaseMax max_over_case(const SizeConfigCase& c, double alpha, double L, const Params& p,
                      Value value) {
  if (!(alpha > 1.0)) throw std::domain_error("alpha must exceed 1 for a concave flexible term");
  if (!c.flex) {
    return {value(c.fixed, alpha, L, p), std::numeric_limits<double>::quiet_NaN()};
  }
  double fixed_total = 0.0;
  for (const FixedElem& e : c.fixed) fixed_total += e.value;
  // objective in the flexible element a: (1 - alpha) a^2 + B a + const
  double b = -alpha * fixed_total + p.mu - multiplier_for(c.flex->type, p);
  double vertex = b / (2.0 * (alpha - 1.0));
  std::vector<double> candidates{c.flex->lo};
  if (c.flex->unbounded) {
    if (vertex > c.flex->lo) candidates.push_back(vertex);
  } else {
    candidates.push_back(c.flex->hi);
    if (vertex > c.flex->lo && vertex < c.flex->hi) candidates.push_back(vertex);
  }
  CaseMax best{-std::numeric_limits<double>::infinity(), 0.0};
  std::vector<FixedElem> elems = c.fixed;
  elems.push_back({0.0, c.flex->type});
  for (double a : candidates) {
    elems.back().value = a;
    double v = value(elems, alpha, L, p);
    if (v > best.value) best = {v, a};
  }
  return best;
}

}  // namespace

double capped_value(const std::vector<FixedElem>& elems, double alpha, double L,
                    const CappedParams& p) {
  Sums s = accumulate(elems);
  return (1.0 - alpha / 2.0) * s.squares - alpha / 2.0 * s.total * s.total + p.mu * s.total -
         p.l1 * s.v1 - p.l2 * s.v2 + 0.5 * L * L - p.mu * L - 0.5 +
         0.5 * (p.l1 * p.l1 + p.l2 * p.l2);
}

double uncapped_value(const std::vector<FixedElem>& elems, double alpha, double L,
                      const UncappedParams& p) {
  Sums s = accumulate(elems);
  return (1.0 - alpha / 2.0) * s.squares - alpha / 2.0 * s.total * s.total + p.mu * s.total -
         p.l0 * s.v0 - p.l1 * s.v1 - p.l2 * s.v2 + 0.5 * L * L - p.mu * L +
         0.5 * (p.l0 * p.l0 + p.l1 * p.l1 + p.l2 * p.l2);
}

CaseMax max_capped(const SizeConfigCase& c, double alpha, double L, const CappedParams& p) {
  return max_over_case(c, alpha, L, p,
                       [](const std::vector<FixedElem>& elems, double a, double l,
                          const CappedParams& pp) { return capped_value(elems, a, l, pp); });
}

CaseMax max_uncapped(const SizeConfigCase& c, double alpha, double L, const UncappedParams& p) {
  return max_over_case(c, alpha, L, p,
                       [](const std::vector<FixedElem>& elems, double a, double l,
                          const UncappedParams& pp) { return uncapped_value(elems, a, l, pp); });
}

namespace {

bool row_parameters_valid(const CertificateRow& row) {
  return row.interval >= 1 && row.interval <= 10 && row.alpha > 1.0 && row.alpha <= 1.5 &&
         row.capped.mu >= 0.0 && row.capped.l1 >= 0.0 && row.capped.l2 >= 0.0 &&
         row.uncapped.mu >= 0.0 && row.uncapped.l0 >= 0.0 && row.uncapped.l1 >= 0.0 &&
         row.uncapped.l2 >= 0.0;
}

}  // namespace

IntervalCheck check_interval(const CertificateRow& row) {
  IntervalCheck ic;
  ic.interval = row.interval;
  ic.worst_value = -std::numeric_limits<double>::infinity();
  if (!row_parameters_valid(row)) {
    ic.pass = false;
    ic.worst = Violation{row.interval, 0.0, "row parameters out of range", false, 0.0, 0.0};
    return ic;
  }
  double lo = interval_lo(row.interval);
  double hi = interval_hi(row.interval);
  ic.baseline_requirement = baseline_alpha(hi);
  ic.pass = row.alpha >= ic.baseline_requirement - 1e-12;
  if (!ic.pass)
    ic.worst = Violation{row.interval, hi, "volume-cap baseline", false, 0.0,
                         ic.baseline_requirement - row.alpha};
  for (double L : {lo, hi}) {
    for (const SizeConfigCase& c : capped_cases()) {
      CaseMax m = max_capped(c, row.alpha, L, row.capped);
      if (m.value > ic.worst_value) ic.worst_value = m.value;
      if (m.value > kCaseMargin && ic.pass) {
        ic.pass = false;
        ic.worst = Violation{row.interval, L, c.id, true, m.arg, m.value};
      }
    }
    for (const SizeConfigCase& c : uncapped_cases()) {
      CaseMax m = max_uncapped(c, row.alpha, L, row.uncapped);
      if (m.value > ic.worst_value) ic.worst_value = m.value;
      if (m.value > kCaseMargin && ic.pass) {
        ic.pass = false;
        ic.worst = Violation{row.interval, L, c.id, false, m.arg, m.value};
      }
    }
  }
  return ic;
}

TableCheck check_table(const std::vector<CertificateRow>& rows) {
  if (rows.size() != 10) throw std::invalid_argument("certificate must have exactly 10 rows");
  std::vector<const CertificateRow*> by_interval(10, nullptr);
  for (const CertificateRow& row : rows) {
    if (row.interval < 1 || row.interval > 10 || by_interval[row.interval - 1])
      throw std::invalid_argument("certificate rows must cover intervals 1..10 exactly");
    by_interval[row.interval - 1] = &row;
  }
  TableCheck tc;
  tc.pass = true;
  double alpha_sum = 0.0;
  for (int o = 1; o <= 10; ++o) {
    IntervalCheck ic = check_interval(*by_interval[o - 1]);
    tc.pass = tc.pass && ic.pass;
    alpha_sum += by_interval[o - 1]->alpha;
    tc.intervals.push_back(std::move(ic));
  }
  tc.mean_alpha = alpha_sum / 10.0;
  tc.pass = tc.pass && tc.mean_alpha < 1.36;
  return tc;
}

const std::vector<CertificateRow>& reference_table() {
  static const std::vector<CertificateRow> rows = {
      {1, 1.376228, {2.060000, 0.08, 0.00}, {2.072000, 0.3145, 0.3364, 0.0828}},
      {2, 1.370445, {2.293595, 0.16, 0.04}, {2.220500, 0.3154, 0.3642, 0.1604}},
      {3, 1.364426, {2.458214, 0.22, 0.16}, {2.508757, 0.3178, 0.4442, 0.3200}},
      {4, 1.356049, {2.634649, 0.32, 0.28}, {2.720583, 0.3220, 0.5288, 0.4532}},
      {5, 1.349022, {2.823747, 0.42, 0.40}, {2.874152, 0.3255, 0.5942, 0.5472}},
      {6, 1.344238, {2.998133, 0.48, 0.48}, {2.961363, 0.3279, 0.6310, 0.5984}},
      {7, 1.341530, {3.213319, 0.56, 0.56}, {3.150265, 0.3292, 0.6886, 0.6752}},
      {8, 1.340912, {3.346480, 0.60, 0.60}, {3.343231, 0.3296, 0.7362, 0.7336}},
      {9, 1.356413, {3.412558, 0.60, 0.60}, {3.404549, 0.3273, 0.7398, 0.7380}},
      {10, 1.375000, {3.470883, 0.60, 0.60}, {3.507084, 0.3009, 0.7328, 0.7324}},
  };
  return rows;
}

namespace {

std::vector<double> axis_points(const GridAxis& axis) {
  std::vector<double> pts;
  if (axis.step <= 0.0 || axis.hi < axis.lo)
    throw std::invalid_argument("grid axis must have positive step and ordered bounds");
  for (double v = axis.lo; v <= axis.hi + axis.step * 1e-9; v += axis.step)
    pts.push_back(std::max(v, 0.0));
  return pts;
}

// smallest alpha in (1, 1.5] that keeps every case non-positive for these
// parameters, or nothing if even 1.5 fails
template <class Params, class MaxFn>
std::optional<double> best_alpha(const std::vector<SizeConfigCase>& cases, double lo_L,
                                 double hi_L, const Params& p, double precision, MaxFn max_fn) {
  auto feasible = [&](double alpha) {
    for (double L : {lo_L, hi_L})
      for (const SizeConfigCase& c : cases)
        if (max_fn(c, alpha, L, p).value > kCaseMargin) return false;
    return true;
  };
  double hi = 1.5;
  if (!feasible(hi)) return std::nullopt;
  double lo = 1.0 + 1e-9;
  if (feasible(lo)) return lo;
  while (hi - lo > precision) {
    double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

SearchGrid grid_around(const CertificateRow& row, double half_width, double step) {
  auto axis = [&](double center) {
    return GridAxis{std::max(center - half_width, 0.0), center + half_width, step};
  };
  SearchGrid g;
  g.capped = {axis(row.capped.mu), axis(row.capped.l1), axis(row.capped.l2)};
  g.uncapped = {axis(row.uncapped.mu), axis(row.uncapped.l0), axis(row.uncapped.l1),
                axis(row.uncapped.l2)};
  return g;
}

CertificateRow search_params(int interval, const SearchGrid& grid) {
  if (interval < 1 || interval > 10) throw std::invalid_argument("interval must be in 1..10");
  double lo_L = interval_lo(interval);
  double hi_L = interval_hi(interval);

  auto scan_capped = [&](const std::array<GridAxis, 3>& axes, CappedParams* best_params) {
    std::optional<double> best;
    for (double mu : axis_points(axes[0]))
      for (double l1 : axis_points(axes[1]))
        for (double l2 : axis_points(axes[2])) {
          CappedParams p{mu, l1, l2};
          auto alpha = best_alpha(capped_cases(), lo_L, hi_L, p, grid.alpha_precision,
                                  [](const SizeConfigCase& c, double a, double L,
                                     const CappedParams& pp) { return max_capped(c, a, L, pp); });
          if (alpha && (!best || *alpha < *best)) {
            best = *alpha;
            *best_params = p;
          }
        }
    return best;
  };
  auto scan_uncapped = [&](const std::array<GridAxis, 4>& axes, UncappedParams* best_params) {
    std::optional<double> best;
    for (double mu : axis_points(axes[0]))
      for (double l0 : axis_points(axes[1]))
        for (double l1 : axis_points(axes[2]))
          for (double l2 : axis_points(axes[3])) {
            UncappedParams p{mu, l0, l1, l2};
            auto alpha =
                best_alpha(uncapped_cases(), lo_L, hi_L, p, grid.alpha_precision,
                           [](const SizeConfigCase& c, double a, double L, const UncappedParams&
                                  pp) { return max_uncapped(c, a, L, pp); });
            if (alpha && (!best || *alpha < *best)) {
              best = *alpha;
              *best_params = p;
            }
          }
    return best;
  };

  CappedParams best_capped{};
  std::array<GridAxis, 3> axes3 = grid.capped;
  std::optional<double> alpha_capped = scan_capped(axes3, &best_capped);
  for (int round = 0; round < grid.refine_rounds && alpha_capped; ++round) {
    for (int d = 0; d < 3; ++d) {
      double center = d == 0 ? best_capped.mu : (d == 1 ? best_capped.l1 : best_capped.l2);
      double step = axes3[d].step;
      axes3[d] = {std::max(center - step, 0.0), center + step, step / 10.0};
    }
    alpha_capped = scan_capped(axes3, &best_capped);
  }

  UncappedParams best_uncapped{};
  std::array<GridAxis, 4> axes4 = grid.uncapped;
  std::optional<double> alpha_uncapped = scan_uncapped(axes4, &best_uncapped);
  for (int round = 0; round < grid.refine_rounds && alpha_uncapped; ++round) {
    for (int d = 0; d < 4; ++d) {
      double center = d == 0 ? best_uncapped.mu
                             : (d == 1 ? best_uncapped.l0
                                       : (d == 2 ? best_uncapped.l1 : best_uncapped.l2));
      double step = axes4[d].step;
      axes4[d] = {std::max(center - step, 0.0), center + step, step / 10.0};
    }
    alpha_uncapped = scan_uncapped(axes4, &best_uncapped);
  }

  if (!alpha_capped || !alpha_uncapped)
    throw std::runtime_error("no feasible parameters in the search grid; widen the bounds");

  CertificateRow row;
  row.interval = interval;
  row.alpha = std::max({*alpha_capped, *alpha_uncapped, baseline_alpha(hi_L)});
  row.capped = best_capped;
  row.uncapped = best_uncapped;
  return row;
}

std::vector<CertificateRow> rows_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("certificate must be a JSON array of rows");
  std::vector<CertificateRow> rows;
  for (const auto& rj : j) {
    CertificateRow row;
    row.interval = rj.at("o").get<int>();
    row.alpha = rj.at("alpha").get<double>();
    row.capped.mu = rj.at("mu13").get<double>();
    row.capped.l1 = rj.at("l1_13").get<double>();
    row.capped.l2 = rj.at("l2_13").get<double>();
    row.uncapped.mu = rj.at("mu14").get<double>();
    row.uncapped.l0 = rj.at("l0").get<double>();
    row.uncapped.l1 = rj.at("l1").get<double>();
    row.uncapped.l2 = rj.at("l2").get<double>();
    rows.push_back(row);
  }
  return rows;
}

nlohmann::ordered_json rows_to_json(const std::vector<CertificateRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CertificateRow& row : rows)
    arr.push_back({{"o", row.interval},
                   {"alpha", row.alpha},
                   {"mu13", row.capped.mu},
                   {"l1_13", row.capped.l1},
                   {"l2_13", row.capped.l2},
                   {"mu14", row.uncapped.mu},
                   {"l0", row.uncapped.l0},
                   {"l1", row.uncapped.l1},
                   {"l2", row.uncapped.l2}});
  return arr;
}

}  // namespace wct::cert
