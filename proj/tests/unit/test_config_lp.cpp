#include <doctest.h>

#include <bit>
#include <cmath>

#include "../support/random_solutions.hpp"
#include "wct/config_lp.hpp"
#include "wct/instance_io.hpp"

using namespace wct;

namespace {

double exhaustive_optimum(const Instance& inst) {
  double best = 1e300;
  std::vector<int> cur(inst.jobs, 0);
  long long total = 1;
  for (int j = 0; j < inst.jobs; ++j) total *= inst.machines;
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    bool ok = true;
    for (int j = 0; j < inst.jobs; ++j) {
      cur[j] = static_cast<int>(c % inst.machines);
      c /= inst.machines;
      if (!inst.eligible(cur[j], j)) {
        ok = false;
        break;
      }
    }
    if (ok) best = std::min(best, total_cost(inst, cur).value());
  }
  return best;
}

}  // namespace

TEST_CASE("configuration enumeration counts subsets of eligible jobs") {
  Instance inst = Instance::make(1, 2);
  inst.proc[0][0] = Rational(1);
  inst.weight[0][0] = Rational(1);
  inst.proc[0][1] = Rational(2);
  inst.weight[0][1] = Rational(3);
  CHECK(enumerate_configs(inst, 0).masks.size() == 4);

  Instance three = Instance::make(2, 3);
  for (int j = 0; j < 3; ++j) {
    three.proc[1][j] = Rational(1);
    three.weight[1][j] = Rational(1);
  }
  three.proc[0][0] = Rational(1);
  three.weight[0][0] = Rational(1);
  three.proc[0][2] = Rational(1);
  three.weight[0][2] = Rational(1);
  CHECK(enumerate_configs(three, 0).masks.size() == 4);  // job 1 not eligible there
  CHECK(enumerate_configs(three, 1).masks.size() == 8);

  Instance wide = gen_instance({1, 14, 1.0, 1, 8, 1, 4}, 5);
  CHECK(enumerate_configs(wide, 0).masks.size() == 16384);

  Instance toowide = gen_instance({1, 15, 1.0, 1, 8, 1, 4}, 5);
  CHECK_THROWS_AS(enumerate_configs(toowide, 0), std::invalid_argument);
}

TEST_CASE("enumerated costs match the smith cost") {
  Instance inst = gen_instance({2, 8, 0.9, 1, 64, 1, 10}, 21);
  MachineConfigs cfg = enumerate_configs(inst, 1);
  RngStream rng(3);
  for (int t = 0; t < 50; ++t) {
    auto idx = static_cast<std::size_t>(rng.uniform_int(0, cfg.masks.size() - 1));
    std::vector<int> jobs;
    for (int j = 0; j < inst.jobs; ++j)
      if (cfg.masks[idx] & (1u << j)) jobs.push_back(j);
    CHECK(cfg.costs[idx] ==
          doctest::Approx(smith_cost(inst, 1, jobs).value()).epsilon(1e-12));
  }
}

TEST_CASE("one machine forces the full configuration") {
  Instance inst = gen_instance({1, 6, 1.0, 1, 64, 1, 10}, 8);
  ConfigLPSolution sol = solve_config_lp(inst);
  std::vector<int> all_jobs;
  for (int j = 0; j < inst.jobs; ++j) all_jobs.push_back(j);
  CHECK(sol.objective == doctest::Approx(smith_cost(inst, 0, all_jobs).value()).epsilon(1e-9));
  CHECK(lp_cost_on_machine(sol, inst, 0) == doctest::Approx(sol.objective));
  // the constraints admit no other support: all mass on the full set
  double full_mass = 0.0;
  for (const auto& [i, mask, mass] : sol.masses) {
    (void)i;
    if (mask == (1u << inst.jobs) - 1) full_mass += mass;
  }
  CHECK(full_mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("heavily degenerate identical-job instances still solve cleanly") {
  // m machines, m identical unit jobs: thousands of equal-cost columns and
  // ties everywhere; the optimum spreads one job per machine
  for (int m : {2, 3, 4}) {
    Instance inst = Instance::make(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        inst.proc[i][j] = Rational(1);
        inst.weight[i][j] = Rational(1);
      }
    ConfigLPSolution sol = solve_config_lp(inst);
    CHECK(sol.objective == doctest::Approx(static_cast<double>(m)).epsilon(1e-9));
    CHECK(sol.duality_gap <= 1e-7 * (1.0 + sol.objective));
  }
}

TEST_CASE("two machines and two identical unit jobs split optimally") {
  Instance inst = Instance::make(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      inst.proc[i][j] = Rational(1);
      inst.weight[i][j] = Rational(1);
    }
  // the integral split has cost 2 and a fractional solution of value 2
  // exists, so the relaxation is pinched at 2
  CHECK(exhaustive_optimum(inst) == doctest::Approx(2.0));
  ConfigLPSolution sol = solve_config_lp(inst);
  CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("LP solutions satisfy constraints, optimality and the swap invariance") {
  for (int t = 0; t < 12; ++t) {
    Instance inst = gen_instance({2 + t % 2, 4 + t % 3, 0.8, 1, 64, 1, 10}, 4000 + t);
    ConfigLPSolution sol = solve_config_lp(inst);
    // one configuration per machine, one cover per job
    std::vector<double> machine_mass(inst.machines, 0.0);
    for (const auto& [i, mask, mass] : sol.masses) {
      (void)mask;
      CHECK(mass >= 0.0);
      machine_mass[i] += mass;
    }
    for (int i = 0; i < inst.machines; ++i)
      CHECK(machine_mass[i] == doctest::Approx(1.0).epsilon(1e-9));
    for (int j = 0; j < inst.jobs; ++j) {
      double cover = 0.0;
      for (int i = 0; i < inst.machines; ++i) cover += sol.z[i][j];
      CHECK(cover == doctest::Approx(1.0).epsilon(1e-9));
    }
    // z is the mass of configurations containing the job
    std::vector<std::vector<double>> z(inst.machines, std::vector<double>(inst.jobs, 0.0));
    for (const auto& [i, mask, mass] : sol.masses)
      for (int j = 0; j < inst.jobs; ++j)
        if (mask & (1u << j)) z[i][j] += mass;
    for (int i = 0; i < inst.machines; ++i)
      for (int j = 0; j < inst.jobs; ++j)
        CHECK(std::fabs(z[i][j] - sol.z[i][j]) <= 1e-12);
    // objective assembles from the masses
    double direct = 0.0;
    for (int i = 0; i < inst.machines; ++i) direct += lp_cost_on_machine(sol, inst, i);
    CHECK(direct == doctest::Approx(sol.objective).epsilon(1e-9));
    // relaxation bound and duality certificate
    CHECK(sol.objective <= exhaustive_optimum(inst) + 1e-7);
    CHECK(sol.duality_gap <= 1e-7 * (1.0 + std::fabs(sol.objective)));
    // swapping the instance leaves the optimum unchanged
    ConfigLPSolution swapped = solve_config_lp(swap_sizes_and_weights(inst));
    CHECK(swapped.objective == doctest::Approx(sol.objective).epsilon(1e-7));
  }
}

TEST_CASE("LP value never exceeds a greedy integral assignment") {
  for (int t = 0; t < 10; ++t) {
    Instance inst = gen_instance({3, 7, 0.7, 1, 64, 1, 10}, 6000 + t);
    RngStream rng(t);
    std::vector<int> greedy = wct::test::random_assignment(inst, rng);
    ConfigLPSolution sol = solve_config_lp(inst);
    CHECK(sol.objective <= total_cost(inst, greedy).value() + 1e-7);
  }
}

TEST_CASE("machines whose mass sits on the empty configuration cost nothing") {
  Instance inst = Instance::make(2, 1);
  inst.proc[0][0] = Rational(1);
  inst.weight[0][0] = Rational(1);  // job only runs on machine 0
  ConfigLPSolution sol = solve_config_lp(inst);
  CHECK(lp_cost_on_machine(sol, inst, 1) == doctest::Approx(0.0));
  CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("basic solutions have few nonzeros") {
  Instance inst = gen_instance({3, 8, 0.8, 1, 64, 1, 10}, 99);
  ConfigLPSolution sol = solve_config_lp(inst);
  CHECK(static_cast<int>(sol.masses.size()) <= inst.machines + inst.jobs);
}
