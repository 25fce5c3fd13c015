#include <doctest.h>

#include <algorithm>

#include "wct/instance.hpp"
#include "wct/instance_io.hpp"
#include "wct/rng.hpp"

using namespace wct;

namespace {

Instance tiny(int machines, int jobs) { return Instance::make(machines, jobs); }

void set(Instance& inst, int i, int j, long long p, long long w) {
  inst.proc[i][j] = Rational(p);
  inst.weight[i][j] = Rational(w);
}

// schedule the set in descending w/p (ties by index) and accumulate weighted
// completion times; the per-pair formula must agree with this
Rational sequential_cost(const Instance& inst, int machine, std::vector<int> jobs) {
  std::stable_sort(jobs.begin(), jobs.end(), [&](int a, int b) {
    return *inst.weight[machine][a] * *inst.proc[machine][b] >
           *inst.weight[machine][b] * *inst.proc[machine][a];
  });
  Rational time(0), cost(0);
  for (int j : jobs) {
    time += *inst.proc[machine][j];
    cost += time * *inst.weight[machine][j];
  }
  return cost;
}

std::vector<std::vector<int>> all_assignments(const Instance& inst) {
  std::vector<std::vector<int>> out;
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
    if (ok) out.push_back(cur);
  }
  return out;
}

}  // namespace

TEST_CASE("single job swap keeps the cost") {
  Instance inst = tiny(1, 1);
  set(inst, 0, 0, 2, 3);
  inst.refresh_flags();
  Instance swapped = swap_sizes_and_weights(inst);
  CHECK(*swapped.proc[0][0] == Rational(3));
  CHECK(*swapped.weight[0][0] == Rational(2));
  CHECK(smith_cost(inst, 0, {0}) == Rational(6));
  CHECK(smith_cost(swapped, 0, {0}) == Rational(6));
}

TEST_CASE("two-job swap keeps the one-machine cost") {
  Instance inst = tiny(1, 2);
  set(inst, 0, 0, 1, 2);
  set(inst, 0, 1, 2, 1);
  inst.refresh_flags();
  Instance swapped = swap_sizes_and_weights(inst);
  // oracle: try both processing orders, keep the cheaper one
  auto best_order = [](long long p0, long long w0, long long p1, long long w1) {
    long long ab = p0 * w0 + (p0 + p1) * w1;
    long long ba = p1 * w1 + (p0 + p1) * w0;
    return Rational(std::min(ab, ba));
  };
  CHECK(best_order(1, 2, 2, 1) == Rational(5));
  CHECK(smith_cost(inst, 0, {0, 1}) == Rational(5));
  CHECK(smith_cost(swapped, 0, {0, 1}) == best_order(2, 1, 1, 2));
  CHECK(smith_cost(swapped, 0, {0, 1}) == Rational(5));
}

TEST_CASE("swapping a standard instance yields machine-independent sizes") {
  Instance inst = gen_instance({3, 5, 0.8, 1, 64, 1, 10}, 11);
  CHECK_FALSE(inst.weights_machine_dependent);
  Instance swapped = swap_sizes_and_weights(inst);
  CHECK(swapped.sizes_machine_independent);
  std::vector<double> sizes = machine_independent_sizes(swapped);
  for (int j = 0; j < inst.jobs; ++j)
    for (int i = 0; i < inst.machines; ++i)
      if (inst.eligible(i, j)) CHECK(sizes[j] == inst.weight[i][j]->value());
}

TEST_CASE("swap is an involution") {
  for (int t = 0; t < 20; ++t) {
    Instance inst = gen_instance({1 + t % 3, 2 + t % 5, 0.7, 1, 64, 1, 10}, 100 + t);
    CHECK(swap_sizes_and_weights(swap_sizes_and_weights(inst)) == inst);
  }
}

TEST_CASE("every assignment costs the same on the swapped instance") {
  for (int t = 0; t < 25; ++t) {
    Instance inst = gen_instance({1 + t % 3, 1 + t % 6, 0.75, 1, 64, 1, 10}, 300 + t);
    Instance swapped = swap_sizes_and_weights(inst);
    for (const auto& asg : all_assignments(inst))
      CHECK(total_cost(inst, asg) == total_cost(swapped, asg));
  }
}

TEST_CASE("smith cost examples") {
  Instance inst = tiny(1, 2);
  set(inst, 0, 0, 1, 2);
  set(inst, 0, 1, 2, 1);
  CHECK(smith_cost(inst, 0, {0, 1}) == Rational(5));
  CHECK(smith_cost(inst, 0, {}) == Rational(0));
  Instance single = tiny(1, 1);
  set(single, 0, 0, 4, 3);
  CHECK(smith_cost(single, 0, {0}) == Rational(12));
}

TEST_CASE("smith cost equals the sequential schedule cost") {
  for (int t = 0; t < 30; ++t) {
    Instance inst = gen_instance({2, 7, 1.0, 1, 64, 1, 10}, 700 + t);
    RngStream rng(t);
    std::vector<int> jobs;
    for (int j = 0; j < inst.jobs; ++j)
      if (rng.bernoulli(0.6)) jobs.push_back(j);
    int machine = static_cast<int>(rng.uniform_int(0, inst.machines - 1));
    CHECK(smith_cost(inst, machine, jobs) == sequential_cost(inst, machine, jobs));
  }
}

TEST_CASE("smith cost names the ineligible pair") {
  Instance inst = tiny(2, 2);
  set(inst, 0, 0, 1, 1);
  set(inst, 0, 1, 1, 1);
  set(inst, 1, 1, 1, 1);
  CHECK_THROWS_WITH_AS(smith_cost(inst, 1, {0}), "job 0 is not eligible on machine 1",
                       std::invalid_argument);
}

TEST_CASE("total cost sums machine costs") {
  Instance inst = tiny(2, 2);
  set(inst, 0, 0, 1, 1);
  set(inst, 0, 1, 1, 1);
  set(inst, 1, 0, 1, 1);
  set(inst, 1, 1, 1, 1);
  CHECK(total_cost(inst, {0, 0}) == smith_cost(inst, 0, {0, 1}));
  CHECK(total_cost(inst, {0, 1}) == Rational(2));
  CHECK(total_cost(inst, {0, 0}) == Rational(3));
  CHECK_THROWS_AS(total_cost(inst, {0}), std::invalid_argument);
}

TEST_CASE("assignments validate eligibility and carry their recomputed cost") {
  Instance inst = tiny(2, 2);
  set(inst, 0, 0, 2, 3);
  set(inst, 0, 1, 1, 1);
  set(inst, 1, 1, 4, 5);
  Assignment asg = make_assignment(inst, {0, 1});
  CHECK(asg.total_cost == Rational(6) + Rational(20));
  CHECK_THROWS_AS(make_assignment(inst, {1, 1}), std::invalid_argument);
}

TEST_CASE("instance validation catches broken invariants") {
  Instance inst = tiny(2, 2);
  set(inst, 0, 0, 1, 1);
  set(inst, 1, 0, 1, 1);
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);  // job 1 nowhere
  set(inst, 0, 1, 1, 1);
  CHECK_NOTHROW(inst.validate());
  inst.proc[0][1] = Rational(0);
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);  // nonpositive size
}
