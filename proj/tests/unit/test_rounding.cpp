#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "../support/random_solutions.hpp"
#include "wct/instance_io.hpp"
#include "wct/rounding.hpp"

using namespace wct;

namespace {

struct EdgeSpec {
  int machine;
  int job;
  double x;
  bool marked;
};

EdgeGraph make_graph(int machines, std::vector<double> job_sizes, std::vector<EdgeSpec> specs,
                     double beta = 1.0, double rho = 2.0) {
  EdgeGraph g;
  g.rho = rho;
  g.beta = beta;
  g.machines = machines;
  g.jobs = static_cast<int>(job_sizes.size());
  g.job_size = std::move(job_sizes);
  for (double p : g.job_size) g.class_of_job.push_back(classify(p, beta, rho));
  std::set<int> classes(g.class_of_job.begin(), g.class_of_job.end());
  g.classes.assign(classes.begin(), classes.end());
  for (const EdgeSpec& s : specs)
    g.edges.push_back({static_cast<int>(g.edges.size()), s.machine, s.job, s.x, s.marked,
                       g.class_of_job[s.job], 1.0, g.job_size[s.job]});
  g.edges_of_job.assign(g.jobs, {});
  for (const GraphEdge& e : g.edges) g.edges_of_job[e.job].push_back(e.id);
  return g;
}

EdgeGraph four_cycle() {
  // both jobs half on each machine, everything marked
  return make_graph(2, {1.0, 1.0},
                    {{0, 0, 0.5, true}, {1, 0, 0.5, true}, {0, 1, 0.5, true}, {1, 1, 0.5, true}});
}

}  // namespace

TEST_CASE("a fully marked four-cycle is found as a cycle") {
  EdgeGraph g = four_cycle();
  ClassRounder state(g, 0);
  auto s = state.find_structure();
  REQUIRE(s.has_value());
  CHECK(s->kind == StructureFound::Kind::cycle);
  CHECK(s->edges.size() == 4);
  CHECK(s->machines.front() == s->machines.back());
  CHECK(s->jobs.size() == 2);
}

TEST_CASE("a job with two unmarked edges forms the shortest pseudo-path") {
  EdgeGraph g = make_graph(2, {1.0}, {{0, 0, 0.5, false}, {1, 0, 0.5, false}});
  ClassRounder state(g, 0);
  auto s = state.find_structure();
  REQUIRE(s.has_value());
  CHECK(s->kind == StructureFound::Kind::pseudo_path);
  CHECK(s->edges == std::vector<int>{0, 1});
  CHECK(s->machines == std::vector<int>{0, 1});
  CHECK(s->jobs == std::vector<int>{0});
}

TEST_CASE("a lone marked edge with an unmarked attachment is a valid end pair") {
  // machine 0 holds its only live marked edge, job 0 also leans on machine 1
  EdgeGraph g = make_graph(2, {1.0}, {{0, 0, 0.7, true}, {1, 0, 0.3, false}});
  ClassRounder state(g, 0);
  auto s = state.find_structure();
  REQUIRE(s.has_value());
  CHECK(s->kind == StructureFound::Kind::pseudo_path);
  CHECK(s->edges.size() == 2);
}

TEST_CASE("an integral state has no structure") {
  EdgeGraph g = make_graph(2, {1.0, 1.0}, {{0, 0, 1.0, true}, {1, 1, 1.0, true}});
  ClassRounder state(g, 0);
  CHECK_FALSE(state.find_structure().has_value());
}

TEST_CASE("two leaf machines of a marked tree connect into a pseudo-path") {
  // marked path machine0 - job0 - machine1 - job1 - machine2; the end
  // machines hold their only live marked edge, machine1 is inner
  EdgeGraph g = make_graph(3, {1.0, 1.5},
                           {{0, 0, 0.4, true},
                            {1, 0, 0.6, true},
                            {1, 1, 0.5, true},
                            {2, 1, 0.5, true}});
  ClassRounder state(g, 0);
  auto s = state.find_structure();
  REQUIRE(s.has_value());
  CHECK(s->kind == StructureFound::Kind::pseudo_path);
  CHECK(s->edges == std::vector<int>{0, 1, 2, 3});
  CHECK(s->machines == std::vector<int>{0, 1, 2});
  std::vector<double> a = state.build_direction(*s);
  // balance at both jobs, and size-weighted balance at the inner machine
  CHECK(a[0] + a[1] == doctest::Approx(0.0));
  CHECK(a[2] + a[3] == doctest::Approx(0.0));
  CHECK(a[1] * 1.0 + a[2] * 1.5 == doctest::Approx(0.0));
  // the end machines have a single live marked edge, so no balance is owed
  CHECK(state.marked_degree(0) == 1);
  CHECK(state.marked_degree(2) == 1);
  CHECK(state.marked_degree(1) == 2);
}

TEST_CASE("unmarked attachments are preferred over leaf-machine ends") {
  // same tree, plus an unmarked edge at job 0: the structure should use the
  // unmarked edge as its first end
  EdgeGraph g = make_graph(4, {1.0, 1.5},
                           {{0, 0, 0.3, true},
                            {1, 0, 0.5, true},
                            {1, 1, 0.5, true},
                            {2, 1, 0.5, true},
                            {3, 0, 0.2, false}});
  ClassRounder state(g, 0);
  auto s = state.find_structure();
  REQUIRE(s.has_value());
  CHECK(s->kind == StructureFound::Kind::pseudo_path);
  CHECK(s->edges.front() == 4);
  CHECK(s->machines.front() == 3);
}

TEST_CASE("direction alternates +-1 around an equal-size cycle") {
  EdgeGraph g = four_cycle();
  ClassRounder state(g, 0);
  auto s = state.find_structure();
  REQUIRE(s.has_value());
  std::vector<double> a = state.build_direction(*s);
  REQUIRE(a.size() == 4);
  for (std::size_t t = 0; t < 4; ++t) CHECK(a[t] == doctest::Approx(t % 2 == 0 ? 1.0 : -1.0));
}

TEST_CASE("direction scales by sizes at inner machines of a pseudo-path") {
  EdgeGraph g = make_graph(3, {1.0, 2.0},
                           {{0, 0, 0.5, false},
                            {1, 0, 0.5, true},
                            {1, 1, 0.25, true},
                            {2, 1, 0.75, false}});
  StructureFound s;
  s.kind = StructureFound::Kind::pseudo_path;
  s.edges = {0, 1, 2, 3};
  s.machines = {0, 1, 2};
  s.jobs = {0, 1};
  ClassRounder state(g, 0);
  std::vector<double> a = state.build_direction(s);
  CHECK(a[0] == doctest::Approx(1.0));
  CHECK(a[1] == doctest::Approx(-1.0));
  CHECK(a[2] == doctest::Approx(0.5));
  CHECK(a[3] == doctest::Approx(-0.5));
}

TEST_CASE("a two-edge structure balances the job only") {
  EdgeGraph g = make_graph(2, {1.0}, {{0, 0, 0.5, false}, {1, 0, 0.5, false}});
  ClassRounder state(g, 0);
  auto s = state.find_structure();
  std::vector<double> a = state.build_direction(*s);
  CHECK(a[0] == doctest::Approx(1.0));
  CHECK(a[1] == doctest::Approx(-1.0));
}

TEST_CASE("symmetric step picks each endpoint half the time") {
  int ones = 0;
  const int n = 4000;
  for (int t = 0; t < n; ++t) {
    EdgeGraph g = make_graph(2, {1.0}, {{0, 0, 0.5, false}, {1, 0, 0.5, false}});
    ClassRounder state(g, 0);
    auto s = state.find_structure();
    std::vector<double> a = state.build_direction(*s);
    RngStream rng(derive_seed(10, seed_tag::trial, t));
    IterationTrace tr = state.step(*s, a, rng);
    CHECK(tr.theta_plus == doctest::Approx(0.5));
    CHECK(tr.theta_minus == doctest::Approx(0.5));
    double x0 = state.xbar(0), x1 = state.xbar(1);
    CHECK(((x0 == 1.0 && x1 == 0.0) || (x0 == 0.0 && x1 == 1.0)));
    if (x0 == 1.0) ++ones;
  }
  double mean = static_cast<double>(ones) / n;
  CHECK(std::fabs(mean - 0.5) <= 4.0 * std::sqrt(0.25 / n));
}

TEST_CASE("asymmetric step keeps the marginal") {
  double sum0 = 0.0;
  const int n = 5000;
  for (int t = 0; t < n; ++t) {
    EdgeGraph g = make_graph(2, {1.0}, {{0, 0, 0.9, false}, {1, 0, 0.1, false}});
    ClassRounder state(g, 0);
    auto s = state.find_structure();
    std::vector<double> a = state.build_direction(*s);
    RngStream rng(derive_seed(11, seed_tag::trial, t));
    IterationTrace tr = state.step(*s, a, rng);
    CHECK(tr.theta_plus == doctest::Approx(0.1));
    CHECK(tr.theta_minus == doctest::Approx(0.9));
    CHECK(state.live_count() < 2);
    sum0 += state.xbar(0);
  }
  double mean = sum0 / n;
  CHECK(std::fabs(mean - 0.9) <= 4.0 * std::sqrt(0.9 * 0.1 / n));
}

TEST_CASE("a one-signed direction is rejected") {
  EdgeGraph g = make_graph(2, {1.0}, {{0, 0, 0.5, false}, {1, 0, 0.5, false}});
  ClassRounder state(g, 0);
  auto s = state.find_structure();
  RngStream rng(1);
  CHECK_THROWS_AS(state.step(*s, {1.0, 1.0}, rng), std::logic_error);
}

TEST_CASE("rounding an integral class does nothing") {
  EdgeGraph g = make_graph(2, {1.0, 1.0}, {{0, 0, 1.0, true}, {1, 1, 1.0, true}});
  RngStream rng(5);
  ClassRoundOutcome out = round_class(g, 0, rng);
  CHECK(out.iterations == 0);
  CHECK(out.chosen_edges == std::vector<int>{0, 1});
}

TEST_CASE("the four-cycle rounds to each perfect matching half the time") {
  int first = 0;
  const int n = 4000;
  for (int t = 0; t < n; ++t) {
    EdgeGraph g = four_cycle();
    RngStream rng(derive_seed(12, seed_tag::trial, t));
    ClassRoundOutcome out = round_class(g, 0, rng);
    CHECK(out.iterations <= 4);
    std::set<int> chosen(out.chosen_edges.begin(), out.chosen_edges.end());
    bool matching_a = chosen == std::set<int>{0, 3};  // jobs on machines 0 and 1
    bool matching_b = chosen == std::set<int>{1, 2};
    CHECK((matching_a || matching_b));
    if (matching_a) ++first;
  }
  double mean = static_cast<double>(first) / n;
  CHECK(std::fabs(mean - 0.5) <= 4.0 * std::sqrt(0.25 / n));
}

TEST_CASE("round_all equals per-class rounding with its derived stream") {
  Instance inst = gen_instance({3, 9, 0.8, 1, 64, 1, 10}, 350);
  Instance post = swap_sizes_and_weights(inst);
  ConfigLPSolution sol = wct::test::random_feasible_solution(post, 17, 3);
  EdgeGraph g = build_graph(sol.z, post,
                            make_classes(machine_independent_sizes(post), 1.21, 2.0));
  REQUIRE(g.classes.size() >= 2);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::vector<int> combined = round_all(g, seed);
    for (int cls : g.classes) {
      RngStream rng(derive_seed(seed, seed_tag::round_class,
                                static_cast<std::uint64_t>(static_cast<std::int64_t>(cls))));
      ClassRoundOutcome out = round_class(g, cls, rng);
      for (auto [job, machine] : out.job_machine) CHECK(combined[job] == machine);
    }
  }
}

TEST_CASE("rounding keeps the structural invariants on random fractional inputs") {
  for (int t = 0; t < 60; ++t) {
    Instance inst = gen_instance({2 + t % 3, 4 + t % 6, 0.8, 1, 64, 1, 10}, 1234 + t);
    Instance post = swap_sizes_and_weights(inst);
    ConfigLPSolution sol = wct::test::random_feasible_solution(post, 3 * t + 5, 2 + t % 3);
    RngStream beta_rng(derive_seed(t, seed_tag::beta));
    EdgeGraph g = build_graph(
        sol.z, post,
        make_classes(machine_independent_sizes(post), sample_beta(beta_rng, 2.0), 2.0));
    RoundOptions opts;
    opts.check_invariants = true;
    std::vector<IterationTrace> trace;
    opts.trace = &trace;
    std::vector<int> chosen = round_all_chosen(g, 900 + t, opts);
    // every job exactly once
    std::vector<int> per_job(post.jobs, 0);
    for (int id : chosen) ++per_job[g.edges[id].job];
    for (int j = 0; j < post.jobs; ++j) CHECK(per_job[j] == 1);
    // at most one marked edge per (machine, class)
    std::map<std::pair<int, int>, int> marked_count;
    for (int id : chosen)
      if (g.edges[id].marked) ++marked_count[{g.edges[id].machine, g.edges[id].cls}];
    for (const auto& [key, count] : marked_count) CHECK(count <= 1);
    // per-class iteration budget
    std::map<int, int> iters, edges;
    for (const IterationTrace& tr : trace) ++iters[tr.cls];
    for (const GraphEdge& e : g.edges) ++edges[e.cls];
    for (const auto& [cls, n] : iters) CHECK(n <= edges[cls]);
  }
}

TEST_CASE("rounding is reproducible for a fixed seed") {
  Instance inst = gen_instance({3, 7, 0.9, 1, 64, 1, 10}, 77);
  Instance post = swap_sizes_and_weights(inst);
  ConfigLPSolution sol = wct::test::random_feasible_solution(post, 8, 3);
  EdgeGraph g =
      build_graph(sol.z, post, make_classes(machine_independent_sizes(post), 1.4, 2.0));
  CHECK(round_all(g, 3141) == round_all(g, 3141));
}

TEST_CASE("direction vectors balance jobs and marked machine volumes") {
  // walk real rounding states: on every structure, the direction must cancel
  // at each job, and cancel size-weighted over the marked edges of every
  // machine that still has two or more of them
  for (int t = 0; t < 30; ++t) {
    Instance inst = gen_instance({2 + t % 3, 4 + t % 7, 0.85, 1, 64, 1, 10}, 77000 + t);
    Instance post = swap_sizes_and_weights(inst);
    ConfigLPSolution sol = wct::test::random_feasible_solution(post, 78000 + t, 3);
    RngStream beta_rng(derive_seed(t, seed_tag::beta));
    EdgeGraph g = build_graph(
        sol.z, post, make_classes(machine_independent_sizes(post), sample_beta(beta_rng, 2.0), 2.0));
    RngStream rng(derive_seed(t, seed_tag::trial));
    for (int cls : g.classes) {
      ClassRounder state(g, cls);
      int guard = 0;
      while (auto s = state.find_structure()) {
        REQUIRE(++guard <= state.edge_count());
        std::vector<double> a = state.build_direction(*s);
        std::map<int, double> job_sum;
        std::map<int, double> machine_marked_sum;
        for (std::size_t q = 0; q < s->edges.size(); ++q) {
          const GraphEdge& e = g.edges[s->edges[q]];
          job_sum[e.job] += a[q];
          if (e.marked) machine_marked_sum[e.machine] += a[q] * e.size;
        }
        for (const auto& [job, sum] : job_sum) CHECK(std::fabs(sum) <= 1e-12);
        for (const auto& [machine, sum] : machine_marked_sum)
          if (state.marked_degree(machine) >= 2) CHECK(std::fabs(sum) <= 1e-9);
        state.step(*s, a, rng);
      }
    }
  }
}

TEST_CASE("iteration traces replay identically for a fixed seed") {
  Instance inst = gen_instance({3, 8, 0.85, 1, 64, 1, 10}, 6007);
  Instance post = swap_sizes_and_weights(inst);
  ConfigLPSolution sol = wct::test::random_feasible_solution(post, 19, 3);
  EdgeGraph g =
      build_graph(sol.z, post, make_classes(machine_independent_sizes(post), 1.33, 2.0));
  std::vector<IterationTrace> first, second;
  RoundOptions opts;
  opts.trace = &first;
  round_all_chosen(g, 2718, opts);
  opts.trace = &second;
  round_all_chosen(g, 2718, opts);
  REQUIRE(first.size() == second.size());
  REQUIRE(!first.empty());
  for (std::size_t t = 0; t < first.size(); ++t) {
    CHECK(first[t].cls == second[t].cls);
    CHECK(first[t].kind == second[t].kind);
    CHECK(first[t].edges == second[t].edges);
    CHECK(first[t].theta_plus == second[t].theta_plus);
    CHECK(first[t].theta_minus == second[t].theta_minus);
    CHECK(first[t].moved_plus == second[t].moved_plus);
  }
}

TEST_CASE("per-edge marginals match the fractional values") {
  Instance inst = gen_instance({2, 5, 1.0, 1, 64, 1, 10}, 4242);
  Instance post = swap_sizes_and_weights(inst);
  ConfigLPSolution sol = wct::test::random_feasible_solution(post, 9, 3);
  EdgeGraph g =
      build_graph(sol.z, post, make_classes(machine_independent_sizes(post), 1.17, 2.0));
  const int n = 3000;
  std::vector<double> mean(g.edges.size(), 0.0);
  for (int t = 0; t < n; ++t)
    for (int id : round_all_chosen(g, derive_seed(55, seed_tag::trial, t))) mean[id] += 1.0;
  for (const GraphEdge& e : g.edges) {
    double m = mean[e.id] / n;
    double sigma = std::sqrt(std::max(e.x * (1 - e.x), 1e-12) / n);
    CHECK(std::fabs(m - e.x) <= 4.0 * sigma + 1e-9);
  }
}
