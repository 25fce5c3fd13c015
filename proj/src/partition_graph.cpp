#include "wct/partition_graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace wct {

namespace {
constexpr double kDropTol = 1e-12;
}

double beta_from_uniform(double u, double rho) {
  if (!(rho > 1.0)) throw std::invalid_argument("rho must exceed 1");
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("u must be in [0, 1)");
  return std::pow(rho, u);
}

double sample_beta(RngStream& rng, double rho) { return beta_from_uniform(rng.uniform01(), rho); }

int classify(double size, double beta, double rho) {
  if (!(size > 0.0)) throw std::invalid_argument("job size must be positive");
  if (!(rho > 1.0) || !(beta >= 1.0) || !(beta < rho))
    throw std::invalid_argument("need rho > 1 and beta in [1, rho)");
  double ratio = size / beta;
  double exact = std::log(ratio) / std::log(rho);
  auto snap = static_cast<long long>(std::llround(exact));
  double boundary = std::pow(rho, static_cast<double>(snap));
  if (std::fabs(ratio - boundary) <= 1e-12 * std::max(1.0, boundary))
    return static_cast<int>(snap);
  int k = static_cast<int>(std::floor(exact));
  while (size < beta * std::pow(rho, k)) --k;
  while (size >= beta * std::pow(rho, k + 1)) ++k;
  return k;
}

ShiftedClasses make_classes(const std::vector<double>& job_sizes, double beta, double rho) {
  ShiftedClasses out;
  out.rho = rho;
  out.beta = beta;
  out.class_of_job.reserve(job_sizes.size());
  for (double p : job_sizes) out.class_of_job.push_back(classify(p, beta, rho));
  return out;
}

double EdgeGraph::threshold(int cls) const { return beta * std::pow(rho, cls); }

double EdgeGraph::class_volume(int machine, int cls) const {
  double v = 0.0;
  for (const GraphEdge& e : edges)
    if (e.machine == machine && e.cls == cls) v += e.x * e.size;
  return v;
}

double EdgeGraph::marked_volume(int machine, int cls) const {
  double v = 0.0;
  for (const GraphEdge& e : edges)
    if (e.machine == machine && e.cls == cls && e.marked) v += e.x * e.size;
  return v;
}

EdgeGraph build_graph(const std::vector<std::vector<double>>& z, const Instance& post_swap,
                      const ShiftedClasses& classes) {
  if (static_cast<int>(z.size()) != post_swap.machines)
    throw std::invalid_argument("z must have one row per machine");
  EdgeGraph g;
  g.rho = classes.rho;
  g.beta = classes.beta;
  g.machines = post_swap.machines;
  g.jobs = post_swap.jobs;
  g.job_size = machine_independent_sizes(post_swap);
  g.class_of_job = classes.class_of_job;
  for (int j = 0; j < g.jobs; ++j) {
    double covered = 0.0;
    for (int i = 0; i < g.machines; ++i) covered += z[i][j];
    if (std::fabs(covered - 1.0) > 1e-7)
      throw std::invalid_argument("fractional assignment of job " + std::to_string(j) +
                                  " does not sum to 1");
  }

  std::set<int> class_set(g.class_of_job.begin(), g.class_of_job.end());
  g.classes.assign(class_set.begin(), class_set.end());

  auto add_edge = [&g](int machine, int job, double x, bool marked, int cls, double sigma) {
    g.edges.push_back({static_cast<int>(g.edges.size()), machine, job, x, marked, cls, sigma,
                       g.job_size[job]});
  };

  for (int cls : g.classes) {
    double cap = g.beta * std::pow(g.rho, cls);
    for (int i = 0; i < g.machines; ++i) {
      std::vector<int> group;
      for (int j = 0; j < g.jobs; ++j)
        if (g.class_of_job[j] == cls && post_swap.eligible(i, j) && z[i][j] > kDropTol)
          group.push_back(j);
      // descending Smith ratio, exact comparison, ties by job index
      std::stable_sort(group.begin(), group.end(), [&](int a, int b) {
        return *post_swap.weight[i][a] * *post_swap.proc[i][b] >
               *post_swap.weight[i][b] * *post_swap.proc[i][a];
      });
      double v = 0.0;
      for (int j : group) {
        double pj = g.job_size[j];
        double zij = z[i][j];
        double vol = pj * zij;
        double sigma = post_swap.weight[i][j]->value() / pj;
        if (v + vol <= cap) {
          add_edge(i, j, zij, true, cls, sigma);
        } else if (v >= cap) {
          add_edge(i, j, zij, false, cls, sigma);
        } else {
          double x_marked = (cap - v) / pj;
          double x_unmarked = zij - x_marked;
          if (x_marked < kDropTol) {
            add_edge(i, j, zij, false, cls, sigma);
          } else if (x_unmarked < kDropTol) {
            add_edge(i, j, zij, true, cls, sigma);
          } else {
            add_edge(i, j, x_marked, true, cls, sigma);
            add_edge(i, j, x_unmarked, false, cls, sigma);
          }
        }
        v += vol;
      }
    }
  }

  g.edges_of_job.assign(g.jobs, {});
  for (const GraphEdge& e : g.edges) g.edges_of_job[e.job].push_back(e.id);
  return g;
}

nlohmann::ordered_json graph_to_json(const EdgeGraph& g) {
  nlohmann::ordered_json j;
  j["rho"] = g.rho;
  j["beta"] = g.beta;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const GraphEdge& e : g.edges)
    edges.push_back({{"id", e.id},
                     {"machine", e.machine},
                     {"job", e.job},
                     {"x", e.x},
                     {"marked", e.marked},
                     {"class", e.cls}});
  j["edges"] = std::move(edges);
  return j;
}

}  // namespace wct
