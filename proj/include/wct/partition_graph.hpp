#pragma once

#include <vector>

#include <json.hpp>

#include "wct/instance.hpp"
#include "wct/rng.hpp"

namespace wct {

// Random size-class shift: ln(beta) uniform in [0, ln rho), so beta = rho^u
// for u uniform in [0, 1).
double beta_from_uniform(double u, double rho);
double sample_beta(RngStream& rng, double rho);

// The class k with beta * rho^k <= size < beta * rho^(k+1). When size/beta
// lands within 1e-12 of a power of rho, the value is snapped onto that
// boundary, i.e. assigned the class whose lower endpoint it is.
int classify(double size, double beta, double rho);

struct ShiftedClasses {
  double rho = 2.0;
  double beta = 1.0;
  std::vector<int> class_of_job;
};

ShiftedClasses make_classes(const std::vector<double>& job_sizes, double beta, double rho);

// One edge of the bipartite multigraph between machines and jobs. Edges are
// stored in creation order (id == index): classes ascending, machines
// ascending, and within one (machine, class) group by descending Smith ratio
// with ties by job index. A split pair has the marked half first.
struct GraphEdge {
  int id = 0;
  int machine = 0;
  int job = 0;
  double x = 0.0;
  bool marked = false;
  int cls = 0;
  double smith_ratio = 0.0;  // weight / size on this edge's machine
  double size = 0.0;         // job size
};

struct EdgeGraph {
  double rho = 2.0;
  double beta = 1.0;
  int machines = 0;
  int jobs = 0;
  std::vector<GraphEdge> edges;
  std::vector<double> job_size;
  std::vector<int> class_of_job;
  std::vector<int> classes;  // distinct classes present, ascending
  std::vector<std::vector<int>> edges_of_job;

  double threshold(int cls) const;      // beta * rho^cls
  double class_volume(int machine, int cls) const;
  double marked_volume(int machine, int cls) const;
};

// Builds the graph from a fractional assignment z (rows machines, columns
// jobs; every job's column must sum to 1). Per (machine, class) group the
// highest-Smith-ratio prefix of volume beta * rho^k is marked, splitting one
// edge into a marked/unmarked parallel pair if the boundary falls inside it;
// groups of volume at most beta * rho^k are fully marked. Edges whose x value
// would fall below 1e-12 are dropped.
EdgeGraph build_graph(const std::vector<std::vector<double>>& z, const Instance& post_swap,
                      const ShiftedClasses& classes);

nlohmann::ordered_json graph_to_json(const EdgeGraph& g);

}  // namespace wct
