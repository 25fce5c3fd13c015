#pragma once

#include <optional>
#include <vector>

#include "wct/partition_graph.hpp"
#include "wct/rng.hpp"

namespace wct {

// A structure the rounding steps along: either a simple cycle of live marked
// edges, or a pseudo-marked-path, i.e. a simple all-marked inner path between
// two jobs where each end edge is either unmarked or the last live marked edge
// of its machine. Edges are listed in path order; machines holds i_0..i_t (for
// a cycle the first and last entries coincide) and jobs holds j_1..j_t.
struct StructureFound {
  enum class Kind { cycle, pseudo_path };
  Kind kind = Kind::cycle;
  std::vector<int> edges;  // graph edge ids
  std::vector<int> machines;
  std::vector<int> jobs;
};

struct IterationTrace {
  int cls = 0;
  StructureFound::Kind kind = StructureFound::Kind::cycle;
  std::vector<int> edges;
  double theta_plus = 0.0;
  double theta_minus = 0.0;
  bool moved_plus = false;
};

struct RoundOptions {
  bool check_invariants = false;  // per-iteration conservation checks, throws on violation
  double integrality_tol = 1e-6;
  std::vector<IterationTrace>* trace = nullptr;
};

// Live rounding state for one job class. Exposed so the individual operations
// can be driven and inspected directly; round_class is the plain loop over
// them.
class ClassRounder {
 public:
  ClassRounder(const EdgeGraph& graph, int cls);

  int cls() const { return cls_; }
  int edge_count() const { return static_cast<int>(local_of_edge_.size()); }
  int live_count() const { return live_count_; }
  const std::vector<int>& class_jobs() const { return jobs_; }

  double xbar(int edge_id) const;
  bool live(int edge_id) const;

  // Marked cycle if one exists, else a pseudo-marked-path, else nothing.
  // Deterministic: candidates are scanned in edge-id order, cycles first.
  std::optional<StructureFound> find_structure() const;

  // Direction vector over the structure's edges (aligned with
  // structure.edges): +1 on the first edge, opposite values across each job,
  // size-weighted balance across inner machines.
  std::vector<double> build_direction(const StructureFound& s) const;

  // One randomized step x += theta*a or x -= theta'*a; binding coordinates are
  // zeroed exactly and removed. Returns the trace of the iteration.
  IterationTrace step(const StructureFound& s, const std::vector<double>& a, RngStream& rng,
                      const RoundOptions& opts = {});

  // Requires every live value to be within tol of 1; returns the chosen edge
  // per class job, exactly one each, with at most one marked edge chosen per
  // machine.
  std::vector<int> extract_integral(const RoundOptions& opts) const;

  double job_cover_sum(int job) const;
  double marked_volume(int machine) const;
  int marked_degree(int machine) const { return mk_count_[machine]; }

 private:
  void remove_edge(int local);
  void check_job_cover(const char* when) const;

  const EdgeGraph* g_;
  int cls_;
  std::vector<int> edge_ids_;       // local -> graph edge id
  std::vector<int> local_of_edge_;  // graph edge id -> local (-1 elsewhere)
  std::vector<double> x_;
  std::vector<char> live_;
  int live_count_ = 0;
  std::vector<int> jobs_;  // jobs of this class, ascending
  std::vector<std::vector<int>> job_adj_;      // per job: local edges
  std::vector<std::vector<int>> machine_adj_;  // per machine: local edges
  std::vector<int> mk_count_;                  // live marked degree per machine
};

struct ClassRoundOutcome {
  std::vector<std::pair<int, int>> job_machine;
  std::vector<int> chosen_edges;
  int iterations = 0;
};

ClassRoundOutcome round_class(const EdgeGraph& graph, int cls, RngStream& rng,
                              const RoundOptions& opts = {});

// Rounds every class with an independent stream derived from (seed, class) and
// assembles the full assignment.
std::vector<int> round_all(const EdgeGraph& graph, std::uint64_t seed,
                           const RoundOptions& opts = {});

// Same, but reports the selected edges (one per job) instead of machines.
std::vector<int> round_all_chosen(const EdgeGraph& graph, std::uint64_t seed,
                                  const RoundOptions& opts = {});

}  // namespace wct
