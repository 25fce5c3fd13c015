#include "wct/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wct {

namespace {
constexpr double kZeroTol = 1e-12;
constexpr double kConserveTol = 1e-9;
}  // namespace

ClassRounder::ClassRounder(const EdgeGraph& graph, int cls) : g_(&graph), cls_(cls) {
  local_of_edge_.assign(graph.edges.size(), -1);
  job_adj_.assign(graph.jobs, {});
  machine_adj_.assign(graph.machines, {});
  mk_count_.assign(graph.machines, 0);
  for (const GraphEdge& e : graph.edges) {
    if (e.cls != cls) continue;
    int local = static_cast<int>(edge_ids_.size());
    local_of_edge_[e.id] = local;
    edge_ids_.push_back(e.id);
    x_.push_back(e.x);
    live_.push_back(1);
    job_adj_[e.job].push_back(local);
    machine_adj_[e.machine].push_back(local);
    if (e.marked) ++mk_count_[e.machine];
  }
  live_count_ = static_cast<int>(edge_ids_.size());
  for (int j = 0; j < graph.jobs; ++j)
    if (!job_adj_[j].empty()) jobs_.push_back(j);
}

double ClassRounder::xbar(int edge_id) const {
  int local = local_of_edge_.at(edge_id);
  if (local < 0) throw std::out_of_range("edge not in this class");
  return x_[local];
}

bool ClassRounder::live(int edge_id) const {
  int local = local_of_edge_.at(edge_id);
  if (local < 0) throw std::out_of_range("edge not in this class");
  return live_[local] != 0;
}

double ClassRounder::job_cover_sum(int job) const {
  double s = 0.0;
  for (int local : job_adj_[job])
    if (live_[local]) s += x_[local];
  return s;
}

double ClassRounder::marked_volume(int machine) const {
  double s = 0.0;
  for (int local : machine_adj_[machine])
    if (live_[local] && g_->edges[edge_ids_[local]].marked)
      s += x_[local] * g_->edges[edge_ids_[local]].size;
  return s;
}

void ClassRounder::remove_edge(int local) {
  live_[local] = 0;
  --live_count_;
  const GraphEdge& e = g_->edges[edge_ids_[local]];
  if (e.marked) --mk_count_[e.machine];
}

namespace {

// vertex encoding for traversals: machines first, then jobs
struct VertexCoder {
  int machines;
  int encode_machine(int i) const { return i; }
  int encode_job(int j) const { return machines + j; }
  bool is_machine(int v) const { return v < machines; }
  int machine(int v) const { return v; }
  int job(int v) const { return v - machines; }
};

}  // namespace

std::optional<StructureFound> ClassRounder::find_structure() const {
  const EdgeGraph& g = *g_;
  VertexCoder vc{g.machines};
  int nverts = g.machines + g.jobs;

  // adjacency over live marked edges only
  std::vector<std::vector<std::pair<int, int>>> adj(nverts);  // (local edge, other vertex)
  for (int local = 0; local < static_cast<int>(edge_ids_.size()); ++local) {
    if (!live_[local]) continue;
    const GraphEdge& e = g.edges[edge_ids_[local]];
    if (!e.marked) continue;
    adj[vc.encode_machine(e.machine)].emplace_back(local, vc.encode_job(e.job));
    adj[vc.encode_job(e.job)].emplace_back(local, vc.encode_machine(e.machine));
  }

  auto to_structure_cycle = [&](const std::vector<int>& verts,
                                const std::vector<int>& locals) -> StructureFound {
    // verts is the cyclic vertex sequence, locals[s] joins verts[s] and
    // verts[(s+1) % size]; rotate so the sequence starts at a machine
    StructureFound s;
    s.kind = StructureFound::Kind::cycle;
    int sz = static_cast<int>(verts.size());
    int start = vc.is_machine(verts[0]) ? 0 : 1;
    for (int t = 0; t < sz; ++t) {
      int v = verts[(start + t) % sz];
      if (vc.is_machine(v))
        s.machines.push_back(vc.machine(v));
      else
        s.jobs.push_back(vc.job(v));
      s.edges.push_back(edge_ids_[locals[(start + t) % sz]]);
    }
    s.machines.push_back(s.machines.front());
    return s;
  };

  // ---- marked cycle by DFS; adjacency is in edge-id order, roots ascending
  {
    std::vector<int> state(nverts, 0);  // 0 fresh, 1 on stack, 2 done
    std::vector<int> parent_vertex(nverts, -1), parent_edge(nverts, -1), cursor(nverts, 0);
    for (int root = 0; root < nverts; ++root) {
      if (state[root] != 0 || adj[root].empty()) continue;
      std::vector<int> stack{root};
      state[root] = 1;
      while (!stack.empty()) {
        int u = stack.back();
        if (cursor[u] == static_cast<int>(adj[u].size())) {
          state[u] = 2;
          stack.pop_back();
          continue;
        }
        auto [local, v] = adj[u][cursor[u]++];
        if (local == parent_edge[u]) continue;
        if (state[v] == 0) {
          parent_vertex[v] = u;
          parent_edge[v] = local;
          state[v] = 1;
          stack.push_back(v);
        } else if (state[v] == 1) {
          // back edge closes a cycle u, p(u), ..., v, (closing edge) u;
          // locals[s] joins verts[s] and verts[(s+1) % size]
          std::vector<int> verts, locals;
          int cur = u;
          while (cur != v) {
            verts.push_back(cur);
            locals.push_back(parent_edge[cur]);
            cur = parent_vertex[cur];
          }
          verts.push_back(v);
          locals.push_back(local);  // closing edge back to u
          return to_structure_cycle(verts, locals);
        }
      }
    }
  }

  // ---- no marked cycle: the live marked subgraph is a forest. Scan each
  // component for two end attachments: an incident live unmarked edge at a
  // component job, or a leaf machine whose single live marked edge serves as
  // the end edge. Unmarked attachments are preferred, then everything is in
  // edge-id order.
  struct Terminal {
    int edge_local;
    int entry_job;
    int outside_machine;
    bool leaf_machine;
  };

  std::vector<int> comp(nverts, -1);
  std::vector<int> queue;
  for (int j0 = 0; j0 < g.jobs; ++j0) {
    int jroot = vc.encode_job(j0);
    if (comp[jroot] != -1 || job_adj_[j0].empty()) continue;
    bool any_live = false;
    for (int local : job_adj_[j0])
      if (live_[local]) any_live = true;
    if (!any_live) continue;

    queue.assign(1, jroot);
    comp[jroot] = j0;
    std::vector<int> comp_jobs{j0}, comp_machines;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int u = queue[qi];
      for (auto [local, v] : adj[u]) {
        (void)local;
        if (comp[v] != -1) continue;
        comp[v] = j0;
        queue.push_back(v);
        if (vc.is_machine(v))
          comp_machines.push_back(vc.machine(v));
        else
          comp_jobs.push_back(vc.job(v));
      }
    }
    std::sort(comp_jobs.begin(), comp_jobs.end());
    std::sort(comp_machines.begin(), comp_machines.end());

    std::vector<Terminal> terminals;
    for (int j : comp_jobs)
      for (int local : job_adj_[j]) {
        if (!live_[local]) continue;
        const GraphEdge& e = g.edges[edge_ids_[local]];
        if (e.marked) continue;
        terminals.push_back({local, j, e.machine, false});
      }
    std::sort(terminals.begin(), terminals.end(),
              [](const Terminal& a, const Terminal& b) { return a.edge_local < b.edge_local; });
    std::vector<Terminal> leafs;
    for (int i : comp_machines) {
      if (mk_count_[i] != 1) continue;
      for (int local : machine_adj_[i]) {
        if (!live_[local]) continue;
        const GraphEdge& e = g.edges[edge_ids_[local]];
        if (!e.marked) continue;
        leafs.push_back({local, e.job, i, true});
        break;
      }
    }
    std::sort(leafs.begin(), leafs.end(),
              [](const Terminal& a, const Terminal& b) { return a.edge_local < b.edge_local; });
    terminals.insert(terminals.end(), leafs.begin(), leafs.end());
    if (terminals.size() < 2) continue;

    const Terminal& t1 = terminals[0];
    const Terminal& t2 = terminals[1];

    // unique tree path between the two entry jobs over live marked edges
    std::vector<int> pv(nverts, -2), pe(nverts, -1);
    int src = vc.encode_job(t1.entry_job), dst = vc.encode_job(t2.entry_job);
    queue.assign(1, src);
    pv[src] = -1;
    for (std::size_t qi = 0; qi < queue.size() && pv[dst] == -2; ++qi) {
      int u = queue[qi];
      for (auto [local, v] : adj[u]) {
        // the terminal tree edges may not be reused by the inner path
        if (t1.leaf_machine && local == t1.edge_local) continue;
        if (t2.leaf_machine && local == t2.edge_local) continue;
        if (pv[v] != -2) continue;
        pv[v] = u;
        pe[v] = local;
        queue.push_back(v);
      }
    }
    if (pv[dst] == -2) throw std::logic_error("disconnected component during path search");

    std::vector<int> verts, locals;
    for (int cur = dst; cur != src; cur = pv[cur]) {
      verts.push_back(cur);
      locals.push_back(pe[cur]);
    }
    verts.push_back(src);
    std::reverse(verts.begin(), verts.end());
    std::reverse(locals.begin(), locals.end());

    StructureFound s;
    s.kind = StructureFound::Kind::pseudo_path;
    s.machines.push_back(t1.outside_machine);
    s.edges.push_back(edge_ids_[t1.edge_local]);
    for (std::size_t t = 0; t < verts.size(); ++t) {
      int v = verts[t];
      if (vc.is_machine(v))
        s.machines.push_back(vc.machine(v));
      else
        s.jobs.push_back(vc.job(v));
      if (t < locals.size()) s.edges.push_back(edge_ids_[locals[t]]);
    }
    s.edges.push_back(edge_ids_[t2.edge_local]);
    s.machines.push_back(t2.outside_machine);
    return s;
  }

  return std::nullopt;
}

std::vector<double> ClassRounder::build_direction(const StructureFound& s) const {
  if (s.edges.size() < 2) throw std::logic_error("structure must have at least two edges");
  std::vector<double> a(s.edges.size(), 0.0);
  a[0] = 1.0;
  for (std::size_t t = 1; t < s.edges.size(); ++t) {
    const GraphEdge& prev = g_->edges[s.edges[t - 1]];
    const GraphEdge& cur = g_->edges[s.edges[t]];
    if (t % 2 == 1) {
      a[t] = -a[t - 1];  // balance at job j_{(t+1)/2}
    } else {
      a[t] = -a[t - 1] * prev.size / cur.size;  // size-weighted balance at the machine
    }
  }
  if (s.kind == StructureFound::Kind::cycle) {
    // closing balance at machine i_0 holds by telescoping; guard against it
    const GraphEdge& last = g_->edges[s.edges.back()];
    const GraphEdge& first = g_->edges[s.edges.front()];
    double residual = a.back() * last.size + a.front() * first.size;
    if (std::fabs(residual) > 1e-9 * std::max(1.0, std::fabs(a.back() * last.size)))
      throw std::logic_error("inconsistent cycle direction vector");
  }
  return a;
}

IterationTrace ClassRounder::step(const StructureFound& s, const std::vector<double>& a,
                                  RngStream& rng, const RoundOptions& opts) {
  if (a.size() != s.edges.size()) throw std::invalid_argument("direction/structure mismatch");

  std::vector<int> locals(s.edges.size());
  for (std::size_t t = 0; t < s.edges.size(); ++t) {
    locals[t] = local_of_edge_[s.edges[t]];
    if (locals[t] < 0 || !live_[locals[t]])
      throw std::invalid_argument("structure touches a dead edge");
  }

  double theta_plus = std::numeric_limits<double>::infinity();
  double theta_minus = std::numeric_limits<double>::infinity();
  std::vector<double> ratio(locals.size(), std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < locals.size(); ++t) {
    ratio[t] = x_[locals[t]] / std::fabs(a[t]);
    if (a[t] < 0.0) theta_plus = std::min(theta_plus, ratio[t]);
    if (a[t] > 0.0) theta_minus = std::min(theta_minus, ratio[t]);
  }
  if (!std::isfinite(theta_plus) || !std::isfinite(theta_minus))
    throw std::logic_error("direction vector must carry both signs");

  // machines whose marked volume the step must conserve
  std::vector<std::pair<int, double>> conserve;
  std::vector<std::pair<int, double>> cover;
  if (opts.check_invariants) {
    std::vector<int> ms = s.machines;
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    for (int i : ms)
      if (mk_count_[i] >= 2) conserve.emplace_back(i, marked_volume(i));
    std::vector<int> js = s.jobs;
    std::sort(js.begin(), js.end());
    js.erase(std::unique(js.begin(), js.end()), js.end());
    for (int j : js) cover.emplace_back(j, job_cover_sum(j));
  }

  bool moved_plus = rng.uniform01() < theta_minus / (theta_plus + theta_minus);
  double delta = moved_plus ? theta_plus : -theta_minus;
  for (std::size_t t = 0; t < locals.size(); ++t) x_[locals[t]] += delta * a[t];
  for (std::size_t t = 0; t < locals.size(); ++t) {
    // binding coordinates hit zero by construction; assign it exactly
    bool binding = moved_plus ? (a[t] < 0.0 && ratio[t] == theta_plus)
                              : (a[t] > 0.0 && ratio[t] == theta_minus);
    if (binding || std::fabs(x_[locals[t]]) < kZeroTol) {
      x_[locals[t]] = 0.0;
      remove_edge(locals[t]);
    }
  }

  if (opts.check_invariants) {
    for (auto [i, before] : conserve) {
      double after = marked_volume(i);
      if (std::fabs(after - before) > kConserveTol * std::max(1.0, std::fabs(before)))
        throw std::runtime_error("marked volume changed on machine " + std::to_string(i));
    }
    for (auto [j, before] : cover) {
      double after = job_cover_sum(j);
      if (std::fabs(after - before) > kConserveTol)
        throw std::runtime_error("job coverage changed for job " + std::to_string(j));
      if (std::fabs(after - 1.0) > kConserveTol)
        throw std::runtime_error("job coverage drifted from 1 for job " + std::to_string(j));
    }
  }

  IterationTrace tr;
  tr.cls = cls_;
  tr.kind = s.kind;
  tr.edges = s.edges;
  tr.theta_plus = theta_plus;
  tr.theta_minus = theta_minus;
  tr.moved_plus = moved_plus;
  return tr;
}

std::vector<int> ClassRounder::extract_integral(const RoundOptions& opts) const {
  std::vector<int> chosen;
  std::vector<int> per_job(g_->jobs, 0);
  std::vector<int> marked_per_machine(g_->machines, 0);
  for (int local = 0; local < static_cast<int>(edge_ids_.size()); ++local) {
    if (!live_[local]) continue;
    double v = x_[local];
    if (std::fabs(v - 1.0) > opts.integrality_tol)
      throw std::runtime_error("rounding finished with a fractional value " + std::to_string(v));
    const GraphEdge& e = g_->edges[edge_ids_[local]];
    chosen.push_back(e.id);
    ++per_job[e.job];
    if (e.marked) ++marked_per_machine[e.machine];
  }
  for (int j : jobs_)
    if (per_job[j] != 1)
      throw std::runtime_error("job " + std::to_string(j) + " selected " +
                               std::to_string(per_job[j]) + " times");
  for (int i = 0; i < g_->machines; ++i)
    if (marked_per_machine[i] > 1)
      throw std::runtime_error("machine " + std::to_string(i) +
                               " kept more than one marked edge");
  return chosen;
}

ClassRoundOutcome round_class(const EdgeGraph& graph, int cls, RngStream& rng,
                              const RoundOptions& opts) {
  ClassRounder state(graph, cls);
  ClassRoundOutcome out;
  int cap = state.edge_count();
  while (auto s = state.find_structure()) {
    if (++out.iterations > cap)
      throw std::runtime_error("rounding exceeded its iteration budget; invariant broken");
    std::vector<double> a = state.build_direction(*s);
    IterationTrace tr = state.step(*s, a, rng, opts);
    if (opts.trace) opts.trace->push_back(std::move(tr));
  }
  out.chosen_edges = state.extract_integral(opts);
  for (int id : out.chosen_edges)
    out.job_machine.emplace_back(graph.edges[id].job, graph.edges[id].machine);
  return out;
}

std::vector<int> round_all_chosen(const EdgeGraph& graph, std::uint64_t seed,
                                  const RoundOptions& opts) {
  std::vector<int> chosen;
  std::vector<char> covered(graph.jobs, 0);
  for (int cls : graph.classes) {
    RngStream rng(derive_seed(seed, seed_tag::round_class,
                              static_cast<std::uint64_t>(static_cast<std::int64_t>(cls))));
    ClassRoundOutcome outcome = round_class(graph, cls, rng, opts);
    for (int id : outcome.chosen_edges) {
      chosen.push_back(id);
      covered[graph.edges[id].job] = 1;
    }
  }
  for (int j = 0; j < graph.jobs; ++j)
    if (!covered[j]) throw std::runtime_error("job " + std::to_string(j) + " left unassigned");
  return chosen;
}

std::vector<int> round_all(const EdgeGraph& graph, std::uint64_t seed, const RoundOptions& opts) {
  std::vector<int> machine_of(graph.jobs, -1);
  for (int id : round_all_chosen(graph, seed, opts))
    machine_of[graph.edges[id].job] = graph.edges[id].machine;
  return machine_of;
}

}  // namespace wct
