#include "wct/cost_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "wct/parallel.hpp"

namespace wct {

namespace {

struct PrefixContext {
  std::vector<int> order;  // eligible jobs, descending Smith ratio, ties by index
  std::vector<double> sigma;
  std::vector<double> size;
  std::vector<double> zvol;        // z_ij p_j per ordered job
  std::vector<double> zp2_prefix;  // cumulative z_ij p_j^2
  std::vector<double> vol_prefix;  // cumulative z_ij p_j
};

PrefixContext make_prefix_context(const std::vector<std::vector<double>>& z,
                                  const Instance& post_swap, int machine) {
  PrefixContext ctx;
  ctx.order = smith_order(post_swap, machine);
  std::vector<double> sizes = machine_independent_sizes(post_swap);
  double zp2 = 0.0, vol = 0.0;
  for (int j : ctx.order) {
    double p = sizes[j];
    double zij = z[machine][j];
    ctx.sigma.push_back(post_swap.weight[machine][j]->value() / p);
    ctx.size.push_back(p);
    ctx.zvol.push_back(zij * p);
    zp2 += zij * p * p;
    vol += zij * p;
    ctx.zp2_prefix.push_back(zp2);
    ctx.vol_prefix.push_back(vol);
  }
  return ctx;
}

std::vector<double> bound_terms(const PrefixContext& ctx, double beta, double rho) {
  std::vector<double> terms;
  terms.reserve(ctx.order.size());
  std::map<int, double> class_vol;
  std::vector<int> cls(ctx.order.size());
  for (std::size_t t = 0; t < ctx.order.size(); ++t) cls[t] = classify(ctx.size[t], beta, rho);
  for (std::size_t t = 0; t < ctx.order.size(); ++t) {
    class_vol[cls[t]] += ctx.zvol[t];
    double saved = 0.0;
    for (const auto& [k, v] : class_vol) {
      double cap = beta * std::pow(rho, k);
      double m = std::min(v, cap);
      saved += m * m;
    }
    terms.push_back(ctx.zp2_prefix[t] + 0.5 * ctx.vol_prefix[t] * ctx.vol_prefix[t] -
                    0.5 * saved);
  }
  return terms;
}

double weight_by_ratio_drops(const PrefixContext& ctx, const std::vector<double>& terms) {
  double total = 0.0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    double next = t + 1 < terms.size() ? ctx.sigma[t + 1] : 0.0;
    total += (ctx.sigma[t] - next) * terms[t];
  }
  return total;
}

}  // namespace

std::vector<double> lp_cost_prefix_terms(const ConfigLPSolution& sol, const Instance& post_swap,
                                         int machine) {
  PrefixContext ctx = make_prefix_context(sol.z, post_swap, machine);
  std::vector<std::pair<std::uint32_t, double>> configs;  // (mask, mass) on this machine
  for (const auto& [i, mask, mass] : sol.masses)
    if (i == machine) configs.emplace_back(mask, mass);
  std::vector<double> pf(configs.size(), 0.0);  // p(f cap prefix)
  std::vector<double> terms;
  terms.reserve(ctx.order.size());
  for (std::size_t t = 0; t < ctx.order.size(); ++t) {
    int j = ctx.order[t];
    for (std::size_t c = 0; c < configs.size(); ++c)
      if (configs[c].first & (std::uint32_t{1} << j)) pf[c] += ctx.size[t];
    double squares = 0.0;
    for (std::size_t c = 0; c < configs.size(); ++c)
      squares += configs[c].second * pf[c] * pf[c];
    terms.push_back(0.5 * (ctx.zp2_prefix[t] + squares));
  }
  return terms;
}

double lp_cost_rewrite(const ConfigLPSolution& sol, const Instance& post_swap, int machine) {
  PrefixContext ctx = make_prefix_context(sol.z, post_swap, machine);
  return weight_by_ratio_drops(ctx, lp_cost_prefix_terms(sol, post_swap, machine));
}

std::vector<double> rounded_cost_prefix_terms(const std::vector<std::vector<double>>& z,
                                              const Instance& post_swap, int machine, double beta,
                                              double rho) {
  PrefixContext ctx = make_prefix_context(z, post_swap, machine);
  return bound_terms(ctx, beta, rho);
}

double rounded_cost_bound(const std::vector<std::vector<double>>& z, const Instance& post_swap,
                          int machine, double beta, double rho) {
  PrefixContext ctx = make_prefix_context(z, post_swap, machine);
  return weight_by_ratio_drops(ctx, bound_terms(ctx, beta, rho));
}

namespace {

double mean_of(std::span<const double> v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

double sigma_of_mean(std::span<const double> v, double mean) {
  std::vector<double> sq(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) sq[t] = (v[t] - mean) * (v[t] - mean);
  double var = pairwise_sum(sq) / static_cast<double>(v.size());
  return std::sqrt(std::max(var, 0.0) / static_cast<double>(v.size()));
}

}  // namespace

MonteCarloReport monte_carlo(const Pipeline& pipe, int trials, std::uint64_t seed, double rho,
                             std::optional<double> fixed_beta) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  int machines = pipe.post_swap.machines;

  std::vector<PrefixContext> ctx;
  ctx.reserve(machines);
  for (int i = 0; i < machines; ++i)
    ctx.push_back(make_prefix_context(pipe.lp.z, pipe.post_swap, i));

  std::vector<double> totals(trials, 0.0);
  std::vector<std::vector<double>> wc(machines, std::vector<double>(trials, 0.0));
  std::vector<std::vector<double>> diff(machines, std::vector<double>(trials, 0.0));

  int chunks = std::min(64, trials);
  parallel_for_chunks(chunks, [&](int c) {
    int lo = static_cast<int>(static_cast<long long>(trials) * c / chunks);
    int hi = static_cast<int>(static_cast<long long>(trials) * (c + 1) / chunks);
    for (int t = lo; t < hi; ++t) {
      std::uint64_t trial_seed = derive_seed(seed, seed_tag::trial, static_cast<std::uint64_t>(t));
      double beta;
      if (fixed_beta) {
        beta = *fixed_beta;
      } else {
        // 10 log-scale strata; a single trial degenerates to one full-range
        // draw and then matches solve_once on the derived trial seed
        RngStream beta_rng(derive_seed(trial_seed, seed_tag::beta));
        int strata = trials >= 10 ? 10 : 1;
        int stratum = t % strata;
        beta = beta_from_uniform((stratum + beta_rng.uniform01()) / strata, rho);
      }
      ShiftedClasses classes = make_classes(pipe.job_size, beta, rho);
      EdgeGraph graph = build_graph(pipe.lp.z, pipe.post_swap, classes);
      std::vector<int> machine_of = round_all(graph, trial_seed);
      double total = 0.0;
      for (int i = 0; i < machines; ++i) {
        double cost = machine_completion_cost(pipe.post_swap, i, machine_of);
        wc[i][t] = cost;
        diff[i][t] = cost - weight_by_ratio_drops(ctx[i], bound_terms(ctx[i], beta, rho));
        total += cost;
      }
      totals[t] = total;
    }
  });

  MonteCarloReport rep;
  rep.lp_objective = pipe.lp.objective;
  rep.duality_gap = pipe.lp.duality_gap;
  rep.trials = trials;
  rep.seed = seed;
  rep.rho = rho;
  rep.fixed_beta = fixed_beta;
  rep.mean_cost = mean_of(totals);
  rep.mean_ratio = rep.mean_cost / pipe.lp.objective;
  rep.ratio_halfwidth = 4.0 * sigma_of_mean(totals, rep.mean_cost) / pipe.lp.objective;
  for (int i = 0; i < machines; ++i) {
    MachineCostReport mr;
    mr.machine = i;
    mr.trials = trials;
    mr.lp_cost = lp_cost_on_machine(pipe.lp, pipe.post_swap, i);
    mr.rewritten_cost = weight_by_ratio_drops(ctx[i], lp_cost_prefix_terms(pipe.lp, pipe.post_swap, i));
    if (fixed_beta) {
      mr.bound_per_beta.emplace_back(
          *fixed_beta, weight_by_ratio_drops(ctx[i], bound_terms(ctx[i], *fixed_beta, rho)));
    } else {
      for (int s = 0; s < 10; ++s) {
        double beta = beta_from_uniform((s + 0.5) / 10.0, rho);
        mr.bound_per_beta.emplace_back(
            beta, weight_by_ratio_drops(ctx[i], bound_terms(ctx[i], beta, rho)));
      }
    }
    mr.wc_mean = mean_of(wc[i]);
    mr.wc_halfwidth = 4.0 * sigma_of_mean(wc[i], mr.wc_mean);
    mr.wc_minus_bound_mean = mean_of(diff[i]);
    mr.wc_minus_bound_halfwidth = 4.0 * sigma_of_mean(diff[i], mr.wc_minus_bound_mean);
    rep.per_machine.push_back(std::move(mr));
  }
  return rep;
}

MonteCarloReport monte_carlo(const Instance& original, int trials, std::uint64_t seed, double rho,
                             std::optional<double> fixed_beta) {
  Pipeline pipe = prepare_pipeline(original);
  return monte_carlo(pipe, trials, seed, rho, fixed_beta);
}

FixedBetaStats collect_fixed_beta_stats(const Pipeline& pipe, const EdgeGraph& graph, int trials,
                                        std::uint64_t seed, bool check_invariants) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  int nedges = static_cast<int>(graph.edges.size());
  int machines = graph.machines;

  // (machine, class) groups and the statistics targets within them
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (const GraphEdge& e : graph.edges) groups[{e.machine, e.cls}].push_back(e.id);
  std::vector<PairStat> pairs;
  std::vector<CrossGroupStat> cross;
  std::vector<std::vector<int>> cross_marked;  // marked group per cross entry
  for (const auto& [key, ids] : groups) {
    std::vector<int> unmarked, marked;
    for (int id : ids)
      (graph.edges[id].marked ? marked : unmarked).push_back(id);
    for (std::size_t a = 0; a < unmarked.size(); ++a)
      for (std::size_t b = a + 1; b < unmarked.size(); ++b) {
        PairStat ps;
        ps.e1 = unmarked[a];
        ps.e2 = unmarked[b];
        ps.x_product = graph.edges[ps.e1].x * graph.edges[ps.e2].x;
        pairs.push_back(ps);
      }
    if (!marked.empty())
      for (int u : unmarked) {
        CrossGroupStat cs;
        cs.edge = u;
        for (int e2 : marked)
          cs.lp_value += graph.edges[u].x * graph.edges[e2].x * graph.edges[e2].size;
        cross.push_back(cs);
        cross_marked.push_back(marked);
      }
  }

  int chunks = std::min(64, trials);
  struct Partial {
    std::vector<double> edge_sum, pair_sum, cross_sum, cross_sq, wc_sum, wc_sq;
    long long iterations = 0;
    int max_class_iterations = 0;
  };
  std::vector<Partial> partials(chunks);

  parallel_for_chunks(chunks, [&](int c) {
    Partial& p = partials[c];
    p.edge_sum.assign(nedges, 0.0);
    p.pair_sum.assign(pairs.size(), 0.0);
    p.cross_sum.assign(cross.size(), 0.0);
    p.cross_sq.assign(cross.size(), 0.0);
    p.wc_sum.assign(machines, 0.0);
    p.wc_sq.assign(machines, 0.0);
    std::vector<char> ind(nedges);
    std::vector<int> machine_of(graph.jobs);
    std::vector<IterationTrace> trace;
    int lo = static_cast<int>(static_cast<long long>(trials) * c / chunks);
    int hi = static_cast<int>(static_cast<long long>(trials) * (c + 1) / chunks);
    for (int t = lo; t < hi; ++t) {
      trace.clear();
      RoundOptions opts;
      opts.check_invariants = check_invariants;
      opts.trace = &trace;
      std::uint64_t trial_seed = derive_seed(seed, seed_tag::trial, static_cast<std::uint64_t>(t));
      std::vector<int> chosen = round_all_chosen(graph, trial_seed, opts);
      std::fill(ind.begin(), ind.end(), 0);
      std::fill(machine_of.begin(), machine_of.end(), -1);
      for (int id : chosen) {
        ind[id] = 1;
        machine_of[graph.edges[id].job] = graph.edges[id].machine;
      }
      for (int id : chosen) p.edge_sum[id] += 1.0;
      for (std::size_t q = 0; q < pairs.size(); ++q)
        if (ind[pairs[q].e1] && ind[pairs[q].e2]) p.pair_sum[q] += 1.0;
      for (std::size_t q = 0; q < cross.size(); ++q) {
        if (!ind[cross[q].edge]) continue;
        double v = 0.0;
        for (int e2 : cross_marked[q])
          if (ind[e2]) v += graph.edges[e2].size;
        p.cross_sum[q] += v;
        p.cross_sq[q] += v * v;
      }
      for (int i = 0; i < machines; ++i) {
        double cost = machine_completion_cost(pipe.post_swap, i, machine_of);
        p.wc_sum[i] += cost;
        p.wc_sq[i] += cost * cost;
      }
      std::map<int, int> per_class;
      for (const IterationTrace& tr : trace) ++per_class[tr.cls];
      p.iterations += static_cast<long long>(trace.size());
      for (const auto& [cls, n] : per_class)
        p.max_class_iterations = std::max(p.max_class_iterations, n);
    }
  });

  FixedBetaStats out;
  out.trials = trials;
  out.beta = graph.beta;
  auto merge = [&](auto get) {
    std::vector<double> cols(chunks);
    return [&, get, cols](std::size_t idx) mutable {
      for (int c = 0; c < chunks; ++c) cols[c] = get(partials[c], idx);
      return pairwise_sum(cols);
    };
  };
  auto edge_total = merge([](const Partial& p, std::size_t i) { return p.edge_sum[i]; });
  auto pair_total = merge([](const Partial& p, std::size_t i) { return p.pair_sum[i]; });
  auto cross_total = merge([](const Partial& p, std::size_t i) { return p.cross_sum[i]; });
  auto cross_sq_total = merge([](const Partial& p, std::size_t i) { return p.cross_sq[i]; });
  auto wc_total = merge([](const Partial& p, std::size_t i) { return p.wc_sum[i]; });
  auto wc_sq_total = merge([](const Partial& p, std::size_t i) { return p.wc_sq[i]; });

  double n = trials;
  out.edge_mean.resize(nedges);
  out.edge_sigma.resize(nedges);
  for (int e = 0; e < nedges; ++e) {
    double mean = edge_total(e) / n;
    out.edge_mean[e] = mean;
    out.edge_sigma[e] = std::sqrt(std::max(mean * (1.0 - mean), 0.0) / n);
  }
  out.unmarked_pairs = pairs;
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    double mean = pair_total(q) / n;
    out.unmarked_pairs[q].mean_product = mean;
    out.unmarked_pairs[q].sigma = std::sqrt(std::max(mean * (1.0 - mean), 0.0) / n);
  }
  out.cross_group = cross;
  for (std::size_t q = 0; q < cross.size(); ++q) {
    double mean = cross_total(q) / n;
    double var = std::max(cross_sq_total(q) / n - mean * mean, 0.0);
    out.cross_group[q].mean = mean;
    out.cross_group[q].sigma = std::sqrt(var / n);
  }
  out.wc_mean.resize(machines);
  out.wc_sigma.resize(machines);
  out.bound.resize(machines);
  for (int i = 0; i < machines; ++i) {
    double mean = wc_total(i) / n;
    double var = std::max(wc_sq_total(i) / n - mean * mean, 0.0);
    out.wc_mean[i] = mean;
    out.wc_sigma[i] = std::sqrt(var / n);
    out.bound[i] = rounded_cost_bound(pipe.lp.z, pipe.post_swap, i, graph.beta, graph.rho);
  }
  for (const Partial& p : partials) {
    out.iterations += p.iterations;
    out.max_class_iterations = std::max(out.max_class_iterations, p.max_class_iterations);
  }
  return out;
}

}  // namespace wct
