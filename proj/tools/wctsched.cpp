#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wct/certificate.hpp"
#include "wct/cost_analysis.hpp"
#include "wct/instance_io.hpp"
#include "wct/pipeline.hpp"

namespace {

using nlohmann::ordered_json;

std::string fnv1a64_hex(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string certificate_hash(const std::vector<wct::cert::CertificateRow>& rows) {
  return fnv1a64_hex(wct::cert::rows_to_json(rows).dump());
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text << "\n";
}

struct GenOptions {
  wct::GenSpec spec;
  std::uint64_t seed = 1;
};

void add_gen_flags(CLI::App* cmd, GenOptions& opt) {
  cmd->add_option("-m,--machines", opt.spec.machines, "number of machines");
  cmd->add_option("-n,--jobs", opt.spec.jobs, "number of jobs");
  cmd->add_option("--density", opt.spec.density, "probability a (machine, job) pair is allowed");
  cmd->add_option("--size-lo", opt.spec.size_lo, "smallest job size");
  cmd->add_option("--size-hi", opt.spec.size_hi, "largest job size");
  cmd->add_option("--weight-lo", opt.spec.weight_lo, "smallest job weight");
  cmd->add_option("--weight-hi", opt.spec.weight_hi, "largest job weight");
}

ordered_json machine_report_json(const wct::MachineCostReport& mr) {
  ordered_json bounds = ordered_json::array();
  for (auto [beta, bound] : mr.bound_per_beta)
    bounds.push_back({{"beta", beta}, {"bound", bound}});
  return {{"machine", mr.machine},
          {"lp_cost", mr.lp_cost},
          {"rewritten_cost", mr.rewritten_cost},
          {"wc_mean", mr.wc_mean},
          {"wc_halfwidth", mr.wc_halfwidth},
          {"wc_minus_bound_mean", mr.wc_minus_bound_mean},
          {"wc_minus_bound_halfwidth", mr.wc_minus_bound_halfwidth},
          {"bound_per_beta", bounds},
          {"trials", mr.trials}};
}

int cmd_gen(const GenOptions& opt, const std::string& out) {
  wct::Instance inst = wct::gen_instance(opt.spec, opt.seed);
  write_output(wct::instance_to_json(inst).dump(2), out);
  return 0;
}

int cmd_solve(const std::string& instance_path, std::uint64_t seed, double rho,
              const std::string& out, const std::string& dump_lp, const std::string& dump_graph) {
  wct::Instance inst = wct::load_instance(instance_path);
  wct::Pipeline pipe = wct::prepare_pipeline(inst);
  wct::SolveOutcome result = wct::solve_once(pipe, seed, rho);

  if (!dump_lp.empty()) write_output(wct::lp_solution_to_json(pipe.lp).dump(2), dump_lp);
  if (!dump_graph.empty()) {
    wct::ShiftedClasses classes = wct::make_classes(pipe.job_size, result.beta, rho);
    wct::EdgeGraph graph = wct::build_graph(pipe.lp.z, pipe.post_swap, classes);
    write_output(wct::graph_to_json(graph).dump(2), dump_graph);
  }

  ordered_json rep;
  rep["instance"] = {{"machines", inst.machines}, {"jobs", inst.jobs}};
  rep["seed"] = seed;
  rep["rho"] = rho;
  rep["beta"] = result.beta;
  rep["lp_objective"] = pipe.lp.objective;
  rep["duality_gap"] = pipe.lp.duality_gap;
  rep["assignment"] = result.machine_of;
  rep["cost"] = result.cost.value();
  rep["cost_exact"] = result.cost.str();
  rep["ratio"] = result.ratio;
  rep["certificate_hash"] = certificate_hash(wct::cert::reference_table());
  write_output(rep.dump(2), out);
  return 0;
}

std::string experiment_csv(const wct::MonteCarloReport& rep) {
  std::string csv =
      "machine,lp_cost,rewritten_cost,wc_mean,wc_halfwidth,wc_minus_bound_mean,"
      "wc_minus_bound_halfwidth,trials\n";
  char line[256];
  for (const auto& mr : rep.per_machine) {
    std::snprintf(line, sizeof line, "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d\n", mr.machine,
                  mr.lp_cost, mr.rewritten_cost, mr.wc_mean, mr.wc_halfwidth,
                  mr.wc_minus_bound_mean, mr.wc_minus_bound_halfwidth, mr.trials);
    csv += line;
  }
  std::snprintf(line, sizeof line, "total,%.12g,,%.12g,,,,%d\n", rep.lp_objective, rep.mean_cost,
                rep.trials);
  csv += line;
  return csv;
}

int cmd_experiment(const std::optional<std::string>& instance_path, const GenOptions& gen,
                   int trials, std::uint64_t seed, double rho, std::optional<double> fixed_beta,
                   const std::string& out, const std::string& format) {
  wct::Instance inst =
      instance_path ? wct::load_instance(*instance_path) : wct::gen_instance(gen.spec, gen.seed);
  wct::Pipeline pipe = wct::prepare_pipeline(inst);
  wct::MonteCarloReport rep = wct::monte_carlo(pipe, trials, seed, rho, fixed_beta);

  // one fixed-beta pass for the structural and correlation checks
  double stats_beta;
  if (fixed_beta) {
    stats_beta = *fixed_beta;
  } else {
    wct::RngStream beta_rng(wct::derive_seed(seed, wct::seed_tag::beta));
    stats_beta = wct::sample_beta(beta_rng, rho);
  }
  wct::ShiftedClasses classes = wct::make_classes(pipe.job_size, stats_beta, rho);
  wct::EdgeGraph graph = wct::build_graph(pipe.lp.z, pipe.post_swap, classes);
  wct::FixedBetaStats stats =
      wct::collect_fixed_beta_stats(pipe, graph, trials, seed, /*check_invariants=*/true);

  bool marginals_ok = true;
  for (std::size_t e = 0; e < stats.edge_mean.size(); ++e)
    marginals_ok = marginals_ok && std::fabs(stats.edge_mean[e] - graph.edges[e].x) <=
                                       4.0 * stats.edge_sigma[e] + 1e-9;
  bool pairs_ok = true;
  for (const auto& ps : stats.unmarked_pairs)
    pairs_ok = pairs_ok && ps.mean_product <= ps.x_product + 4.0 * ps.sigma + 1e-9;
  bool cross_ok = true;
  for (const auto& cs : stats.cross_group)
    cross_ok = cross_ok && cs.mean <= cs.lp_value + 4.0 * cs.sigma + 1e-9;
  bool bound_ok = true;
  for (int i = 0; i < graph.machines; ++i)
    bound_ok = bound_ok && stats.wc_mean[i] <= stats.bound[i] + 4.0 * stats.wc_sigma[i] + 1e-9;
  bool ratio_ok = rep.mean_ratio <= 1.5 + rep.ratio_halfwidth + 1e-9;

  ordered_json rj;
  rj["config"] = {{"machines", inst.machines}, {"jobs", inst.jobs},
                  {"trials", trials},          {"seed", seed},
                  {"rho", rho},                {"stats_beta", stats_beta},
                  {"stratified_beta", !fixed_beta.has_value()}};
  rj["lp"] = {{"objective", rep.lp_objective}, {"duality_gap", rep.duality_gap}};
  rj["ratio"] = {{"mean", rep.mean_ratio}, {"halfwidth_4sigma", rep.ratio_halfwidth}};
  ordered_json machines = ordered_json::array();
  for (const auto& mr : rep.per_machine) machines.push_back(machine_report_json(mr));
  rj["per_machine"] = std::move(machines);
  rj["checks"] = {{"marginals_within_4sigma", marginals_ok},
                  {"unmarked_pairs_nonpositive_correlation", pairs_ok},
                  {"cross_group_nonpositive_correlation", cross_ok},
                  {"conditional_bound", bound_ok},
                  {"structural_invariants", true},  // the stats pass throws otherwise
                  {"ratio_sanity_ceiling", ratio_ok}};
  rj["certificate_hash"] = certificate_hash(wct::cert::reference_table());

  if (format == "csv")
    write_output(experiment_csv(rep), out);
  else
    write_output(rj.dump(2), out);
  bool all_ok = marginals_ok && pairs_ok && cross_ok && bound_ok && ratio_ok;
  return all_ok ? 0 : 1;
}

int cmd_verify_cert(const std::string& path, const std::string& out) {
  std::vector<wct::cert::CertificateRow> rows;
  if (path.empty()) {
    rows = wct::cert::reference_table();
  } else {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "cannot open certificate file: " << path << "\n";
      return 2;
    }
    try {
      nlohmann::json j;
      in >> j;
      rows = wct::cert::rows_from_json(j);
    } catch (const std::exception& e) {
      std::cerr << "malformed certificate: " << e.what() << "\n";
      return 2;
    }
  }

  wct::cert::TableCheck tc;
  try {
    tc = wct::cert::check_table(rows);
  } catch (const std::exception& e) {
    std::cerr << "malformed certificate: " << e.what() << "\n";
    return 2;
  }

  for (const auto& ic : tc.intervals) {
    std::printf("interval %2d [%.6f, %.6f): %s  worst case value %.3e\n", ic.interval,
                wct::cert::interval_lo(ic.interval), wct::cert::interval_hi(ic.interval),
                ic.pass ? "PASS" : "FAIL", ic.worst_value);
    if (ic.worst)
      std::printf("  violated by %s program, case %s, L=%.6f, a=%.6f, value=%.6e\n",
                  ic.worst->capped_program ? "capped" : "uncapped", ic.worst->case_id.c_str(),
                  ic.worst->L, ic.worst->arg, ic.worst->value);
  }
  std::printf("mean alpha = %.7f (must stay below 1.36)\n", tc.mean_alpha);
  std::printf("certificate: %s\n", tc.pass ? "PASS" : "FAIL");

  if (!out.empty()) {
    ordered_json rj;
    rj["pass"] = tc.pass;
    rj["mean_alpha"] = tc.mean_alpha;
    ordered_json intervals = ordered_json::array();
    for (const auto& ic : tc.intervals)
      intervals.push_back({{"o", ic.interval},
                           {"pass", ic.pass},
                           {"baseline_requirement", ic.baseline_requirement},
                           {"worst_value", ic.worst_value}});
    rj["intervals"] = std::move(intervals);
    rj["certificate_hash"] = certificate_hash(rows);
    write_output(rj.dump(2), out);
  }
  return tc.pass ? 0 : 1;
}

int cmd_search_params(int interval, double span, double step, int refine, const std::string& out) {
  const auto& seed_row = wct::cert::reference_table()[interval - 1];
  wct::cert::SearchGrid grid = wct::cert::grid_around(seed_row, span, step);
  grid.refine_rounds = refine;
  wct::cert::CertificateRow row = wct::cert::search_params(interval, grid);
  wct::cert::IntervalCheck ic = wct::cert::check_interval(row);
  ordered_json rj;
  rj["row"] = wct::cert::rows_to_json({row})[0];
  rj["pass"] = ic.pass;
  rj["worst_value"] = ic.worst_value;
  rj["reference_alpha"] = seed_row.alpha;
  write_output(rj.dump(2), out);
  return ic.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Unrelated-machine weighted completion time scheduler: configuration LP, "
      "randomized iterative rounding, and the approximation-ratio certificate checker"};
  app.require_subcommand(1);

  GenOptions gen_opt;
  std::string out_path;
  std::uint64_t seed = 1;
  double rho = 2.0;

  auto* gen = app.add_subcommand("gen", "generate a random instance");
  add_gen_flags(gen, gen_opt);
  gen->add_option("--seed", gen_opt.seed, "generator seed");
  gen->add_option("-o,--out", out_path, "output file (stdout otherwise)");

  std::string instance_path, dump_lp, dump_graph;
  auto* solve = app.add_subcommand("solve", "run the full pipeline once on an instance");
  solve->add_option("-i,--instance", instance_path, "instance JSON file")->required();
  solve->add_option("--seed", seed, "random seed");
  solve->add_option("--rho", rho, "class growth factor");
  solve->add_option("-o,--out", out_path, "report file (stdout otherwise)");
  solve->add_option("--dump-lp", dump_lp, "write the LP solution to this file");
  solve->add_option("--dump-graph", dump_graph, "write the marked edge graph to this file");

  int trials = 1000;
  double fixed_beta_value = 0.0;
  std::string format = "json";
  auto* experiment = app.add_subcommand("experiment", "repeated randomized runs plus checks");
  auto* exp_inst = experiment->add_option("-i,--instance", instance_path, "instance JSON file");
  add_gen_flags(experiment, gen_opt);
  experiment->add_option("--gen-seed", gen_opt.seed, "generator seed when no instance is given");
  experiment->add_option("-t,--trials", trials, "number of randomized runs");
  experiment->add_option("--seed", seed, "experiment master seed");
  experiment->add_option("--rho", rho, "class growth factor");
  auto* fb = experiment->add_option("--fixed-beta", fixed_beta_value,
                                    "freeze the class shift instead of sampling it");
  experiment->add_option("-o,--out", out_path, "report file (stdout otherwise)");
  experiment->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string cert_path;
  auto* verify = app.add_subcommand("verify-cert", "check an approximation-ratio certificate");
  verify->add_option("path", cert_path, "certificate JSON (bundled table when omitted)");
  verify->add_option("-o,--out", out_path, "also write a JSON report here");

  int interval = 5;
  double span = 0.04, step = 0.02;
  int refine = 2;
  auto* search = app.add_subcommand("search-params", "re-search certificate parameters");
  search->add_option("--interval", interval, "interval index 1..10")
      ->required()
      ->check(CLI::Range(1, 10));
  search->add_option("--span", span, "half-width of the coarse grid around the shipped row");
  search->add_option("--step", step, "coarse grid step");
  search->add_option("--refine", refine, "number of 10x refinement rounds");
  search->add_option("-o,--out", out_path, "output file (stdout otherwise)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_opt, out_path);
    if (solve->parsed()) return cmd_solve(instance_path, seed, rho, out_path, dump_lp, dump_graph);
    if (experiment->parsed()) {
      std::optional<std::string> inst_path;
      if (exp_inst->count() > 0) inst_path = instance_path;
      std::optional<double> fixed_beta;
      if (fb->count() > 0) fixed_beta = fixed_beta_value;
      return cmd_experiment(inst_path, gen_opt, trials, seed, rho, fixed_beta, out_path, format);
    }
    if (verify->parsed()) return cmd_verify_cert(cert_path, out_path);
    if (search->parsed()) return cmd_search_params(interval, span, step, refine, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
