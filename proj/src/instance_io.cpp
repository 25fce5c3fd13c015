#include "wct/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "wct/rng.hpp"

namespace wct {

namespace {

Rational number_from_json(const nlohmann::json& v) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_float()) return Rational::from_double_exact(v.get<double>());
  throw std::invalid_argument("expected a number in instance file");
}

nlohmann::ordered_json number_to_json(const Rational& r) {
  if (r.is_integer()) return r.num();
  return r.value();
}

}  // namespace

Instance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("instance must be a JSON object");
  Instance inst = Instance::make(j.at("machines").get<int>(), j.at("jobs").get<int>());
  const auto& p = j.at("p");
  if (!p.is_array() || static_cast<int>(p.size()) != inst.machines)
    throw std::invalid_argument("\"p\" must have one row per machine");
  for (int i = 0; i < inst.machines; ++i) {
    if (static_cast<int>(p[i].size()) != inst.jobs)
      throw std::invalid_argument("\"p\" row has wrong length");
    for (int jj = 0; jj < inst.jobs; ++jj)
      if (!p[i][jj].is_null()) inst.proc[i][jj] = number_from_json(p[i][jj]);
  }
  const auto& w = j.at("w");
  bool w_is_table = j.value("weights_machine_dependent", false);
  if (w_is_table) {
    if (static_cast<int>(w.size()) != inst.machines)
      throw std::invalid_argument("\"w\" must have one row per machine");
    for (int i = 0; i < inst.machines; ++i)
      for (int jj = 0; jj < inst.jobs; ++jj)
        if (inst.proc[i][jj]) inst.weight[i][jj] = number_from_json(w[i][jj]);
  } else {
    if (static_cast<int>(w.size()) != inst.jobs)
      throw std::invalid_argument("\"w\" must have one entry per job");
    for (int jj = 0; jj < inst.jobs; ++jj) {
      Rational wj = number_from_json(w[jj]);
      for (int i = 0; i < inst.machines; ++i)
        if (inst.proc[i][jj]) inst.weight[i][jj] = wj;
    }
  }
  inst.refresh_flags();
  inst.validate();
  return inst;
}

nlohmann::ordered_json instance_to_json(const Instance& inst) {
  nlohmann::ordered_json j;
  j["machines"] = inst.machines;
  j["jobs"] = inst.jobs;
  nlohmann::ordered_json p = nlohmann::ordered_json::array();
  for (int i = 0; i < inst.machines; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int jj = 0; jj < inst.jobs; ++jj) {
      if (inst.proc[i][jj])
        row.push_back(number_to_json(*inst.proc[i][jj]));
      else
        row.push_back(nullptr);
    }
    p.push_back(std::move(row));
  }
  j["p"] = std::move(p);
  if (inst.weights_machine_dependent) {
    nlohmann::ordered_json w = nlohmann::ordered_json::array();
    for (int i = 0; i < inst.machines; ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (int jj = 0; jj < inst.jobs; ++jj) {
        if (inst.weight[i][jj])
          row.push_back(number_to_json(*inst.weight[i][jj]));
        else
          row.push_back(nullptr);
      }
      w.push_back(std::move(row));
    }
    j["w"] = std::move(w);
  } else {
    nlohmann::ordered_json w = nlohmann::ordered_json::array();
    for (int jj = 0; jj < inst.jobs; ++jj) {
      Rational wj(1);
      for (int i = 0; i < inst.machines; ++i)
        if (inst.weight[i][jj]) {
          wj = *inst.weight[i][jj];
          break;
        }
      w.push_back(number_to_json(wj));
    }
    j["w"] = std::move(w);
  }
  j["weights_machine_dependent"] = inst.weights_machine_dependent;
  return j;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  nlohmann::json j;
  in >> j;
  return instance_from_json(j);
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << instance_to_json(inst).dump(2) << "\n";
}

Instance gen_instance(const GenSpec& spec, std::uint64_t seed) {
  if (spec.machines <= 0 || spec.jobs <= 0) throw std::invalid_argument("empty generator spec");
  if (spec.density < 0.0 || spec.density > 1.0)
    throw std::invalid_argument("density must be in [0, 1]");
  if (spec.size_lo < 1 || spec.size_hi < spec.size_lo || spec.weight_lo < 1 ||
      spec.weight_hi < spec.weight_lo)
    throw std::invalid_argument("generator ranges must be positive and ordered");
  RngStream rng(derive_seed(seed, seed_tag::generate));
  Instance inst = Instance::make(spec.machines, spec.jobs);
  double log_span = std::log2(static_cast<double>(spec.size_hi) / spec.size_lo);
  for (int j = 0; j < spec.jobs; ++j) {
    auto wj = Rational(rng.uniform_int(spec.weight_lo, spec.weight_hi));
    std::vector<char> allowed(spec.machines, 0);
    for (int i = 0; i < spec.machines; ++i) allowed[i] = rng.bernoulli(spec.density) ? 1 : 0;
    int fallback = static_cast<int>(rng.uniform_int(0, spec.machines - 1));
    bool any = false;
    for (char a : allowed) any = any || a;
    if (!any) allowed[fallback] = 1;
    for (int i = 0; i < spec.machines; ++i) {
      double u = rng.uniform01();  // drawn even for disallowed pairs to keep streams aligned
      if (!allowed[i]) continue;
      auto size = static_cast<long long>(std::llround(spec.size_lo * std::exp2(u * log_span)));
      size = std::clamp<long long>(size, spec.size_lo, spec.size_hi);
      inst.proc[i][j] = Rational(size);
      inst.weight[i][j] = wj;
    }
  }
  inst.refresh_flags();
  inst.validate();
  return inst;
}

}  // namespace wct
