#pragma once

#include <string>

#include <json.hpp>

#include "wct/instance.hpp"

namespace wct {

// Instance wire format:
//   {"machines": m, "jobs": n, "p": [[...]], "w": [...] or [[...]],
//    "weights_machine_dependent": bool}
// "p" is a machines x jobs table; null entries mean the job may never run on
// that machine. "w" is a per-job array unless weights_machine_dependent, in
// which case it is a table like "p". Numbers are converted exactly (every
// finite JSON double is a dyadic rational).
Instance instance_from_json(const nlohmann::json& j);
nlohmann::ordered_json instance_to_json(const Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

struct GenSpec {
  int machines = 2;
  int jobs = 6;
  double density = 1.0;  // probability that a (machine, job) pair is allowed
  int size_lo = 1;       // sizes are log-uniform integers in [size_lo, size_hi]
  int size_hi = 64;
  int weight_lo = 1;  // weights are uniform integers in [weight_lo, weight_hi]
  int weight_hi = 10;
};

// Reproducible random instance: same (spec, seed) gives the same instance.
// Every job is guaranteed at least one eligible machine.
Instance gen_instance(const GenSpec& spec, std::uint64_t seed);

}  // namespace wct
