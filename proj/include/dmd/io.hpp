#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "dmd/dist.hpp"
#include "dmd/dyn.hpp"
#include "dmd/pwl.hpp"

namespace dmd {

struct Settings {
  double delta_prime = 0.01;
  int alpha_grid = 1000;
  double markov_delta = 0.9;
  std::uint64_t seed = 0;
};

struct Instance {
  std::vector<DiscreteDistribution> periods;
  // Optional: per-agent period lists for the multi-agent oracle.
  std::vector<std::vector<DiscreteDistribution>> agents;
  Settings settings;
};

// Throws std::invalid_argument on schema or distribution problems.
Instance parse_instance(const nlohmann::json& j);
Instance load_instance(const std::string& path);

nlohmann::json instance_to_json(const Instance& inst);
nlohmann::json dist_to_json(const DiscreteDistribution& d);
nlohmann::json pwl_to_json(const PiecewiseLinearConcave& f);
nlohmann::json trace_to_json(const ExecutionTrace& t);

// Serialization with enough digits for bit-stable round trips.
std::string dump_result(const nlohmann::json& j);

}  // namespace dmd
