#include "dmd/io.hpp"

#include <fstream>
#include <stdexcept>

namespace dmd {

namespace {

DiscreteDistribution parse_dist(const nlohmann::json& j) {
  if (!j.contains("support") || !j.contains("probs"))
    throw std::invalid_argument("instance: period needs support and probs");
  return DiscreteDistribution(j.at("support").get<std::vector<double>>(),
                              j.at("probs").get<std::vector<double>>());
}

}  // namespace

Instance parse_instance(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw std::invalid_argument("instance: not an object");
    if (j.value("schema", 0) != 1) throw std::invalid_argument("instance: unknown schema version");
    Instance inst;
    if (!j.contains("periods") || !j.at("periods").is_array() || j.at("periods").empty())
      throw std::invalid_argument("instance: missing periods");
    for (const auto& pj : j.at("periods")) inst.periods.push_back(parse_dist(pj));
    if (j.contains("agents")) {
      for (const auto& aj : j.at("agents")) {
        std::vector<DiscreteDistribution> agent;
        for (const auto& pj : aj) agent.push_back(parse_dist(pj));
        inst.agents.push_back(std::move(agent));
      }
    }
    if (j.contains("settings")) {
      const auto& s = j.at("settings");
      inst.settings.delta_prime = s.value("delta_prime", inst.settings.delta_prime);
      inst.settings.alpha_grid = s.value("alpha_grid", inst.settings.alpha_grid);
      inst.settings.markov_delta = s.value("markov_delta", inst.settings.markov_delta);
      inst.settings.seed = s.value("seed", inst.settings.seed);
    }
    if (!(inst.settings.delta_prime > 0) || inst.settings.alpha_grid < 1 ||
        !(inst.settings.markov_delta > 0 && inst.settings.markov_delta < 1))
      throw std::invalid_argument("instance: bad settings");
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("instance: malformed json: ") + e.what());
  }
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("instance: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("instance: parse error: ") + e.what());
  }
  return parse_instance(j);
}

nlohmann::json dist_to_json(const DiscreteDistribution& d) {
  return {{"support", d.support()}, {"probs", d.probs()}};
}

nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j{{"schema", 1}};
  j["periods"] = nlohmann::json::array();
  for (const auto& d : inst.periods) j["periods"].push_back(dist_to_json(d));
  if (!inst.agents.empty()) {
    j["agents"] = nlohmann::json::array();
    for (const auto& ag : inst.agents) {
      nlohmann::json aj = nlohmann::json::array();
      for (const auto& d : ag) aj.push_back(dist_to_json(d));
      j["agents"].push_back(std::move(aj));
    }
  }
  j["settings"] = {{"delta_prime", inst.settings.delta_prime},
                   {"alpha_grid", inst.settings.alpha_grid},
                   {"markov_delta", inst.settings.markov_delta},
                   {"seed", inst.settings.seed}};
  return j;
}

nlohmann::json pwl_to_json(const PiecewiseLinearConcave& f) {
  nlohmann::json bps = nlohmann::json::array();
  for (std::size_t i = 0; i < f.num_breakpoints(); ++i)
    bps.push_back({f.xs()[i], f.ys()[i]});
  return {{"breakpoints", std::move(bps)}, {"extension_slope", f.extension_slope()}};
}

nlohmann::json trace_to_json(const ExecutionTrace& t) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : t)
    arr.push_back({{"report", r.report},
                   {"alloc", r.alloc},
                   {"charged", r.charged},
                   {"adjusted_payment", r.adjusted_payment},
                   {"stage_utility", r.stage_utility},
                   {"state_out", r.state_out}});
  return arr;
}

std::string dump_result(const nlohmann::json& j) { return j.dump(2); }

}  // namespace dmd
