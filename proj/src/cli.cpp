#include "dmd/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "dmd/approx.hpp"
#include "dmd/dyn.hpp"
#include "dmd/errors.hpp"
#include "dmd/io.hpp"
#include "dmd/oracle.hpp"

namespace dmd {

namespace {

void emit(const nlohmann::json& result, const std::string& out_path) {
  std::string text = dump_result(result);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write " + out_path);
    out << text << "\n";
  }
}

// All report combinations, for --trace dumps (small trees only).
void add_traces(nlohmann::json& result, const std::vector<DiscreteDistribution>& dists,
                const std::function<ExecutionTrace(const std::vector<double>&)>& run) {
  std::size_t leaves = 1;
  for (const auto& d : dists) leaves *= d.size();
  if (leaves > 1024) throw ResourceLimitError("trace dump: too many report paths");
  std::vector<std::size_t> idx(dists.size(), 0);
  nlohmann::json arr = nlohmann::json::array();
  while (true) {
    std::vector<double> reports;
    for (std::size_t i = 0; i < dists.size(); ++i) reports.push_back(dists[i].value(idx[i]));
    arr.push_back(trace_to_json(run(reports)));
    std::size_t i = dists.size();
    while (i-- > 0) {
      if (++idx[i] < dists[i].size()) break;
      idx[i] = 0;
      if (i == 0) {
        result["traces"] = std::move(arr);
        return;
      }
    }
  }
}

struct CommonOpts {
  std::string instance_path;
  std::string out_path;
  double delta_prime = -1;  // <0: take the instance's setting
  double markov_delta = -1;
  std::uint64_t seed = 0;
  bool trace = false;
};

double pick_delta_prime(const CommonOpts& o, const Instance& inst) {
  return o.delta_prime > 0 ? o.delta_prime : inst.settings.delta_prime;
}

int cmd_solve_optimal(const CommonOpts& o) {
  Instance inst = load_instance(o.instance_path);
  double dp = pick_delta_prime(o, inst);
  OptimalPolicy policy = plan(inst.periods, dp);
  double revenue = expected_revenue(policy);
  nlohmann::json result{{"schema", 1}, {"instance", instance_to_json(inst)}};
  result["revenues"] = {{"optimal-recursive", revenue}};
  result["c0"] = policy.c0();
  result["predicted_revenue"] = policy.predicted_revenue();
  result["delta_prime"] = dp;
  nlohmann::json fns = nlohmann::json::array();
  for (const auto& g : policy.gtilde()) fns.push_back(pwl_to_json(g));
  result["functions"] = {{"gtilde", std::move(fns)}};
  if (o.trace)
    add_traces(result, inst.periods,
               [&](const std::vector<double>& r) { return execute(policy, r); });
  emit(result, o.out_path);
  return 0;
}

int cmd_solve_approx(const CommonOpts& o) {
  Instance inst = load_instance(o.instance_path);
  double dp = pick_delta_prime(o, inst);
  ApproxPolicy policy = plan_approx(inst.periods, dp);
  double m1 = mechanism1_revenue(inst.periods);
  double m2 = expected_revenue2(policy);
  nlohmann::json result{{"schema", 1}, {"instance", instance_to_json(inst)}};
  double ub = m1 + policy.second_term() + static_cast<double>(inst.periods.size()) * dp;
  result["revenues"] = {{"mechanism1", m1},
                        {"mechanism2", m2},
                        {"combined", 0.5 * (m1 + m2)},
                        {"sequential-monopoly", m1},
                        {"upper-bound", ub}};
  result["c0"] = policy.c0();
  result["delta_prime"] = dp;
  nlohmann::json fns = nlohmann::json::array();
  for (const auto& h : policy.htilde()) fns.push_back(pwl_to_json(h));
  result["functions"] = {{"htilde", std::move(fns)}};
  if (o.trace)
    add_traces(result, inst.periods,
               [&](const std::vector<double>& r) { return execute2(policy, r); });
  emit(result, o.out_path);
  return 0;
}

int cmd_oracle(const CommonOpts& o) {
  Instance inst = load_instance(o.instance_path);
  OracleResult res = global_lp_single(inst.periods);
  nlohmann::json result{{"schema", 1}, {"instance", instance_to_json(inst)}};
  result["revenues"] = {{"oracle-lp", res.value}};
  if (!inst.agents.empty())
    result["revenues"]["oracle-lp-multi"] = global_lp_multi(inst.agents);
  emit(result, o.out_path);
  return 0;
}

int cmd_markov(const CommonOpts& o) {
  Instance inst = load_instance(o.instance_path);
  double delta = o.markov_delta > 0 ? o.markov_delta : inst.settings.markov_delta;
  double value = markov_lp(inst.periods.front(), delta);
  MonopolyResult mono = monopoly(inst.periods.front());
  nlohmann::json result{{"schema", 1}, {"instance", instance_to_json(inst)}};
  result["revenues"] = {{"markov-lp", value}, {"monopoly", mono.revenue}};
  result["markov_delta"] = delta;
  emit(result, o.out_path);
  return 0;
}

int cmd_verify(const CommonOpts& o) {
  Instance inst = load_instance(o.instance_path);
  double dp = pick_delta_prime(o, inst);
  OptimalPolicy policy = plan(inst.periods, dp);
  VerifyReport rep = verify(policy);
  nlohmann::json result{{"schema", 1}, {"instance", instance_to_json(inst)}};
  result["verification"] = {{"max_pic_violation", rep.max_pic_violation},
                            {"min_stage_utility", rep.min_stage_utility},
                            {"max_prefinal_stage_utility", rep.max_prefinal_stage_utility}};
  result["delta_prime"] = dp;
  std::cout << "max PIC violation:          " << rep.max_pic_violation << "\n"
            << "min stage utility:          " << rep.min_stage_utility << "\n"
            << "max pre-final |stage util|: " << rep.max_prefinal_stage_utility << "\n";
  emit(result, o.out_path);
  return 0;
}

nlohmann::json full_comparison(const Instance& inst, double dp, bool trace) {
  OptimalPolicy policy = plan(inst.periods, dp);
  ApproxPolicy apolicy = plan_approx(inst.periods, dp);
  OracleResult oracle = global_lp_single(inst.periods);
  double m1 = mechanism1_revenue(inst.periods);
  double m2 = expected_revenue2(apolicy);
  double revenue = expected_revenue(policy);
  VerifyReport rep = verify(policy);

  nlohmann::json result{{"schema", 1}, {"instance", instance_to_json(inst)}};
  result["revenues"] = {{"optimal-recursive", revenue},
                        {"oracle-lp", oracle.value},
                        {"mechanism1", m1},
                        {"mechanism2", m2},
                        {"combined", 0.5 * (m1 + m2)},
                        {"sequential-monopoly", m1},
                        {"upper-bound", m1 + apolicy.second_term() +
                                            static_cast<double>(inst.periods.size()) * dp}};
  if (!inst.agents.empty())
    result["revenues"]["oracle-lp-multi"] = global_lp_multi(inst.agents);
  result["verification"] = {{"max_pic_violation", rep.max_pic_violation},
                            {"min_stage_utility", rep.min_stage_utility},
                            {"max_prefinal_stage_utility", rep.max_prefinal_stage_utility}};
  nlohmann::json gfns = nlohmann::json::array(), hfns = nlohmann::json::array();
  for (const auto& g : policy.gtilde()) gfns.push_back(pwl_to_json(g));
  for (const auto& h : apolicy.htilde()) hfns.push_back(pwl_to_json(h));
  result["functions"] = {{"gtilde", std::move(gfns)}, {"htilde", std::move(hfns)}};
  result["delta_prime"] = dp;
  if (trace) {
    add_traces(result, inst.periods,
               [&](const std::vector<double>& r) { return execute(policy, r); });
  }
  return result;
}

void print_table(const nlohmann::json& revenues) {
  static const char* order[] = {"optimal-recursive", "oracle-lp",  "sequential-monopoly",
                                "mechanism1",        "mechanism2", "combined",
                                "upper-bound",       "oracle-lp-multi"};
  for (const char* key : order)
    if (revenues.contains(key))
      std::printf("%-22s %.12g\n", key, revenues.at(key).get<double>());
}

int cmd_compare(const CommonOpts& o) {
  Instance inst = load_instance(o.instance_path);
  nlohmann::json result = full_comparison(inst, pick_delta_prime(o, inst), o.trace);
  print_table(result["revenues"]);
  emit(result, o.out_path);
  return 0;
}

int cmd_example_two_er(const CommonOpts& o, int n, int N) {
  Instance inst;
  inst.periods = {equal_revenue_discrete(n), equal_revenue_discrete(N)};
  OracleResult oracle = global_lp_single(inst.periods);
  double sequential = mechanism1_revenue(inst.periods);
  nlohmann::json result{{"schema", 1}, {"instance", instance_to_json(inst)}};
  result["revenues"] = {{"sequential-monopoly", sequential},
                        {"oracle-lp", oracle.value},
                        {"gap", oracle.value - sequential}};
  std::printf("sequential-monopoly    %.12g\n", sequential);
  std::printf("oracle-lp              %.12g\n", oracle.value);
  std::printf("gap                    %.12g\n", oracle.value - sequential);
  emit(result, o.out_path);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"dynamic mechanism design solver"};
  app.require_subcommand(1);

  CommonOpts o;
  int er_n = 3, er_N = 20;

  auto add_common = [&](CLI::App* cmd, bool needs_instance) {
    if (needs_instance) cmd->add_option("instance", o.instance_path, "instance file")->required();
    cmd->add_option("-o,--out", o.out_path, "result file (default: stdout)");
    cmd->add_option("--delta-prime", o.delta_prime, "per-level accuracy");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_flag("--trace", o.trace, "dump execution traces");
  };

  auto* solve_optimal = app.add_subcommand("solve-optimal", "backward-pass optimal policy");
  add_common(solve_optimal, true);
  auto* solve_approx = app.add_subcommand("solve-approx", "2-approximation mechanisms");
  add_common(solve_approx, true);
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force LP optimum");
  add_common(oracle_cmd, true);
  auto* markov_cmd = app.add_subcommand("markov", "stationary infinite-horizon LP");
  add_common(markov_cmd, true);
  markov_cmd->add_option("--markov-delta", o.markov_delta, "discount factor");
  auto* verify_cmd = app.add_subcommand("verify", "brute-force PIC/IR check of the optimal policy");
  add_common(verify_cmd, true);
  auto* compare_cmd = app.add_subcommand("compare", "all methods side by side");
  add_common(compare_cmd, true);
  auto* er_cmd = app.add_subcommand("example-two-er", "two equal-revenue periods gap");
  add_common(er_cmd, false);
  er_cmd->add_option("--n", er_n, "first-period truncation");
  er_cmd->add_option("--N", er_N, "second-period truncation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // app.exit prints help/version text for the zero-exit-code cases and the
    // error message otherwise.
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve_optimal->parsed()) return cmd_solve_optimal(o);
    if (solve_approx->parsed()) return cmd_solve_approx(o);
    if (oracle_cmd->parsed()) return cmd_oracle(o);
    if (markov_cmd->parsed()) return cmd_markov(o);
    if (verify_cmd->parsed()) return cmd_verify(o);
    if (compare_cmd->parsed()) return cmd_compare(o);
    if (er_cmd->parsed()) return cmd_example_two_er(o, er_n, er_N);
  } catch (const ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const SolverLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace dmd
