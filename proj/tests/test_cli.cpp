#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "dmd/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(std::vector<std::string> args) {
  std::vector<const char*> argv{"dmd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dmd::cli_main(static_cast<int>(argv.size()), argv.data());
}

fs::path tmpdir() {
  auto p = fs::temp_directory_path() / "dmd-cli-tests";
  fs::create_directories(p);
  return p;
}

fs::path write_file(const std::string& name, const std::string& text) {
  auto p = tmpdir() / name;
  std::ofstream(p) << text;
  return p;
}

fs::path small_instance() {
  return write_file("small.json", R"({
    "schema": 1,
    "periods": [
      {"support": [1.0, 3.0], "probs": [0.5, 0.5]},
      {"support": [1.0, 2.0], "probs": [0.5, 0.5]}
    ],
    "agents": [[{"support": [1.0, 3.0], "probs": [0.5, 0.5]},
                {"support": [1.0, 2.0], "probs": [0.5, 0.5]}]]
  })");
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("argument errors") {
  CHECK(run({}) == 2);
  CHECK(run({"no-such-command"}) == 2);
  CHECK(run({"solve-optimal"}) == 2);  // missing instance path
  CHECK(run({"--help"}) == 0);
  CHECK(run({"solve-optimal", "/nonexistent/file.json"}) == 3);
}

TEST_CASE("invalid instances exit with 3") {
  auto bad_schema = write_file("bad_schema.json", R"({"schema": 7, "periods": []})");
  CHECK(run({"oracle", bad_schema.string()}) == 3);
  auto bad_dist = write_file(
      "bad_dist.json",
      R"({"schema": 1, "periods": [{"support": [2.0, 1.0], "probs": [0.5, 0.5]}]})");
  CHECK(run({"oracle", bad_dist.string()}) == 3);
  auto not_json = write_file("not_json.json", "hello");
  CHECK(run({"oracle", not_json.string()}) == 3);
}

TEST_CASE("resource limits exit with 4") {
  json inst{{"schema", 1}};
  inst["periods"] = json::array();
  json er;
  er["support"] = json::array();
  er["probs"] = json::array();
  for (int v = 1; v <= 10; ++v) {
    er["support"].push_back(static_cast<double>(v));
    er["probs"].push_back(v < 10 ? 1.0 / v - 1.0 / (v + 1) : 0.1);
  }
  for (int i = 0; i < 6; ++i) inst["periods"].push_back(er);  // 1e6 leaves
  auto p = write_file("huge.json", inst.dump());
  CHECK(run({"oracle", p.string()}) == 4);
}

TEST_CASE("solve, verify, oracle, markov, compare run and agree") {
  auto inst = small_instance();
  auto d = tmpdir();

  REQUIRE(run({"solve-optimal", inst.string(), "-o", (d / "opt.json").string(), "--trace"}) == 0);
  auto opt = read_json(d / "opt.json");
  double rev = opt["revenues"]["optimal-recursive"].get<double>();
  CHECK(opt["traces"].size() == 4);  // 2x2 report paths

  REQUIRE(run({"oracle", inst.string(), "-o", (d / "oracle.json").string()}) == 0);
  auto orc = read_json(d / "oracle.json");
  double lp = orc["revenues"]["oracle-lp"].get<double>();
  CHECK(rev <= lp + 1e-6);
  CHECK(rev >= lp - 2 * 0.01 - 1e-6);
  // Single-agent list mirrored under "agents" must reproduce the same value.
  CHECK(orc["revenues"]["oracle-lp-multi"].get<double>() == doctest::Approx(lp).epsilon(1e-8));

  REQUIRE(run({"solve-approx", inst.string(), "-o", (d / "apx.json").string()}) == 0);
  auto apx = read_json(d / "apx.json");
  CHECK(apx["revenues"]["combined"].get<double>() >= 0.5 * lp - (2 * 0.01 + 1e-6));
  CHECK(apx["revenues"]["upper-bound"].get<double>() >= lp - 1e-6);

  REQUIRE(run({"verify", inst.string(), "-o", (d / "ver.json").string()}) == 0);
  auto ver = read_json(d / "ver.json");
  CHECK(ver["verification"]["max_pic_violation"].get<double>() <= 10 * 0.01 + 1e-6);
  CHECK(ver["verification"]["min_stage_utility"].get<double>() >= -1e-9);

  REQUIRE(run({"markov", inst.string(), "-o", (d / "mkv.json").string(),
               "--markov-delta", "0.5"}) == 0);
  auto mkv = read_json(d / "mkv.json");
  CHECK(mkv["revenues"]["markov-lp"].get<double>() ==
        doctest::Approx(mkv["revenues"]["monopoly"].get<double>()).epsilon(1e-7));

  REQUIRE(run({"compare", inst.string(), "-o", (d / "cmp.json").string()}) == 0);
  auto cmp = read_json(d / "cmp.json");
  // The combined run must agree bit-for-bit with the individual commands.
  CHECK(cmp["revenues"]["optimal-recursive"].get<double>() == rev);
  CHECK(cmp["revenues"]["oracle-lp"].get<double>() == lp);
  CHECK(cmp["revenues"]["mechanism2"].get<double>() ==
        apx["revenues"]["mechanism2"].get<double>());
}

TEST_CASE("solve-optimal output is deterministic") {
  auto inst = small_instance();
  auto d = tmpdir();
  REQUIRE(run({"solve-optimal", inst.string(), "-o", (d / "a.json").string()}) == 0);
  REQUIRE(run({"solve-optimal", inst.string(), "-o", (d / "b.json").string()}) == 0);
  std::ifstream fa(d / "a.json"), fb(d / "b.json");
  std::string a((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::string b((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(a == b);
}

TEST_CASE("example-two-er shows the gap") {
  auto d = tmpdir();
  REQUIRE(run({"example-two-er", "--n", "3", "--N", "20",
               "-o", (d / "er.json").string()}) == 0);
  auto er = read_json(d / "er.json");
  CHECK(er["revenues"]["sequential-monopoly"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(er["revenues"]["oracle-lp"].get<double>() > 2.3);
}
