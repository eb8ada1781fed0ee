#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

using Json = nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

std::string binary_path() {
  const char* path = std::getenv("MLEQLAB_BIN");
  REQUIRE(path != nullptr);
  return path;
}

std::string tmp_dir() {
  const char* dir = std::getenv("MLEQLAB_TMP");
  return dir ? dir : ".";
}

RunResult run_cli(const std::string& args) {
  const std::string command = binary_path() + " " + args + " 2>/dev/null";
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[4096];
  while (std::size_t got = fread(buffer, 1, sizeof(buffer), pipe)) result.output.append(buffer, got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string write_scenario(const std::string& name, const std::string& body) {
  const std::string path = tmp_dir() + "/" + name;
  std::ofstream out(path);
  out << body;
  return path;
}

const char* kExampleOne = R"({
  "theta": ["0.6"],
  "c": 0.09,
  "sigma": {"0,0": 0.2, "0,1": 0.8},
  "partition": [["0,0"], ["0,1"]]
})";

}  // namespace

TEST_CASE("verify accepts the binding single-state scenario") {
  const std::string path = write_scenario("ex1.json", kExampleOne);
  const RunResult run = run_cli("verify --scenario " + path);
  CHECK(run.exit_code == 0);
  const Json report = Json::parse(run.output);
  CHECK(report["results"]["verdicts"]["mleq"] == true);
  CHECK(report["results"]["verdicts"]["smleq"] == true);
  CHECK(report["results"]["verdicts"]["monotone_mleq"] == true);
  CHECK(report["input_digest"].get<std::string>().starts_with("fnv1a64:"));
}

TEST_CASE("verify reports the merge-inequality failure above the cost threshold") {
  const std::string path = write_scenario("ex1_highc.json", R"({
    "theta": ["0.6"],
    "c": 0.1,
    "sigma": {"0,0": 0.2, "0,1": 0.8},
    "partition": [["0,0"], ["0,1"]]
  })");
  const RunResult run = run_cli("verify --scenario " + path);
  CHECK(run.exit_code == 0);  // clean run, negative verdict
  const Json report = Json::parse(run.output);
  CHECK(report["results"]["verdicts"]["mleq"] == false);
  bool found_margin = false;
  for (const auto& failure : report["results"]["verdicts"]["failures"]) {
    if (failure["condition"] == "merge_inequality") {
      found_margin = true;
      CHECK(std::abs(failure["magnitude"].get<double>() + 0.01) <= 1e-9);
    }
  }
  CHECK(found_margin);
}

TEST_CASE("parse errors exit with status 2") {
  const std::string bad_theta = write_scenario("bad_theta.json", R"({
    "theta": ["1.2"], "c": 0.09,
    "sigma": {"0,0": 0.2, "0,1": 0.8},
    "partition": [["0,0"], ["0,1"]]
  })");
  CHECK(run_cli("verify --scenario " + bad_theta).exit_code == 2);

  const std::string unknown_key = write_scenario("unknown_key.json", R"({
    "theta": ["0.6"], "c": 0.09, "mystery": 1
  })");
  CHECK(run_cli("verify --scenario " + unknown_key).exit_code == 2);

  const std::string missing = write_scenario("missing_sigma.json", R"({
    "theta": ["0.6"], "c": 0.09
  })");
  CHECK(run_cli("verify --scenario " + missing).exit_code == 2);
}

TEST_CASE("oversized instances exit with status 3") {
  Json scenario;
  scenario["theta"] = {"0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7"};
  scenario["c"] = 0.05;
  Json sigma;
  Json cell = Json::array();
  for (int s = 0; s < 7; ++s) {
    for (int h = 0; h < 2; ++h) {
      sigma[std::to_string(s) + "," + std::to_string(h)] = 0.0;
      cell.push_back(std::to_string(s) + "," + std::to_string(h));
    }
  }
  scenario["sigma"] = sigma;
  scenario["partition"] = Json::array({cell});
  const std::string path = write_scenario("too_big.json", scenario.dump());
  CHECK(run_cli("verify --scenario " + path).exit_code == 3);
}

TEST_CASE("search n1 lists the trusting and zero-trust equilibria in cooperation order") {
  const std::string path = write_scenario("search_n1.json", R"({"theta": ["0.6"], "c": 0.09})");
  const RunResult run = run_cli("search --scenario " + path + " --mode n1");
  CHECK(run.exit_code == 0);
  const Json report = Json::parse(run.output);
  const auto& equilibria = report["results"]["equilibria"];
  REQUIRE(equilibria.size() == 2);
  CHECK(equilibria[0]["cooperation_rate"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(equilibria[0]["verdicts"]["smleq"] == true);
  CHECK(equilibria[1]["cooperation_rate"].get<double>() == 0.0);
}

TEST_CASE("search n2 candidates cooperate in at most one state") {
  const std::string path =
      write_scenario("search_n2.json", R"({"theta": ["0.75", "0.9"], "c": 0.15})");
  const RunResult run = run_cli("search --scenario " + path + " --mode n2");
  CHECK(run.exit_code == 0);
  const Json report = Json::parse(run.output);
  for (const auto& eq : report["results"]["equilibria"]) {
    int cooperating = 0;
    for (const auto& rate : eq["cooperation_per_state"]) {
      if (rate.get<double>() > 1e-12) ++cooperating;
    }
    CHECK(cooperating <= 1);
  }
}

TEST_CASE("grid search above the threshold finds only zero trust") {
  const std::string path = write_scenario("search_grid.json", R"({"theta": ["0.6"], "c": 0.3})");
  const RunResult run = run_cli("search --scenario " + path + " --mode grid --grid 20");
  CHECK(run.exit_code == 0);
  const Json report = Json::parse(run.output);
  const auto& equilibria = report["results"]["equilibria"];
  REQUIRE(equilibria.size() == 1);
  CHECK(equilibria[0]["cooperation_rate"].get<double>() == 0.0);
}

TEST_CASE("bounds tabulates maxmin, genericity, and the noise check") {
  const std::string path = write_scenario("bounds.json", R"({
    "theta": ["0.2", "0.3", "0.5"],
    "c": 0.09,
    "m": 2,
    "k_range": [2, 5],
    "genericity_length": 3
  })");
  const std::string csv_path = tmp_dir() + "/bounds_out.csv";
  const RunResult run = run_cli("bounds --scenario " + path + " --csv " + csv_path);
  CHECK(run.exit_code == 0);
  const Json report = Json::parse(run.output);
  for (const auto& row : report["results"]["maxmin"]) {
    CHECK(row["value"].get<double>() < row["upper_bound"].get<double>());
  }
  CHECK(report["results"]["genericity"]["generic"] == false);
  CHECK(report["results"]["genericity"]["witnesses"][0] == "0.2+0.3=0.5");
  CHECK(report["results"]["prop2"]["holds"] == true);  // 2 * 0.09 * 8 = 1.44

  std::ifstream csv(csv_path);
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "section,key,value,threshold,verdict");
  int rows = 0;
  bool saw_k3 = false;
  for (std::string line; std::getline(csv, line);) {
    ++rows;
    // 12 significant digits in numeric fields
    if (line.starts_with("maxmin,K=3,")) {
      saw_k3 = true;
      CHECK(line == "maxmin,K=3,0.0428932188135,0.0625,1");
    }
  }
  CHECK(rows >= 6);
  CHECK(saw_k3);
}

TEST_CASE("bounds runs the noise indifference check on the binding scenario") {
  const std::string path = write_scenario("bounds_noise.json", R"({
    "theta": ["0.6"],
    "c": 0.09,
    "sigma": {"0,0": 0.2, "0,1": 0.8},
    "v": 0.09,
    "k_range": [2, 2]
  })");
  const RunResult run = run_cli("bounds --scenario " + path);
  CHECK(run.exit_code == 0);
  const Json report = Json::parse(run.output);
  CHECK(report["results"]["noise"]["verdict"] == "fine/coarse indifferent");
}

TEST_CASE("noise command reports closed forms and calibrated monte carlo") {
  const std::string path = write_scenario("noise.json", R"({
    "theta": ["0.6"],
    "c": 0.09,
    "sigma": {"0,0": 0.2, "0,1": 0.8},
    "samples": 200000,
    "seed": 11
  })");
  const RunResult run = run_cli("noise --scenario " + path);
  CHECK(run.exit_code == 0);
  const Json report = Json::parse(run.output);
  CHECK(report["results"]["mspe_fine"].get<double>() == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(report["results"]["within_4se"] == true);
  CHECK(report["results"]["merge_inequality_agrees"] == true);
}

TEST_CASE("reports are byte-identical across runs and replay from the embedded scenario") {
  const std::string path = write_scenario("ex1_replay.json", kExampleOne);
  const RunResult first = run_cli("verify --scenario " + path);
  const RunResult second = run_cli("verify --scenario " + path);
  CHECK(first.output == second.output);

  const Json report = Json::parse(first.output);
  const std::string replay_path = tmp_dir() + "/ex1_embedded.json";
  std::ofstream replay(replay_path);
  replay << report["scenario"].dump();
  replay.close();
  const RunResult replayed = run_cli("verify --scenario " + replay_path);
  CHECK(replayed.exit_code == 0);
  const Json replayed_report = Json::parse(replayed.output);
  CHECK(replayed_report["results"] == report["results"]);
  CHECK(replayed_report["input_digest"] == report["input_digest"]);
}
