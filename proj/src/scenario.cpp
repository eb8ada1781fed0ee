#include "mleqlab/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mleqlab/errors.hpp"

namespace mleq {

namespace {

using nlohmann::ordered_json;

Contingency parse_contingency_token(const std::string& token, int n) {
  const auto comma = token.find(',');
  if (comma == std::string::npos) {
    throw ParseError("contingency token '" + token + "' must be 'state_index,h'");
  }
  int state = 0;
  int history = 0;
  try {
    state = std::stoi(token.substr(0, comma));
    history = std::stoi(token.substr(comma + 1));
  } catch (const std::exception&) {
    throw ParseError("contingency token '" + token + "' is not numeric");
  }
  if (state < 0 || state >= n) throw ParseError("state index out of range in '" + token + "'");
  if (history != 0 && history != 1) throw ParseError("history must be 0 or 1 in '" + token + "'");
  return {state, history};
}

double number_field(const ordered_json& node, const std::string& key) {
  if (!node.is_number()) throw ParseError("key '" + key + "' must be a number");
  return node.get<double>();
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("scenario must be a JSON object");

  static const std::set<std::string> known{
      "theta", "c",       "sigma",   "partition",         "tolerances", "seed", "v",
      "samples", "m",     "k_range", "genericity_length", "falsify",    "delta_grid", "grid"};
  for (const auto& [key, value] : root.items()) {
    (void)value;
    if (!known.contains(key)) throw ParseError("unknown scenario key '" + key + "'");
  }
  if (!root.contains("theta")) throw ParseError("scenario is missing required key 'theta'");
  if (!root.contains("c")) throw ParseError("scenario is missing required key 'c'");

  Scenario scenario;

  // theta
  if (!root["theta"].is_array() || root["theta"].empty()) {
    throw ParseError("'theta' must be a non-empty array");
  }
  std::vector<Rational> thetas;
  for (const auto& entry : root["theta"]) {
    try {
      if (entry.is_string()) {
        thetas.push_back(parse_rational(entry.get<std::string>()));
      } else if (entry.is_number()) {
        thetas.emplace_back(entry.get<double>());
      } else {
        throw ParseError("'theta' entries must be strings or numbers");
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("bad theta entry: ") + e.what());
    }
  }
  try {
    scenario.states = StateSpace(std::move(thetas));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("bad 'theta': ") + e.what());
  }
  const int n = scenario.states.n();

  scenario.penalty.c = number_field(root["c"], "c");
  if (!(scenario.penalty.c > 0.0)) throw ParseError("'c' must be strictly positive");

  if (root.contains("sigma")) {
    if (!root["sigma"].is_object()) throw ParseError("'sigma' must map 'state,h' to numbers");
    Strategy sigma(n, -1.0);
    for (const auto& [token, value] : root["sigma"].items()) {
      const Contingency where = parse_contingency_token(token, n);
      const double p = number_field(value, "sigma." + token);
      if (!(p >= 0.0 && p <= 1.0)) throw ParseError("sigma." + token + " outside [0,1]");
      sigma.at(where.state, where.history) = p;
    }
    for (int i = 0; i < 2 * n; ++i) {
      if (sigma.probs[i] < 0.0) {
        const Contingency missing = contingency_from_index(i);
        throw ParseError("sigma is missing contingency '" + std::to_string(missing.state) + "," +
                         std::to_string(missing.history) + "'");
      }
    }
    scenario.sigma = std::move(sigma);
  }

  if (root.contains("partition")) {
    if (!root["partition"].is_array()) throw ParseError("'partition' must be a list of cells");
    std::vector<std::vector<int>> cells;
    for (const auto& cell : root["partition"]) {
      if (!cell.is_array() || cell.empty()) throw ParseError("partition cells must be non-empty lists");
      std::vector<int> members;
      for (const auto& token : cell) {
        if (!token.is_string()) throw ParseError("partition members must be 'state,h' strings");
        const Contingency where = parse_contingency_token(token.get<std::string>(), n);
        members.push_back(contingency_index(where.state, where.history));
      }
      cells.push_back(std::move(members));
    }
    try {
      scenario.partition = Partition::from_cells(2 * n, cells);
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("bad 'partition': ") + e.what());
    }
  }

  if (root.contains("tolerances")) {
    if (!root["tolerances"].is_object()) throw ParseError("'tolerances' must be an object");
    for (const auto& [key, value] : root["tolerances"].items()) {
      if (key == "indifference") {
        scenario.tolerances.indifference = number_field(value, "tolerances.indifference");
      } else if (key == "v_tie") {
        scenario.tolerances.v_tie = number_field(value, "tolerances.v_tie");
      } else {
        throw ParseError("unknown tolerance key '" + key + "'");
      }
    }
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer()) throw ParseError("'seed' must be an integer");
    scenario.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("v")) {
    scenario.noise_v = number_field(root["v"], "v");
    if (!(*scenario.noise_v >= 0.0)) throw ParseError("'v' must be nonnegative");
  }
  if (root.contains("samples")) {
    if (!root["samples"].is_number_integer()) throw ParseError("'samples' must be an integer");
    scenario.samples = root["samples"].get<long long>();
  }
  if (root.contains("m")) {
    if (!root["m"].is_number_integer()) throw ParseError("'m' must be an integer");
    scenario.m = root["m"].get<int>();
  }
  if (root.contains("k_range")) {
    const auto& range = root["k_range"];
    if (!range.is_array() || range.size() != 2 || !range[0].is_number_integer() ||
        !range[1].is_number_integer()) {
      throw ParseError("'k_range' must be [k_min, k_max]");
    }
    scenario.k_range = {range[0].get<int>(), range[1].get<int>()};
  }
  if (root.contains("genericity_length")) {
    if (!root["genericity_length"].is_number_integer()) {
      throw ParseError("'genericity_length' must be an integer");
    }
    scenario.genericity_length = root["genericity_length"].get<int>();
  }
  if (root.contains("falsify")) {
    if (!root["falsify"].is_boolean()) throw ParseError("'falsify' must be a boolean");
    scenario.falsify = root["falsify"].get<bool>();
  }
  if (root.contains("delta_grid")) {
    if (!root["delta_grid"].is_array()) throw ParseError("'delta_grid' must be an array");
    for (const auto& entry : root["delta_grid"]) {
      scenario.delta_grid.push_back(number_field(entry, "delta_grid"));
    }
  }
  if (root.contains("grid")) {
    if (!root["grid"].is_number_integer()) throw ParseError("'grid' must be an integer");
    scenario.grid = root["grid"].get<int>();
  }

  // canonical form: fixed key order, thetas rendered exactly
  ordered_json canonical;
  ordered_json theta_list = ordered_json::array();
  for (int i = 0; i < n; ++i) theta_list.push_back(rational_to_string(scenario.states.exact(i)));
  canonical["theta"] = theta_list;
  canonical["c"] = scenario.penalty.c;
  if (scenario.sigma) {
    ordered_json sigma_map;
    for (int s = 0; s < n; ++s) {
      for (int h = 0; h < 2; ++h) {
        sigma_map[std::to_string(s) + "," + std::to_string(h)] = (*scenario.sigma)(s, h);
      }
    }
    canonical["sigma"] = sigma_map;
  }
  if (scenario.partition) {
    ordered_json cells = ordered_json::array();
    for (const auto& cell : scenario.partition->cells()) {
      ordered_json members = ordered_json::array();
      for (int index : cell) {
        const Contingency where = contingency_from_index(index);
        members.push_back(std::to_string(where.state) + "," + std::to_string(where.history));
      }
      cells.push_back(members);
    }
    canonical["partition"] = cells;
  }
  canonical["tolerances"] = {{"indifference", scenario.tolerances.indifference},
                             {"v_tie", scenario.tolerances.v_tie}};
  canonical["seed"] = scenario.seed;
  if (scenario.noise_v) canonical["v"] = *scenario.noise_v;
  canonical["samples"] = scenario.samples;
  if (scenario.m) canonical["m"] = *scenario.m;
  canonical["k_range"] = {scenario.k_range.first, scenario.k_range.second};
  canonical["genericity_length"] = scenario.genericity_length;
  canonical["falsify"] = scenario.falsify;
  if (!scenario.delta_grid.empty()) canonical["delta_grid"] = scenario.delta_grid;
  canonical["grid"] = scenario.grid;
  scenario.canonical = std::move(canonical);
  return scenario;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

}  // namespace mleq
