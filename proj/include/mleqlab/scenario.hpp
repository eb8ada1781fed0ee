#ifndef MLEQLAB_SCENARIO_HPP
#define MLEQLAB_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mleqlab/equilibrium.hpp"

namespace mleq {

struct Tolerances {
  double indifference = kDefaultEps;
  double v_tie = kVTieTolerance;
};

// Human-editable scenario tree. Thetas may be fraction strings ("3/5"),
// decimal strings ("0.6", exact in base 10), or plain JSON numbers (exact as
// binary doubles). Unknown keys are rejected.
struct Scenario {
  StateSpace states = StateSpace::from_doubles({0.5});
  PenaltyConfig penalty;
  std::optional<Strategy> sigma;
  std::optional<Partition> partition;
  Tolerances tolerances;
  std::uint64_t seed = 1;

  // bounds / noise extensions
  std::optional<double> noise_v;
  long long samples = 1'000'000;
  std::optional<int> m;
  std::pair<int, int> k_range{2, 6};
  int genericity_length = 4;
  bool falsify = false;
  std::vector<double> delta_grid;
  int grid = 20;

  nlohmann::ordered_json canonical;  // normalized form, embedded in reports
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

}  // namespace mleq

#endif
