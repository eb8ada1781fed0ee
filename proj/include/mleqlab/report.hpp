#ifndef MLEQLAB_REPORT_HPP
#define MLEQLAB_REPORT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mleqlab/bounds_lab.hpp"
#include "mleqlab/equilibrium.hpp"
#include "mleqlab/scenario.hpp"

namespace mleq {

using Json = nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view bytes);

// 12 significant digits, the CSV contract.
std::string format_sig12(double value);

Json verdict_to_json(const Verdict& verdict);
Json candidate_to_json(const EquilibriumCandidate& cand);

// Skeleton shared by every command: tool info, digest, seed, embedded
// scenario. Results and summary are filled by the caller.
Json report_skeleton(const std::string& command, const Scenario& scenario);

struct CsvRow {
  std::string section;
  std::string key;
  std::string value;
  std::string threshold;
  std::string verdict;
};

void write_csv(const std::string& path, const std::vector<CsvRow>& rows);

}  // namespace mleq

#endif
