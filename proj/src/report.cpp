#include "mleqlab/report.hpp"

#include <cstdio>
#include <fstream>

#include "mleqlab/errors.hpp"

namespace mleq {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string format_sig12(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

Json verdict_to_json(const Verdict& verdict) {
  Json out;
  out["mleq"] = verdict.is_mleq;
  out["smleq"] = verdict.is_smleq;
  out["monotone_mleq"] = verdict.is_monotone_mleq;
  Json failures = Json::array();
  for (const auto& failure : verdict.failures) {
    failures.push_back({{"condition", failure.condition},
                        {"location", failure.location},
                        {"magnitude", failure.magnitude}});
  }
  out["failures"] = failures;
  return out;
}

Json candidate_to_json(const EquilibriumCandidate& cand) {
  const int n = cand.states.n();
  Json out;
  Json sigma;
  Json dist;
  for (int s = 0; s < n; ++s) {
    for (int h = 0; h < 2; ++h) {
      const std::string key = std::to_string(s) + "," + std::to_string(h);
      sigma[key] = cand.sigma(s, h);
      dist[key] = cand.dist(s, h);
    }
  }
  out["sigma"] = sigma;
  Json cells = Json::array();
  for (const auto& cell : cand.partition.cells()) {
    Json members = Json::array();
    for (int index : cell) {
      const Contingency where = contingency_from_index(index);
      members.push_back(std::to_string(where.state) + "," + std::to_string(where.history));
    }
    cells.push_back(members);
  }
  out["partition"] = cells;
  out["p"] = dist;
  Json beliefs;
  for (int s = 0; s < n; ++s) {
    for (int h = 0; h < 2; ++h) {
      beliefs[std::to_string(s) + "," + std::to_string(h)] = cand.sigma_hat(s, h);
    }
  }
  out["sigma_hat"] = beliefs;
  Json per_state = Json::array();
  for (int s = 0; s < n; ++s) per_state.push_back(cand.dist(s, 1));
  out["cooperation_per_state"] = per_state;
  out["cooperation_rate"] = overall_cooperation_rate(cand.dist);
  return out;
}

Json report_skeleton(const std::string& command, const Scenario& scenario) {
  Json report;
  report["tool"] = {{"name", "mleqlab"}, {"version", "0.1.0"}};
  report["command"] = command;
  char digest[32];
  std::snprintf(digest, sizeof(digest), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(scenario.canonical.dump())));
  report["input_digest"] = digest;
  report["seed"] = scenario.seed;
  report["scenario"] = scenario.canonical;
  return report;
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open CSV output '" + path + "'");
  out << "section,key,value,threshold,verdict\n";
  for (const auto& row : rows) {
    out << row.section << "," << row.key << "," << row.value << "," << row.threshold << ","
        << row.verdict << "\n";
  }
}

}  // namespace mleq
