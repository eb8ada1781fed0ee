#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mleqlab/bounds_lab.hpp"
#include "mleqlab/equilibrium.hpp"
#include "mleqlab/errors.hpp"
#include "mleqlab/report.hpp"
#include "mleqlab/rng.hpp"
#include "mleqlab/sample_noise.hpp"
#include "mleqlab/scenario.hpp"

namespace {

using mleq::Json;

struct CommonArgs {
  std::string scenario_path;
  std::string mode;
  std::string csv_path;
  int grid = 0;                    // 0 keeps the scenario value
  double tolerance = -1.0;         // <0 keeps the scenario value
  std::int64_t seed = -1;          // <0 keeps the scenario value
  int max_bell = mleq::kMaxEnumeration;
};

mleq::Scenario load_with_overrides(const CommonArgs& args) {
  mleq::Scenario scenario = mleq::load_scenario(args.scenario_path);
  if (args.tolerance >= 0.0) scenario.tolerances.indifference = args.tolerance;
  if (args.seed >= 0) scenario.seed = static_cast<std::uint64_t>(args.seed);
  if (args.grid > 0) scenario.grid = args.grid;
  // reflect overrides in the canonical form so replays reproduce the report
  scenario.canonical["tolerances"]["indifference"] = scenario.tolerances.indifference;
  scenario.canonical["seed"] = scenario.seed;
  scenario.canonical["grid"] = scenario.grid;
  return scenario;
}

mleq::VerifyOptions verify_options(const mleq::Scenario& scenario, const CommonArgs& args) {
  mleq::VerifyOptions options;
  options.eps = scenario.tolerances.indifference;
  options.tie_tol = scenario.tolerances.v_tie;
  options.max_count = args.max_bell;
  return options;
}

Json equilibrium_entry(const mleq::EquilibriumCandidate& cand, const mleq::Verdict& verdict,
                       bool* falsification) {
  Json entry = mleq::candidate_to_json(cand);
  entry["verdicts"] = mleq::verdict_to_json(verdict);
  if (verdict.is_smleq) {
    const mleq::CensusReport census = mleq::full_cooperation_census(cand);
    entry["census"] = {{"full_cooperation_states", census.full_cooperation_count},
                       {"fraction_ok", census.fraction_ok},
                       {"partner_bounds_ok", census.bounds_ok}};
    if (!census.pass && falsification) *falsification = true;
  }
  return entry;
}

int cmd_verify(const CommonArgs& args) {
  const mleq::Scenario scenario = load_with_overrides(args);
  if (!scenario.sigma || !scenario.partition) {
    throw mleq::ParseError("verify requires both 'sigma' and 'partition' in the scenario");
  }
  const mleq::EquilibriumCandidate cand = mleq::make_candidate(
      scenario.states, *scenario.sigma, *scenario.partition, scenario.penalty);
  const mleq::VerifyOptions options = verify_options(scenario, args);
  mleq::Verdict verdict = mleq::verify_smleq(cand, options);
  const mleq::Verdict monotone = mleq::verify_monotone_mleq(cand, options);
  verdict.is_monotone_mleq = monotone.is_monotone_mleq;

  Json report = mleq::report_skeleton("verify", scenario);
  Json results;
  results["verdicts"] = mleq::verdict_to_json(verdict);
  Json monotone_failures = Json::array();
  for (const auto& failure : monotone.failures) {
    monotone_failures.push_back({{"condition", failure.condition},
                                 {"location", failure.location},
                                 {"magnitude", failure.magnitude}});
  }
  results["monotone_failures"] = monotone_failures;
  results["candidate"] = mleq::candidate_to_json(cand);
  report["results"] = results;
  report["summary"] = {std::string("MLEQ: ") + (verdict.is_mleq ? "true" : "false"),
                       std::string("SMLEQ: ") + (verdict.is_smleq ? "true" : "false"),
                       std::string("monotone MLEQ: ") +
                           (verdict.is_monotone_mleq ? "true" : "false")};
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_search(const CommonArgs& args) {
  const mleq::Scenario scenario = load_with_overrides(args);
  if (args.mode != "grid" && args.mode != "n1" && args.mode != "n2") {
    throw mleq::ParseError("--mode must be one of grid, n1, n2");
  }
  const mleq::VerifyOptions options = verify_options(scenario, args);
  std::vector<mleq::FoundEquilibrium> found;
  Json approximate = Json::array();
  Json notes = Json::array();

  auto add_candidate = [&](const mleq::EquilibriumCandidate& cand) {
    mleq::Verdict verdict = mleq::verify_smleq(cand, options);
    const mleq::Verdict monotone = mleq::verify_monotone_mleq(cand, options);
    verdict.is_monotone_mleq = monotone.is_monotone_mleq;
    found.push_back({cand, verdict});
  };

  if (args.mode == "n1") {
    if (scenario.states.n() != 1) throw mleq::ParseError("mode n1 requires exactly one theta");
    if (auto cand = mleq::solve_n1(scenario.states, scenario.penalty.c)) add_candidate(*cand);
    add_candidate(mleq::zero_trust_candidate(scenario.states, scenario.penalty));
  } else if (args.mode == "n2") {
    if (scenario.states.n() != 2) throw mleq::ParseError("mode n2 requires exactly two thetas");
    const mleq::SolveN2Result result = mleq::solve_n2(scenario.states, scenario.penalty.c);
    for (const auto& cand : result.candidates) add_candidate(cand);
    for (const auto& note : result.notes) notes.push_back(note);
    add_candidate(mleq::zero_trust_candidate(scenario.states, scenario.penalty));
  } else {
    mleq::GridSearchOptions search;
    search.grid = scenario.grid;
    search.verify_eps = scenario.tolerances.indifference;
    search.tie_tol = scenario.tolerances.v_tie;
    search.max_count = args.max_bell;
    const mleq::GridSearchResult result =
        mleq::grid_search(scenario.states, scenario.penalty, search);
    found = result.exact;
    for (const auto& approx : result.approximate) {
      Json entry;
      Json sigma;
      for (int s = 0; s < scenario.states.n(); ++s) {
        for (int h = 0; h < 2; ++h) {
          sigma[std::to_string(s) + "," + std::to_string(h)] = approx.sigma(s, h);
        }
      }
      entry["sigma"] = sigma;
      entry["partition"] = approx.partition.to_string();
      entry["reason"] = approx.reason;
      approximate.push_back(entry);
    }
  }

  std::sort(found.begin(), found.end(),
            [](const mleq::FoundEquilibrium& a, const mleq::FoundEquilibrium& b) {
              const double ca = mleq::overall_cooperation_rate(a.candidate.dist);
              const double cb = mleq::overall_cooperation_rate(b.candidate.dist);
              if (ca != cb) return ca > cb;
              return a.candidate.sigma.probs < b.candidate.sigma.probs;
            });

  bool falsification = false;
  Json equilibria = Json::array();
  for (const auto& eq : found) {
    equilibria.push_back(equilibrium_entry(eq.candidate, eq.verdict, &falsification));
  }

  Json report = mleq::report_skeleton("search", scenario);
  Json results;
  results["mode"] = args.mode;
  results["equilibria"] = equilibria;
  results["approximate"] = approximate;
  results["notes"] = notes;
  report["results"] = results;
  Json summary = Json::array();
  summary.push_back("equilibria found: " + std::to_string(equilibria.size()));
  for (const auto& eq : found) {
    summary.push_back("cooperation rate " +
                      mleq::format_sig12(mleq::overall_cooperation_rate(eq.candidate.dist)) +
                      (eq.verdict.is_smleq ? " [SMLEQ]" : " [MLEQ]"));
  }
  report["summary"] = summary;
  std::cout << report.dump(2) << "\n";
  return falsification ? 4 : 0;
}

int cmd_bounds(const CommonArgs& args) {
  const mleq::Scenario scenario = load_with_overrides(args);
  std::vector<mleq::CsvRow> rows;
  Json results;
  bool falsification = false;

  mleq::GridSearchOptions search;
  search.grid = scenario.grid;
  search.max_count = args.max_bell;

  if (scenario.m) {
    mleq::BoundQuery query{scenario.states, scenario.penalty, *scenario.m, 0.0};
    const mleq::PredicateReport prop2 =
        mleq::prop2_predicate(query, scenario.falsify, search);
    const mleq::PredicateReport prop3 =
        mleq::prop3_predicate(query, scenario.falsify, search);
    auto predicate_json = [](const mleq::PredicateReport& report) {
      return Json{{"holds", report.holds},
                  {"lhs", report.lhs},
                  {"rhs", report.rhs},
                  {"search_ran", report.search_ran},
                  {"counterexample_found", report.counterexample_found},
                  {"equilibria_checked", report.equilibria_checked}};
    };
    results["prop2"] = predicate_json(prop2);
    results["prop3"] = predicate_json(prop3);
    rows.push_back({"prop2", "2cm^3", mleq::format_sig12(prop2.lhs), mleq::format_sig12(1.0),
                    prop2.holds ? "1" : "0"});
    rows.push_back({"prop3", "max_theta", mleq::format_sig12(prop3.lhs),
                    mleq::format_sig12(prop3.rhs), prop3.holds ? "1" : "0"});
    if (prop2.counterexample_found || prop3.counterexample_found) falsification = true;
  }

  {
    const int k_lo = std::max(2, scenario.k_range.first);
    const int k_hi = std::min(10, scenario.k_range.second);
    Json table = Json::array();
    for (int k = k_lo; k <= k_hi; ++k) {
      const mleq::OuterMaxMinResult outer = mleq::outer_maxmin(k);
      const double bound = 1.0 / (2.0 * std::pow(static_cast<double>(k - 1), 3.0));
      Json row;
      row["K"] = k;
      row["value"] = outer.value;
      row["upper_bound"] = bound;
      row["p"] = outer.p;
      row["start_spread"] = outer.start_spread;
      table.push_back(row);
      rows.push_back({"maxmin", "K=" + std::to_string(k), mleq::format_sig12(outer.value),
                      mleq::format_sig12(bound), outer.value < bound ? "1" : "0"});
    }
    results["maxmin"] = table;
  }

  {
    const int length = std::min(scenario.genericity_length, scenario.states.num_contingencies());
    const mleq::GenericityReport generic = mleq::genericity_check(scenario.states, length);
    results["genericity"] = {{"generic", generic.generic}, {"witnesses", generic.witnesses}};
    rows.push_back({"genericity", "L=" + std::to_string(length), generic.generic ? "1" : "0", "",
                    generic.generic ? "1" : "0"});
  }

  if (scenario.sigma && scenario.states.n() == 1) {
    const double v = scenario.noise_v.value_or(scenario.penalty.c);
    try {
      const mleq::NoisyObservationModel model = mleq::make_noise_model(*scenario.sigma, v);
      const double fine = mleq::expected_mspe_fine(model);
      const double coarse = mleq::expected_mspe_coarse(model);
      std::string verdict;
      if (std::abs(fine - coarse) <= 1e-12) {
        verdict = "fine/coarse indifferent";
      } else if (fine < coarse) {
        verdict = "fine preferred";
      } else {
        verdict = "coarse preferred";
      }
      results["noise"] = {{"v", v},
                          {"mspe_fine", fine},
                          {"mspe_coarse", coarse},
                          {"verdict", verdict}};
      rows.push_back({"noise", "fine_minus_coarse", mleq::format_sig12(fine - coarse), "",
                      mleq::fine_partition_preferred(model) ? "1" : "0"});
    } catch (const mleq::ModelError& e) {
      results["noise"] = {{"error", e.what()}};
    }
  }

  if (!scenario.delta_grid.empty()) {
    const mleq::ProbeReport probe =
        mleq::monotone_threshold_probe(scenario.states, scenario.penalty, scenario.delta_grid,
                                       search);
    Json entries = Json::array();
    for (const auto& entry : probe.entries) {
      entries.push_back({{"max_theta", entry.max_theta},
                         {"found", entry.found},
                         {"equilibria", entry.equilibria}});
      rows.push_back({"monotone_probe", mleq::format_sig12(entry.max_theta),
                      std::to_string(entry.equilibria), "", entry.found ? "1" : "0"});
    }
    Json probe_json;
    probe_json["entries"] = entries;
    if (probe.any_found) probe_json["largest_found"] = probe.largest_found;
    if (probe.any_empty) probe_json["smallest_certified_empty"] = probe.smallest_empty;
    results["monotone_probe"] = probe_json;
  }

  Json report = mleq::report_skeleton("bounds", scenario);
  report["results"] = results;
  Json summary = Json::array();
  for (const auto& row : rows) {
    summary.push_back(row.section + " " + row.key + " = " + row.value +
                      (row.threshold.empty() ? "" : " vs " + row.threshold));
  }
  report["summary"] = summary;
  if (!args.csv_path.empty()) {
    mleq::write_csv(args.csv_path, rows);
    report["csv"] = args.csv_path;
  }
  std::cout << report.dump(2) << "\n";
  return falsification ? 4 : 0;
}

int cmd_noise(const CommonArgs& args) {
  const mleq::Scenario scenario = load_with_overrides(args);
  if (!scenario.sigma) throw mleq::ParseError("noise requires 'sigma' in the scenario");
  if (scenario.states.n() != 1) throw mleq::ParseError("the noisy reduced form needs n=1");
  const double v = scenario.noise_v.value_or(scenario.penalty.c);
  const mleq::NoisyObservationModel model = mleq::make_noise_model(*scenario.sigma, v);

  const double fine = mleq::expected_mspe_fine(model);
  const double coarse = mleq::expected_mspe_coarse(model);
  const mleq::MonteCarloMspe mc_fine =
      mleq::monte_carlo_mspe(model, mleq::NoisePartition::Fine, scenario.samples, scenario.seed);
  const mleq::MonteCarloMspe mc_coarse = mleq::monte_carlo_mspe(
      model, mleq::NoisePartition::Coarse, scenario.samples, mleq::split_seed(scenario.seed, 1));
  const double z_fine = mc_fine.std_error > 0.0 ? (mc_fine.mean - fine) / mc_fine.std_error : 0.0;
  const double z_coarse =
      mc_coarse.std_error > 0.0 ? (mc_coarse.mean - coarse) / mc_coarse.std_error : 0.0;

  // consistency with the partition engine's merge inequality at c := v
  const mleq::ErgodicDistribution dist =
      mleq::ergodic_distribution(*scenario.sigma, scenario.states);
  const mleq::Partition finest = mleq::Partition::finest(2);
  const mleq::BeliefProfile profile =
      mleq::representative_strategies(finest, *scenario.sigma, dist);
  const mleq::MergeDelta merge = mleq::merge_delta_mspe(finest, 0, 1, profile, dist);
  const bool merge_agrees = (merge.delta >= v) == mleq::fine_partition_preferred(model);

  Json report = mleq::report_skeleton("noise", scenario);
  Json results;
  results["v"] = v;
  results["mspe_fine"] = fine;
  results["mspe_coarse"] = coarse;
  results["fine_partition_preferred"] = mleq::fine_partition_preferred(model);
  results["monte_carlo"] = {
      {"fine", {{"mean", mc_fine.mean}, {"std_error", mc_fine.std_error}, {"z", z_fine}}},
      {"coarse",
       {{"mean", mc_coarse.mean}, {"std_error", mc_coarse.std_error}, {"z", z_coarse}}}};
  results["within_4se"] = std::abs(z_fine) <= 4.0 && std::abs(z_coarse) <= 4.0;
  results["merge_inequality_agrees"] = merge_agrees;
  report["results"] = results;
  report["summary"] = {"fine MSPE " + mleq::format_sig12(fine) + " (mc " +
                           mleq::format_sig12(mc_fine.mean) + ")",
                       "coarse MSPE " + mleq::format_sig12(coarse) + " (mc " +
                           mleq::format_sig12(mc_coarse.mean) + ")",
                       std::string("fine partition preferred: ") +
                           (mleq::fine_partition_preferred(model) ? "true" : "false")};
  std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium laboratory for the dynamic trust game with complexity-penalized beliefs"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&args](CLI::App* cmd, bool with_mode) {
    cmd->add_option("--scenario", args.scenario_path, "Scenario file (JSON)")->required();
    if (with_mode) cmd->add_option("--mode", args.mode, "Search mode: grid, n1, n2");
    cmd->add_option("--grid", args.grid, "Grid resolution G");
    cmd->add_option("--tolerance", args.tolerance, "Indifference tolerance");
    cmd->add_option("--seed", args.seed, "RNG seed");
    cmd->add_option("--csv", args.csv_path, "CSV output path");
    cmd->add_option("--max-bell", args.max_bell, "Enumeration ceiling on 2n");
  };

  CLI::App* verify = app.add_subcommand("verify", "Verify a strategy/partition candidate");
  add_common(verify, false);
  CLI::App* search = app.add_subcommand("search", "Search for equilibria");
  add_common(search, true);
  CLI::App* bounds = app.add_subcommand("bounds", "Evaluate bound predicates and max-min optima");
  add_common(bounds, false);
  CLI::App* noise = app.add_subcommand("noise", "Finite-sample noise reduced form (n=1)");
  add_common(noise, false);

  CLI11_PARSE(app, argc, argv);

  const auto started = std::chrono::steady_clock::now();
  int status = 0;
  try {
    if (verify->parsed()) {
      status = cmd_verify(args);
    } else if (search->parsed()) {
      status = cmd_search(args);
    } else if (bounds->parsed()) {
      status = cmd_bounds(args);
    } else if (noise->parsed()) {
      status = cmd_noise(args);
    }
  } catch (const mleq::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const mleq::SizeError& e) {
    std::cerr << "size error: " << e.what() << "\n";
    return 3;
  } catch (const mleq::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  const auto elapsed = std::chrono::steady_clock::now() - started;
  std::cerr << "# elapsed_ms="
            << std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() << "\n";
  return status;
}
