#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mleqlab/bounds_lab.hpp"
#include "mleqlab/equilibrium.hpp"
#include "mleqlab/errors.hpp"
#include "mleqlab/sample_noise.hpp"

namespace py = pybind11;
using namespace mleq;

namespace {

StateSpace make_state_space(const py::object& thetas) {
  std::vector<Rational> exact;
  for (const auto& item : thetas) {
    if (py::isinstance<py::str>(item)) {
      exact.push_back(parse_rational(item.cast<std::string>()));
    } else {
      exact.emplace_back(item.cast<double>());
    }
  }
  return StateSpace(std::move(exact));
}

Strategy make_strategy(const StateSpace& states, const std::vector<double>& probs) {
  Strategy sigma(states.n());
  if (probs.size() != sigma.probs.size()) {
    throw std::invalid_argument("expected 2n probabilities in contingency-index order");
  }
  sigma.probs = probs;
  return validate_strategy(sigma);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Equilibrium laboratory for the dynamic trust game with complexity-penalized beliefs";

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<SizeError>(m, "SizeError");
  py::register_exception<BudgetError>(m, "BudgetError");
  py::register_exception<ConvergenceError>(m, "ConvergenceError");
  py::register_exception<ModelError>(m, "ModelError");

  py::class_<StateSpace>(m, "StateSpace")
      .def(py::init(&make_state_space), py::arg("thetas"),
           "Thetas as floats or exact strings like '3/5' or '0.21'")
      .def_property_readonly("n", &StateSpace::n)
      .def_property_readonly("thetas", &StateSpace::thetas)
      .def("theta", &StateSpace::theta)
      .def("__repr__", [](const StateSpace& s) {
        std::string out = "StateSpace([";
        for (int i = 0; i < s.n(); ++i) {
          if (i) out += ", ";
          out += rational_to_string(s.exact(i));
        }
        return out + "])";
      });

  py::class_<Strategy>(m, "Strategy")
      .def(py::init(&make_strategy), py::arg("states"), py::arg("probs"))
      .def_readonly("probs", &Strategy::probs)
      .def("__call__", [](const Strategy& s, int state, int history) { return s(state, history); });

  py::class_<ErgodicDistribution>(m, "ErgodicDistribution")
      .def_readonly("probs", &ErgodicDistribution::probs)
      .def("__call__",
           [](const ErgodicDistribution& d, int state, int history) { return d(state, history); });

  py::class_<Partition>(m, "Partition")
      .def(py::init([](int count, const std::vector<std::vector<int>>& cells) {
             return Partition::from_cells(count, cells);
           }),
           py::arg("count"), py::arg("cells"))
      .def_static("finest", &Partition::finest)
      .def_static("coarsest", &Partition::coarsest)
      .def_readonly("cell_of", &Partition::cell_of)
      .def_property_readonly("num_cells", [](const Partition& p) { return p.num_cells; })
      .def("cells", &Partition::cells)
      .def("__eq__", [](const Partition& a, const Partition& b) { return a == b; })
      .def("__repr__", [](const Partition& p) { return "Partition" + p.to_string(); });

  py::class_<PenaltyConfig>(m, "PenaltyConfig")
      .def(py::init([](double c) { return validate_penalty(PenaltyConfig{c}); }), py::arg("c"))
      .def_readonly("c", &PenaltyConfig::c);

  py::class_<BeliefProfile>(m, "BeliefProfile")
      .def_readonly("rep", &BeliefProfile::rep)
      .def_readonly("cell_mass", &BeliefProfile::cell_mass);

  py::class_<EquilibriumCandidate>(m, "EquilibriumCandidate")
      .def_readonly("sigma", &EquilibriumCandidate::sigma)
      .def_readonly("partition", &EquilibriumCandidate::partition)
      .def_readonly("dist", &EquilibriumCandidate::dist)
      .def_readonly("profile", &EquilibriumCandidate::profile)
      .def("sigma_hat", &EquilibriumCandidate::sigma_hat)
      .def("belief_gap", &EquilibriumCandidate::belief_gap)
      .def_property_readonly("cooperation_rate", [](const EquilibriumCandidate& c) {
        return overall_cooperation_rate(c.dist);
      });

  py::class_<Failure>(m, "Failure")
      .def_readonly("condition", &Failure::condition)
      .def_readonly("location", &Failure::location)
      .def_readonly("magnitude", &Failure::magnitude)
      .def("__repr__", [](const Failure& f) {
        return "Failure(" + f.condition + " at " + f.location + ")";
      });

  py::class_<Verdict>(m, "Verdict")
      .def_readonly("is_mleq", &Verdict::is_mleq)
      .def_readonly("is_smleq", &Verdict::is_smleq)
      .def_readonly("is_monotone_mleq", &Verdict::is_monotone_mleq)
      .def_readonly("failures", &Verdict::failures);

  // trust game
  m.def("payoff", &payoff, py::arg("action"), py::arg("next_action"), py::arg("theta"));
  m.def("ergodic_distribution", &ergodic_distribution, py::arg("sigma"), py::arg("states"));
  m.def(
      "best_replies",
      [](double hat1, double hat0, double theta, double eps) {
        const BestReplySet replies = best_replies(hat1, hat0, theta, eps);
        std::vector<int> actions;
        if (replies.defect) actions.push_back(0);
        if (replies.cooperate) actions.push_back(1);
        return actions;
      },
      py::arg("sigma_hat1"), py::arg("sigma_hat0"), py::arg("theta"), py::arg("eps") = kDefaultEps);
  m.def("simulate_trajectory", &simulate_trajectory, py::arg("sigma"), py::arg("state"),
        py::arg("initial_action"), py::arg("horizon"), py::arg("seed"));
  m.def("overall_cooperation_rate", &overall_cooperation_rate);

  // partition engine
  m.def("representative_strategies", &representative_strategies);
  m.def("mspe", &mspe);
  m.def("objective_v", &objective_v);
  m.def(
      "merge_delta_mspe",
      [](const Partition& partition, int cell_a, int cell_b, const BeliefProfile& profile,
         const ErgodicDistribution& dist) {
        const MergeDelta delta = merge_delta_mspe(partition, cell_a, cell_b, profile, dist);
        return py::make_tuple(delta.delta, delta.both_null);
      });
  m.def("check_merge_inequality",
        [](const Partition& partition, const Strategy& sigma, const ErgodicDistribution& dist,
           const PenaltyConfig& cfg) { return check_merge_inequality(partition, sigma, dist, cfg).pass; });
  m.def("check_optimal_assignment",
        [](const Partition& partition, const Strategy& sigma, const ErgodicDistribution& dist,
           bool strong, double eps) {
          const BeliefProfile profile = representative_strategies(partition, sigma, dist);
          return check_optimal_assignment(partition, sigma, dist, profile, strong, eps).pass;
        },
        py::arg("partition"), py::arg("sigma"), py::arg("dist"), py::arg("strong") = false,
        py::arg("eps") = kDefaultEps);
  m.def("lloyd_iteration",
        [](const Strategy& sigma, const ErgodicDistribution& dist, int k, const Partition& init) {
          const LloydResult result = lloyd_iteration(sigma, dist, k, init);
          return py::make_tuple(result.partition, result.iterations, result.dropped_cells);
        });
  m.def("bell_number", &bell_number);
  m.def("all_partitions", &all_partitions, py::arg("count"),
        py::arg("max_count") = kMaxEnumeration);
  m.def(
      "ml_optimal_partitions",
      [](const Strategy& sigma, const StateSpace& states, const PenaltyConfig& cfg,
         double tie_tol, int max_count) {
        const MlOptimalResult result = ml_optimal_partitions(sigma, states, cfg, tie_tol, max_count);
        return py::make_tuple(result.v_min, result.argmin);
      },
      py::arg("sigma"), py::arg("states"), py::arg("cfg"), py::arg("tie_tol") = kVTieTolerance,
      py::arg("max_count") = kMaxEnumeration);

  // equilibrium
  m.def("make_candidate", &make_candidate);
  m.def("zero_trust_candidate", &zero_trust_candidate);
  m.def("verify_mleq",
        [](const EquilibriumCandidate& cand, double eps) {
          VerifyOptions options;
          options.eps = eps;
          return verify_mleq(cand, options);
        },
        py::arg("candidate"), py::arg("eps") = kDefaultEps);
  m.def("verify_smleq",
        [](const EquilibriumCandidate& cand, double eps) {
          VerifyOptions options;
          options.eps = eps;
          return verify_smleq(cand, options);
        },
        py::arg("candidate"), py::arg("eps") = kDefaultEps);
  m.def("verify_monotone_mleq",
        [](const EquilibriumCandidate& cand, double eps) {
          VerifyOptions options;
          options.eps = eps;
          return verify_monotone_mleq(cand, options);
        },
        py::arg("candidate"), py::arg("eps") = kDefaultEps);
  m.def("nash_benchmark", &nash_benchmark);
  m.def("solve_n1", [](double theta, double c) { return solve_n1(theta, c); }, py::arg("theta"),
        py::arg("c"));
  m.def(
      "solve_n2",
      [](double theta_lo, double theta_hi, double c) {
        const SolveN2Result result = solve_n2(theta_lo, theta_hi, c);
        return py::make_tuple(result.candidates, result.in_regime, result.notes);
      },
      py::arg("theta_lo"), py::arg("theta_hi"), py::arg("c"));
  m.def(
      "grid_search",
      [](const StateSpace& states, double c, int grid, double eps_indiff) {
        GridSearchOptions options;
        options.grid = grid;
        options.eps_indiff = eps_indiff;
        const GridSearchResult result = grid_search(states, PenaltyConfig{c}, options);
        py::list exact;
        for (const auto& eq : result.exact) exact.append(py::make_tuple(eq.candidate, eq.verdict));
        return exact;
      },
      py::arg("states"), py::arg("c"), py::arg("grid") = 20, py::arg("eps_indiff") = -1.0);

  // bounds lab
  m.def("inner_maxmin", [](const std::vector<double>& p) {
    const InnerMaxMinResult result = inner_maxmin(p);
    return py::make_tuple(result.gaps, result.value);
  });
  m.def(
      "outer_maxmin",
      [](int k) {
        const OuterMaxMinResult result = outer_maxmin(k);
        return py::make_tuple(result.p, result.value);
      },
      py::arg("k"));
  m.def(
      "prop2_predicate",
      [](double c, int m) {
        BoundQuery query{StateSpace::from_doubles({0.5}), PenaltyConfig{c}, m, 0.0};
        return prop2_predicate(query).holds;
      },
      py::arg("c"), py::arg("m"));
  m.def(
      "prop3_predicate",
      [](const StateSpace& states, double c, int m) {
        BoundQuery query{states, PenaltyConfig{c}, m, 0.0};
        return prop3_predicate(query).holds;
      },
      py::arg("states"), py::arg("c"), py::arg("m"));
  m.def("full_cooperation_census", [](const EquilibriumCandidate& cand) {
    const CensusReport report = full_cooperation_census(cand);
    return py::make_tuple(report.full_cooperation_count, report.pass);
  });
  m.def(
      "genericity_check",
      [](const StateSpace& states, int max_len) {
        const GenericityReport report = genericity_check(states, max_len);
        return py::make_tuple(report.generic, report.witnesses);
      },
      py::arg("states"), py::arg("max_len"));
  m.def(
      "monotone_threshold_probe",
      [](const StateSpace& base, double c, const std::vector<double>& delta_grid, int grid) {
        GridSearchOptions options;
        options.grid = grid;
        const ProbeReport report =
            monotone_threshold_probe(base, PenaltyConfig{c}, delta_grid, options);
        py::list entries;
        for (const auto& entry : report.entries) {
          entries.append(py::make_tuple(entry.max_theta, entry.found, entry.equilibria));
        }
        return entries;
      },
      py::arg("base"), py::arg("c"), py::arg("delta_grid"), py::arg("grid") = 10);

  // sample noise
  py::class_<NoisyObservationModel>(m, "NoisyObservationModel")
      .def_readonly("sigma0", &NoisyObservationModel::sigma0)
      .def_readonly("sigma1", &NoisyObservationModel::sigma1)
      .def_readonly("v", &NoisyObservationModel::v)
      .def_readonly("p0", &NoisyObservationModel::p0)
      .def_readonly("p1", &NoisyObservationModel::p1);
  m.def("make_noise_model",
        [](double sigma0, double sigma1, double v) { return make_noise_model(sigma0, sigma1, v); },
        py::arg("sigma0"), py::arg("sigma1"), py::arg("v"));
  m.def("expected_mspe_fine", &expected_mspe_fine);
  m.def("expected_mspe_coarse", &expected_mspe_coarse);
  m.def("fine_partition_preferred", &fine_partition_preferred);
  m.def(
      "monte_carlo_mspe",
      [](const NoisyObservationModel& model, const std::string& partition, long long samples,
         std::uint64_t seed) {
        const NoisePartition which =
            partition == "fine" ? NoisePartition::Fine : NoisePartition::Coarse;
        const MonteCarloMspe result = monte_carlo_mspe(model, which, samples, seed);
        return py::make_tuple(result.mean, result.std_error);
      },
      py::arg("model"), py::arg("partition"), py::arg("samples") = 1000000, py::arg("seed") = 1);
}
