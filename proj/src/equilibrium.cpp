#include "mleqlab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "linalg.hpp"
#include "mleqlab/errors.hpp"

namespace mleq {

namespace {

using detail::solve_linear;

std::string contingency_label(int state, int history) {
  return "(s=" + std::to_string(state) + ",h=" + std::to_string(history) + ")";
}

double objective_from_profile(const Partition& partition, const BeliefProfile& profile,
                              const Strategy& sigma, const ErgodicDistribution& dist, double c) {
  double total = c * partition.num_cells;
  for (int i = 0; i < partition.count(); ++i) {
    const double err = profile.rep[partition.cell_of[i]] - sigma.probs[i];
    total += dist.probs[i] * err * err;
  }
  return total;
}

void best_reply_failures(const EquilibriumCandidate& cand, double eps,
                         std::vector<Failure>& fails) {
  for (int s = 0; s < cand.states.n(); ++s) {
    const double gap = cand.belief_gap(s);
    const double theta = cand.states.theta(s);
    for (int h = 0; h < 2; ++h) {
      const double q = cand.sigma(s, h);
      if (q > 0.0 && gap < theta - eps) {
        fails.push_back({"best_reply", contingency_label(s, h) + " action 1", gap - theta});
      }
      if (q < 1.0 && gap > theta + eps) {
        fails.push_back({"best_reply", contingency_label(s, h) + " action 0", theta - gap});
      }
    }
  }
}

void ml_optimality_failures(const EquilibriumCandidate& cand, const VerifyOptions& options,
                            std::vector<Failure>& fails) {
  const MlOptimalResult optimal = ml_optimal_partitions(cand.sigma, cand.states, cand.penalty,
                                                        options.tie_tol, options.max_count);
  const double v = objective_v(cand.partition, cand.sigma, cand.dist, cand.penalty);
  if (v <= optimal.v_min + options.tie_tol) return;
  fails.push_back({"ml_optimality", "partition", optimal.v_min - v});
  const MergeInequalityReport merges =
      check_merge_inequality(cand.partition, cand.sigma, cand.dist, cand.penalty);
  for (const auto& pair : merges.pairs) {
    if (!pair.pass) {
      fails.push_back({"merge_inequality",
                       "cells " + std::to_string(pair.cell_a) + "," + std::to_string(pair.cell_b),
                       pair.margin});
    }
  }
  const AssignmentReport assignment = check_optimal_assignment(
      cand.partition, cand.sigma, cand.dist, cand.profile, /*strong=*/false, options.eps);
  for (const auto& entry : assignment.entries) {
    if (!entry.pass) {
      fails.push_back({"optimal_assignment", contingency_label(entry.state, entry.history),
                       entry.best_distance - entry.own_distance});
    }
  }
}

int resolve_threads(int requested) {
  if (requested > 0) return std::min(requested, 64);
  if (const char* env = std::getenv("MLEQLAB_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return std::min(parsed, 64);
  }
  return 1;
}

}  // namespace

EquilibriumCandidate make_candidate(const StateSpace& states, Strategy sigma, Partition partition,
                                    PenaltyConfig penalty) {
  validate_strategy(sigma);
  validate_penalty(penalty);
  if (sigma.n != states.n()) throw std::invalid_argument("strategy/state-space mismatch");
  if (partition.count() != states.num_contingencies()) {
    throw std::invalid_argument("partition does not cover the contingency space");
  }
  EquilibriumCandidate cand{states, std::move(sigma), std::move(partition), penalty, {}, {}};
  cand.dist = ergodic_distribution(cand.sigma, cand.states);
  cand.profile = representative_strategies(cand.partition, cand.sigma, cand.dist);
  return cand;
}

EquilibriumCandidate zero_trust_candidate(const StateSpace& states, PenaltyConfig penalty) {
  return make_candidate(states, Strategy(states.n(), 0.0),
                        Partition::coarsest(states.num_contingencies()), penalty);
}

Verdict verify_mleq(const EquilibriumCandidate& cand, const VerifyOptions& options) {
  Verdict verdict;
  ml_optimality_failures(cand, options, verdict.failures);
  best_reply_failures(cand, options.eps, verdict.failures);
  verdict.is_mleq = verdict.failures.empty();
  return verdict;
}

Verdict verify_smleq(const EquilibriumCandidate& cand, const VerifyOptions& options) {
  Verdict verdict = verify_mleq(cand, options);
  const AssignmentReport strong = check_optimal_assignment(
      cand.partition, cand.sigma, cand.dist, cand.profile, /*strong=*/true, options.eps);
  for (const auto& entry : strong.entries) {
    if (!entry.pass) {
      verdict.failures.push_back({"strong_assignment", contingency_label(entry.state, entry.history),
                                  entry.best_distance - entry.own_distance});
    }
  }
  verdict.is_smleq = verdict.is_mleq && strong.pass;
  return verdict;
}

bool partition_is_monotone(const Partition& partition, const BeliefProfile& profile, int n,
                           double slack) {
  for (int h = 0; h < 2; ++h) {
    for (int lo = 0; lo + 1 < n; ++lo) {
      const double here = profile.rep[partition.cell_of[contingency_index(lo, h)]];
      for (int hi = lo + 1; hi < n; ++hi) {
        const double there = profile.rep[partition.cell_of[contingency_index(hi, h)]];
        if (here < there - slack) return false;
      }
    }
  }
  return true;
}

Verdict verify_monotone_mleq(const EquilibriumCandidate& cand, const VerifyOptions& options) {
  Verdict verdict;
  const int n = cand.states.n();
  if (!partition_is_monotone(cand.partition, cand.profile, n)) {
    double worst = 0.0;
    for (int h = 0; h < 2; ++h) {
      for (int lo = 0; lo + 1 < n; ++lo) {
        for (int hi = lo + 1; hi < n; ++hi) {
          const double gap = cand.profile.rep[cand.partition.cell_of[contingency_index(lo, h)]] -
                             cand.profile.rep[cand.partition.cell_of[contingency_index(hi, h)]];
          worst = std::min(worst, gap);
        }
      }
    }
    verdict.failures.push_back({"monotone_partition", "partition", worst});
  }
  double v_min = std::numeric_limits<double>::infinity();
  for_each_partition(
      cand.states.num_contingencies(),
      [&](const Partition& p) {
        const BeliefProfile profile = representative_strategies(p, cand.sigma, cand.dist);
        if (partition_is_monotone(p, profile, n)) {
          v_min = std::min(v_min, objective_from_profile(p, profile, cand.sigma, cand.dist,
                                                         cand.penalty.c));
        }
        return true;
      },
      options.max_count);
  const double v = objective_v(cand.partition, cand.sigma, cand.dist, cand.penalty);
  if (v > v_min + options.tie_tol) {
    verdict.failures.push_back({"monotone_ml_optimality", "partition", v_min - v});
  }
  best_reply_failures(cand, options.eps, verdict.failures);
  verdict.is_monotone_mleq = verdict.failures.empty();
  return verdict;
}

Strategy nash_benchmark(const StateSpace& states) {
  Strategy sigma(states.n());
  for (int s = 0; s < states.n(); ++s) {
    sigma.at(s, 1) = 1.0;
    sigma.at(s, 0) = 1.0 - states.theta(s);
  }
  return sigma;
}

std::optional<EquilibriumCandidate> solve_n1(const StateSpace& states, double c) {
  if (states.n() != 1) throw std::invalid_argument("solve_n1 requires a single payoff state");
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  const double theta = states.theta(0);
  double discriminant = theta * theta - 4.0 * c;  // binding quadratic, scaled
  if (discriminant < -1e-12) return std::nullopt;
  discriminant = std::max(discriminant, 0.0);
  const double sigma1 = 0.5 * ((1.0 + theta) + (1.0 - theta) * std::sqrt(discriminant) / theta);
  Strategy sigma(1);
  sigma.at(0, 1) = std::min(1.0, sigma1);
  sigma.at(0, 0) = sigma.at(0, 1) - theta;
  return make_candidate(states, sigma, Partition::finest(2), PenaltyConfig{c});
}

std::optional<EquilibriumCandidate> solve_n1(double theta, double c) {
  return solve_n1(StateSpace::from_doubles({theta}), c);
}

namespace {

// Residual of the binding cell-reassignment condition along the indifference
// manifold, parametrized by the target state's joint cooperation mass b.
struct N2Construction {
  double b = 0.0;
  double s1 = 0.0;
  double s0 = 0.0;
  double residual = 0.0;
};

N2Construction n2_at(double theta, double b) {
  N2Construction out;
  out.b = b;
  out.s1 = theta + b * (1.0 - theta);
  const double a = 0.5 - b;
  out.s0 = b * (1.0 - out.s1) / a;
  const double lhs = b * b * (1.0 - out.s1) * (1.0 - out.s1) / (2.0 * a * (1.0 - b));
  const double rhs = 2.0 * a * b * (out.s1 - out.s0) * (out.s1 - out.s0);
  out.residual = lhs - rhs;
  return out;
}

}  // namespace

SolveN2Result solve_n2(const StateSpace& states, double c) {
  if (states.n() != 2) throw std::invalid_argument("solve_n2 requires exactly two payoff states");
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  SolveN2Result result;
  // states are strictly increasing, so theta_lo > 1/2 covers both
  result.in_regime = states.theta(0) > 0.5 && c > 0.125 && c < 0.25;
  if (!result.in_regime) result.notes.push_back("outside Prop-1 regime");

  const double root_c = std::sqrt(c);
  for (int target = 0; target < 2; ++target) {
    const double theta = states.theta(target);
    const int other = 1 - target;
    if (root_c >= 1.0 || theta * theta < root_c / (1.0 - root_c) - 1e-15) {
      result.notes.push_back("state " + std::to_string(target) +
                             ": cooperation unsustainable at this cost");
      continue;
    }
    // bisection on b in (0, 1/2); the residual is negative near 0 and
    // diverges to +inf as the low cell's own mass vanishes
    double lo = 1e-12;
    double hi = 0.5 - 1e-12;
    double f_lo = n2_at(theta, lo).residual;
    double f_hi = n2_at(theta, hi).residual;
    if (!(f_lo < 0.0) || !(f_hi > 0.0)) {
      throw ConvergenceError("solve_n2 bracketing failed for state " + std::to_string(target));
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (n2_at(theta, mid).residual < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const N2Construction solution = n2_at(theta, 0.5 * (lo + hi));
    if (std::abs(solution.residual) > 1e-10) {
      throw ConvergenceError("solve_n2 root residual above tolerance");
    }
    if (solution.s0 < 0.0 || solution.s0 > 1.0 || solution.s1 > 1.0) {
      result.notes.push_back("state " + std::to_string(target) + ": construction infeasible");
      continue;
    }
    Strategy sigma(2);
    sigma.at(target, 1) = solution.s1;
    sigma.at(target, 0) = solution.s0;
    sigma.at(other, 1) = 0.0;
    sigma.at(other, 0) = 0.0;
    const Partition partition = Partition::from_cells(
        4, {{contingency_index(other, 1), contingency_index(other, 0), contingency_index(target, 0)},
            {contingency_index(target, 1)}});
    EquilibriumCandidate cand = make_candidate(states, sigma, partition, PenaltyConfig{c});
    const Verdict verdict = verify_smleq(cand);
    if (verdict.is_smleq) {
      result.candidates.push_back(std::move(cand));
    } else {
      result.notes.push_back("state " + std::to_string(target) +
                             ": binding construction failed strict verification");
    }
  }
  return result;
}

SolveN2Result solve_n2(double theta_lo, double theta_hi, double c) {
  return solve_n2(StateSpace::from_doubles({theta_lo, theta_hi}), c);
}

std::optional<Strategy> refine_indifference(const StateSpace& states, const Partition& partition,
                                            const Strategy& seed, double residual_tol) {
  const int n = states.n();
  std::vector<int> unknowns;
  for (int i = 0; i < 2 * n; ++i) {
    if (seed.probs[i] > 0.0 && seed.probs[i] < 1.0) unknowns.push_back(i);
  }
  std::vector<int> eq_states;
  for (int s = 0; s < n; ++s) {
    const bool plays1 = seed(s, 0) > 0.0 || seed(s, 1) > 0.0;
    const bool plays0 = seed(s, 0) < 1.0 || seed(s, 1) < 1.0;
    if (plays1 && plays0) eq_states.push_back(s);
  }
  const int m = static_cast<int>(eq_states.size());
  const int k = static_cast<int>(unknowns.size());

  Strategy sigma = seed;
  auto residual = [&](const Strategy& trial, std::vector<double>& out) {
    const ErgodicDistribution dist = ergodic_distribution(trial, states);
    const BeliefProfile profile = representative_strategies(partition, trial, dist);
    out.resize(m);
    for (int j = 0; j < m; ++j) {
      const int s = eq_states[j];
      out[j] = profile.sigma_hat(partition, s, 1) - profile.sigma_hat(partition, s, 0) -
               states.theta(s);
    }
  };
  auto inf_norm = [](const std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm = std::max(norm, std::abs(x));
    return norm;
  };
  auto sq_norm = [](const std::vector<double>& v) {
    double total = 0.0;
    for (double x : v) total += x * x;
    return total;
  };

  std::vector<double> f;
  residual(sigma, f);
  if (m == 0 || k == 0) {
    return inf_norm(f) <= residual_tol ? std::optional<Strategy>(sigma) : std::nullopt;
  }

  std::vector<double> f_hi, f_lo;
  for (int iter = 0; iter < 80; ++iter) {
    if (inf_norm(f) <= residual_tol) return sigma;
    // numeric Jacobian, central differences where the box allows
    std::vector<double> jac(static_cast<std::size_t>(m) * k, 0.0);
    const double step = 1e-7;
    for (int col = 0; col < k; ++col) {
      const int idx = unknowns[col];
      const double base = sigma.probs[idx];
      const double up = std::min(1.0, base + step);
      const double down = std::max(0.0, base - step);
      sigma.probs[idx] = up;
      residual(sigma, f_hi);
      sigma.probs[idx] = down;
      residual(sigma, f_lo);
      sigma.probs[idx] = base;
      const double width = up - down;
      for (int row = 0; row < m; ++row) jac[row * k + col] = (f_hi[row] - f_lo[row]) / width;
    }
    // damped Gauss-Newton step: (J^T J + lambda I) d = -J^T f
    std::vector<double> normal(static_cast<std::size_t>(k) * k, 0.0);
    std::vector<double> rhs(k, 0.0);
    double diag_max = 0.0;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        double total = 0.0;
        for (int row = 0; row < m; ++row) total += jac[row * k + a] * jac[row * k + b];
        normal[a * k + b] = total;
        if (a == b) diag_max = std::max(diag_max, total);
      }
      double total = 0.0;
      for (int row = 0; row < m; ++row) total += jac[row * k + a] * f[row];
      rhs[a] = -total;
    }
    const double ridge = 1e-12 * std::max(1.0, diag_max);
    for (int a = 0; a < k; ++a) normal[a * k + a] += ridge;
    std::vector<double> direction;
    if (!solve_linear(normal, rhs, k, direction)) return std::nullopt;

    const double f_norm = sq_norm(f);
    bool accepted = false;
    double alpha = 1.0;
    for (int halving = 0; halving < 45; ++halving) {
      Strategy trial = sigma;
      for (int col = 0; col < k; ++col) {
        trial.probs[unknowns[col]] =
            std::clamp(sigma.probs[unknowns[col]] + alpha * direction[col], 0.0, 1.0);
      }
      std::vector<double> f_trial;
      residual(trial, f_trial);
      if (sq_norm(f_trial) < f_norm || inf_norm(f_trial) <= residual_tol) {
        sigma = std::move(trial);
        f = std::move(f_trial);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) return std::nullopt;
  }
  return inf_norm(f) <= residual_tol ? std::optional<Strategy>(sigma) : std::nullopt;
}

namespace {

struct Seed {
  Strategy sigma;
  int partition_index = 0;
};

struct LooseCheckInput {
  const StateSpace* states;
  double eps_indiff;
};

bool loose_best_reply_pass(const StateSpace& states, const Strategy& sigma,
                           const Partition& partition, const BeliefProfile& profile,
                           double eps_indiff) {
  for (int s = 0; s < states.n(); ++s) {
    const double gap = profile.sigma_hat(partition, s, 1) - profile.sigma_hat(partition, s, 0);
    const double theta = states.theta(s);
    for (int h = 0; h < 2; ++h) {
      const double q = sigma(s, h);
      if (q > 0.0 && gap < theta - eps_indiff) return false;
      if (q < 1.0 && gap > theta + eps_indiff) return false;
    }
  }
  return true;
}

std::vector<long long> round_key(const Strategy& sigma) {
  std::vector<long long> key;
  key.reserve(sigma.probs.size());
  for (double v : sigma.probs) key.push_back(std::llround(v * 1e7));
  return key;
}

}  // namespace

GridSearchResult grid_search(const StateSpace& states, const PenaltyConfig& penalty,
                             const GridSearchOptions& options) {
  validate_penalty(penalty);
  const int grid = options.grid;
  if (grid < 1 || grid > 50) throw std::invalid_argument("grid resolution must lie in [1, 50]");
  const int n = states.n();
  const int dims = 2 * n;
  if (dims > options.max_count) {
    throw SizeError("grid search needs 2n <= " + std::to_string(options.max_count));
  }
  const double bell = static_cast<double>(bell_number(dims));
  double points_estimate = 1.0;
  for (int d = 0; d < dims; ++d) points_estimate *= grid + 1;
  if (points_estimate * bell > static_cast<double>(options.max_work)) {
    throw BudgetError("grid search budget exceeded: " + std::to_string(points_estimate * bell) +
                      " partition evaluations requested");
  }
  const long long total_points = static_cast<long long>(points_estimate);
  const std::vector<Partition> partitions = all_partitions(dims, options.max_count);
  const double eps_indiff =
      options.eps_indiff > 0.0 ? options.eps_indiff : std::max(1e-9, 1.5 / grid);
  const double v_slack = options.v_slack >= 0.0 ? options.v_slack : 2.0 / grid;
  const int threads = resolve_threads(options.threads);

  auto scan_range = [&](long long begin, long long end, std::vector<Seed>& seeds) {
    Strategy sigma(n);
    std::vector<double> values(partitions.size());
    std::vector<char> admissible(partitions.size());
    std::vector<BeliefProfile> profiles(partitions.size());
    for (long long index = begin; index < end; ++index) {
      long long code = index;
      for (int d = 0; d < dims; ++d) {
        sigma.probs[d] = static_cast<double>(code % (grid + 1)) / grid;
        code /= (grid + 1);
      }
      const ErgodicDistribution dist = ergodic_distribution(sigma, states);
      double v_min = std::numeric_limits<double>::infinity();
      for (std::size_t pi = 0; pi < partitions.size(); ++pi) {
        profiles[pi] = representative_strategies(partitions[pi], sigma, dist);
        admissible[pi] = options.monotone_restricted
                             ? partition_is_monotone(partitions[pi], profiles[pi], n)
                             : char(1);
        values[pi] =
            objective_from_profile(partitions[pi], profiles[pi], sigma, dist, penalty.c);
        if (admissible[pi]) v_min = std::min(v_min, values[pi]);
      }
      for (std::size_t pi = 0; pi < partitions.size(); ++pi) {
        if (!admissible[pi] || values[pi] > v_min + v_slack) continue;
        if (!loose_best_reply_pass(states, sigma, partitions[pi], profiles[pi], eps_indiff)) {
          continue;
        }
        seeds.push_back({sigma, static_cast<int>(pi)});
      }
    }
  };

  std::vector<std::vector<Seed>> chunk_seeds(threads);
  if (threads == 1) {
    scan_range(0, total_points, chunk_seeds[0]);
  } else {
    std::vector<std::thread> workers;
    const long long chunk = (total_points + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const long long begin = t * chunk;
      const long long end = std::min(total_points, begin + chunk);
      workers.emplace_back([&, begin, end, t] { scan_range(begin, end, chunk_seeds[t]); });
    }
    for (auto& worker : workers) worker.join();
  }

  GridSearchResult result;
  result.points_scanned = total_points;
  VerifyOptions verify_options;
  verify_options.eps = options.verify_eps;
  verify_options.tie_tol = options.tie_tol;
  verify_options.max_count = options.max_count;

  std::map<std::pair<std::vector<int>, std::vector<long long>>, bool> seen_exact;
  std::map<std::pair<std::vector<int>, std::vector<long long>>, bool> seen_approx;
  for (const auto& seeds : chunk_seeds) {
    for (const auto& seed : seeds) {
      const Partition& partition = partitions[seed.partition_index];
      ++result.seeds_refined;
      std::optional<Strategy> refined = refine_indifference(states, partition, seed.sigma);
      bool accepted = false;
      if (refined) {
        EquilibriumCandidate cand = make_candidate(states, *refined, partition, penalty);
        const Verdict smleq = verify_smleq(cand, verify_options);
        const Verdict monotone = verify_monotone_mleq(cand, verify_options);
        // the stored failure list belongs to the verification mode in force
        Verdict verdict = options.monotone_restricted ? monotone : smleq;
        verdict.is_mleq = smleq.is_mleq;
        verdict.is_smleq = smleq.is_smleq;
        verdict.is_monotone_mleq = monotone.is_monotone_mleq;
        bool keep = options.monotone_restricted ? monotone.is_monotone_mleq : smleq.is_mleq;
        if (keep && options.require_all_states_cooperate) {
          for (int s = 0; s < n; ++s) {
            if (!(cand.dist(s, 1) > 1e-12)) keep = false;
          }
        }
        if (keep && options.require_strong_assignment) {
          keep = check_optimal_assignment(cand.partition, cand.sigma, cand.dist, cand.profile,
                                          /*strong=*/true, options.verify_eps)
                     .pass;
        }
        if (keep) {
          auto key = std::make_pair(partition.cell_of, round_key(cand.sigma));
          if (!seen_exact.contains(key)) {
            seen_exact.emplace(std::move(key), true);
            result.exact.push_back({std::move(cand), std::move(verdict)});
          }
          accepted = true;
        }
      }
      if (!accepted) {
        auto key = std::make_pair(partition.cell_of, round_key(seed.sigma));
        if (!seen_approx.contains(key)) {
          seen_approx.emplace(std::move(key), true);
          result.approximate.push_back(
              {seed.sigma, partition,
               refined ? "refined candidate failed strict verification"
                       : "indifference refinement did not converge"});
        }
      }
    }
  }

  std::sort(result.exact.begin(), result.exact.end(),
            [](const FoundEquilibrium& a, const FoundEquilibrium& b) {
              const double ca = overall_cooperation_rate(a.candidate.dist);
              const double cb = overall_cooperation_rate(b.candidate.dist);
              if (ca != cb) return ca > cb;
              if (a.candidate.sigma.probs != b.candidate.sigma.probs) {
                return a.candidate.sigma.probs < b.candidate.sigma.probs;
              }
              return a.candidate.partition.cell_of < b.candidate.partition.cell_of;
            });
  return result;
}

}  // namespace mleq
