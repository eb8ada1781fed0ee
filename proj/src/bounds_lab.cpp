#include "mleqlab/bounds_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "linalg.hpp"
#include "mleqlab/errors.hpp"
#include "mleqlab/rng.hpp"

namespace mleq {

InnerMaxMinResult inner_maxmin(const std::vector<double>& p) {
  const int k = static_cast<int>(p.size());
  if (k < 2) throw std::invalid_argument("inner_maxmin needs at least two cells");
  double total = 0.0;
  for (double mass : p) {
    if (!(mass > 0.0)) {
      throw std::invalid_argument("zero-component: an adjacent pair has zero mass product");
    }
    total += mass;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("p must sum to one");
  std::vector<double> inv_a(k - 1);
  double inv_sum = 0.0;
  for (int i = 0; i + 1 < k; ++i) {
    inv_a[i] = std::sqrt(1.0 / p[i] + 1.0 / p[i + 1]);  // 1/A_i
    inv_sum += inv_a[i];
  }
  InnerMaxMinResult result;
  result.gaps.resize(k - 1);
  for (int i = 0; i + 1 < k; ++i) result.gaps[i] = inv_a[i] / inv_sum;
  result.value = 1.0 / (inv_sum * inv_sum);
  return result;
}

namespace {

double chain_objective(const std::vector<double>& p) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    total += std::sqrt(1.0 / p[i] + 1.0 / p[i + 1]);
  }
  return total;
}

void chain_gradient(const std::vector<double>& p, std::vector<double>& grad) {
  const int k = static_cast<int>(p.size());
  grad.assign(k, 0.0);
  for (int i = 0; i + 1 < k; ++i) {
    const double w = std::sqrt(1.0 / p[i] + 1.0 / p[i + 1]);
    grad[i] += -1.0 / (2.0 * w * p[i] * p[i]);
    grad[i + 1] += -1.0 / (2.0 * w * p[i + 1] * p[i + 1]);
  }
}

void chain_hessian(const std::vector<double>& p, std::vector<double>& hess) {
  const int k = static_cast<int>(p.size());
  hess.assign(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i + 1 < k; ++i) {
    const double w = std::sqrt(1.0 / p[i] + 1.0 / p[i + 1]);
    const int idx[2] = {i, i + 1};
    for (int a : idx) {
      for (int b : idx) {
        double value = -1.0 / (4.0 * w * w * w * p[a] * p[a] * p[b] * p[b]);
        if (a == b) value += 1.0 / (w * p[a] * p[a] * p[a]);
        hess[a * k + b] += value;
      }
    }
  }
}

double projected_gradient_norm(const std::vector<double>& grad) {
  double mean = 0.0;
  for (double g : grad) mean += g;
  mean /= static_cast<double>(grad.size());
  double norm = 0.0;
  for (double g : grad) norm += (g - mean) * (g - mean);
  return std::sqrt(norm);
}

// Equality-constrained Newton descent on the simplex interior.
bool minimize_chain(std::vector<double>& p, double grad_tol, int max_iter) {
  const int k = static_cast<int>(p.size());
  std::vector<double> grad, hess, kkt, rhs, step;
  for (int iter = 0; iter < max_iter; ++iter) {
    chain_gradient(p, grad);
    if (projected_gradient_norm(grad) <= grad_tol) return true;
    chain_hessian(p, hess);
    // KKT system for min g.d + d'Hd/2 subject to sum(d) = 0
    const int dim = k + 1;
    kkt.assign(static_cast<std::size_t>(dim) * dim, 0.0);
    rhs.assign(dim, 0.0);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) kkt[a * dim + b] = hess[a * k + b];
      kkt[a * dim + k] = 1.0;
      kkt[k * dim + a] = 1.0;
      rhs[a] = -grad[a];
    }
    std::vector<double> solution;
    bool use_gradient = !detail::solve_linear(kkt, rhs, dim, solution);
    if (!use_gradient) {
      step.assign(solution.begin(), solution.begin() + k);
      double directional = 0.0;
      for (int a = 0; a < k; ++a) directional += grad[a] * step[a];
      if (!(directional < 0.0)) use_gradient = true;
    }
    if (use_gradient) {
      double mean = 0.0;
      for (double g : grad) mean += g;
      mean /= k;
      step.assign(k, 0.0);
      for (int a = 0; a < k; ++a) step[a] = -(grad[a] - mean);
    }
    const double f0 = chain_objective(p);
    const double pg0 = projected_gradient_norm(grad);
    double alpha = 1.0;
    bool moved = false;
    std::vector<double> trial_grad;
    for (int halving = 0; halving < 60; ++halving) {
      std::vector<double> trial(k);
      bool feasible = true;
      for (int a = 0; a < k; ++a) {
        trial[a] = p[a] + alpha * step[a];
        if (!(trial[a] > 1e-14)) feasible = false;
      }
      if (feasible) {
        // near the optimum the objective decrease drops below double
        // resolution, so a step that halves the gradient also counts
        chain_gradient(trial, trial_grad);
        if (chain_objective(trial) < f0 ||
            projected_gradient_norm(trial_grad) <= 0.5 * pg0) {
          p = std::move(trial);
          moved = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!moved) {
      chain_gradient(p, grad);
      return projected_gradient_norm(grad) <= grad_tol;
    }
  }
  chain_gradient(p, grad);
  return projected_gradient_norm(grad) <= grad_tol;
}

}  // namespace

OuterMaxMinResult outer_maxmin(int k, int num_starts, std::uint64_t seed) {
  if (k < 2 || k > 10) throw std::invalid_argument("outer_maxmin supports 2 <= K <= 10");
  if (num_starts < 1) throw std::invalid_argument("need at least one start");
  const double grad_tol = 1e-11;
  Rng rng(seed);
  std::vector<std::vector<double>> starts;
  starts.emplace_back(k, 1.0 / k);  // uniform point plus random interior starts
  for (int s = 1; s < num_starts + 1; ++s) {
    std::vector<double> p(k);
    double total = 0.0;
    for (int a = 0; a < k; ++a) {
      p[a] = 0.05 + rng.uniform();
      total += p[a];
    }
    for (int a = 0; a < k; ++a) p[a] /= total;
    starts.push_back(std::move(p));
  }

  OuterMaxMinResult best;
  double best_objective = std::numeric_limits<double>::infinity();
  double value_min = std::numeric_limits<double>::infinity();
  double value_max = -std::numeric_limits<double>::infinity();
  for (auto& start : starts) {
    if (!minimize_chain(start, grad_tol, 500)) {
      throw ConvergenceError("outer_maxmin failed to reach the gradient tolerance");
    }
    const double objective = chain_objective(start);
    const double value = 1.0 / (objective * objective);
    value_min = std::min(value_min, value);
    value_max = std::max(value_max, value);
    if (objective < best_objective) {
      best_objective = objective;
      best.p = start;
    }
  }
  best.objective = best_objective;
  best.value = 1.0 / (best_objective * best_objective);
  best.start_spread = value_max - value_min;
  std::vector<double> grad;
  chain_gradient(best.p, grad);
  best.gradient_norm = projected_gradient_norm(grad);
  if (best.start_spread > 1e-8) {
    throw ConvergenceError("outer_maxmin multi-start disagreement above 1e-8");
  }
  return best;
}

namespace {

int cooperating_states(const EquilibriumCandidate& cand) {
  int count = 0;
  for (int s = 0; s < cand.states.n(); ++s) {
    if (cand.dist(s, 1) > 1e-12) ++count;
  }
  return count;
}

void run_falsification(const BoundQuery& query, const GridSearchOptions& options,
                       PredicateReport& report) {
  if (query.states.num_contingencies() > options.max_count) return;
  const GridSearchResult found = grid_search(query.states, query.penalty, options);
  report.search_ran = true;
  for (const auto& eq : found.exact) {
    if (!eq.verdict.is_smleq) continue;
    ++report.equilibria_checked;
    if (cooperating_states(eq.candidate) >= query.m) report.counterexample_found = true;
  }
}

}  // namespace

PredicateReport prop2_predicate(const BoundQuery& query, bool falsify,
                                const GridSearchOptions& options) {
  if (query.m < 1 || query.m > query.states.n()) {
    throw std::invalid_argument("m must lie in [1, n]");
  }
  PredicateReport report;
  const double m = static_cast<double>(query.m);
  report.lhs = 2.0 * query.penalty.c * m * m * m;
  report.rhs = 1.0;
  report.holds = report.lhs > report.rhs;
  if (falsify && report.holds) run_falsification(query, options, report);
  return report;
}

PredicateReport prop3_predicate(const BoundQuery& query, bool falsify,
                                const GridSearchOptions& options) {
  if (query.m < 1 || query.m > query.states.n()) {
    throw std::invalid_argument("m must lie in [1, n]");
  }
  PredicateReport report;
  report.lhs = query.states.max_theta();
  report.rhs = std::sqrt(2.0 * query.penalty.c / static_cast<double>(query.m));
  report.holds = report.lhs < report.rhs;
  if (falsify && report.holds) run_falsification(query, options, report);
  return report;
}

CensusReport full_cooperation_census(const EquilibriumCandidate& cand) {
  const double tol = 1e-9;
  CensusReport report;
  const int n = cand.states.n();
  report.n = n;
  const double full_mass = 1.0 / static_cast<double>(n);
  std::vector<int> full_states;
  for (int s = 0; s < n; ++s) {
    if (std::abs(cand.dist(s, 1) - full_mass) <= tol) full_states.push_back(s);
  }
  report.full_cooperation_count = static_cast<int>(full_states.size());
  report.fraction_ok = 2 * report.full_cooperation_count <= n;
  for (int s : full_states) {
    const int cell = cand.partition.cell_of[contingency_index(s, 0)];
    const double theta = cand.states.theta(s);
    for (int i = 0; i < cand.partition.count(); ++i) {
      if (cand.partition.cell_of[i] != cell || i == contingency_index(s, 0)) continue;
      if (!(cand.dist.probs[i] > 0.0)) continue;  // the pairing partner must carry mass
      const Contingency partner = contingency_from_index(i);
      PartnerBound bound;
      bound.full_state = s;
      bound.partner_state = partner.state;
      bound.partner_history = partner.history;
      bound.partner_rate = static_cast<double>(n) * cand.dist(partner.state, 1);
      if (partner.history == 1) {
        bound.bound = 1.0 - theta / 2.0;
        bound.checked = true;
      } else if (cand.states.theta(partner.state) < theta) {
        bound.bound = (2.0 - theta + cand.states.theta(partner.state)) / 2.0;
        bound.checked = true;
      }
      bound.pass = !bound.checked || bound.partner_rate <= bound.bound + tol;
      if (!bound.pass) report.bounds_ok = false;
      report.partner_bounds.push_back(bound);
    }
  }
  report.pass = report.fraction_ok && report.bounds_ok;
  return report;
}

GenericityReport genericity_check(const StateSpace& states, int max_len, double tol) {
  (void)tol;  // states are exact rationals; comparisons are exact
  if (max_len < 1) throw std::invalid_argument("max combination length must be positive");
  const int n = states.n();
  const int limit = std::min(max_len, n);
  GenericityReport report;
  std::set<std::vector<std::pair<int, int>>> seen;  // canonical (sign, state) zero relations

  auto record = [&](std::vector<std::pair<int, int>> relation) {
    std::sort(relation.begin(), relation.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    if (relation.front().first < 0) {
      for (auto& term : relation) term.first = -term.first;
    }
    if (!seen.insert(relation).second) return;
    std::vector<int> plus, minus;
    for (const auto& [sign, state] : relation) {
      (sign > 0 ? plus : minus).push_back(state);
    }
    auto join = [&](const std::vector<int>& side) {
      std::string out;
      for (std::size_t i = 0; i < side.size(); ++i) {
        if (i > 0) out += "+";
        out += rational_to_string(states.exact(side[i]));
      }
      return out;
    };
    std::string text;
    if (minus.empty()) {
      text = join(plus) + "=0";
    } else if (minus.size() == 1) {
      text = join(plus) + "=" + join(minus);
    } else if (plus.size() == 1) {
      text = join(minus) + "=" + join(plus);
    } else {
      text = join(plus) + "=" + join(minus);
    }
    report.witnesses.push_back(std::move(text));
  };

  std::vector<int> subset;
  auto explore = [&](auto&& self, int next) -> void {
    const int size = static_cast<int>(subset.size());
    if (size >= 2) {
      // iterate sign patterns with the first element fixed positive
      for (int mask = 0; mask < (1 << (size - 1)); ++mask) {
        Rational sum = states.exact(subset[0]);
        std::vector<std::pair<int, int>> relation{{1, subset[0]}};
        for (int j = 1; j < size; ++j) {
          const int sign = (mask >> (j - 1)) & 1 ? -1 : 1;
          if (sign > 0) {
            sum += states.exact(subset[j]);
          } else {
            sum -= states.exact(subset[j]);
          }
          relation.emplace_back(sign, subset[j]);
        }
        if (sum == 0) {
          record(relation);
          continue;
        }
        Rational magnitude = sum < 0 ? Rational(-sum) : sum;
        for (int other = 0; other < n; ++other) {
          if (std::find(subset.begin(), subset.end(), other) != subset.end()) continue;
          if (magnitude == states.exact(other)) {
            auto extended = relation;
            if (sum < 0) {
              for (auto& term : extended) term.first = -term.first;
            }
            extended.emplace_back(-1, other);
            record(extended);
          }
        }
      }
    }
    if (size == limit) return;
    for (int i = next; i < n; ++i) {
      subset.push_back(i);
      self(self, i + 1);
      subset.pop_back();
    }
  };
  explore(explore, 0);

  report.generic = report.witnesses.empty();
  return report;
}

ProbeReport monotone_threshold_probe(const StateSpace& base, const PenaltyConfig& penalty,
                                     const std::vector<double>& delta_grid,
                                     const GridSearchOptions& options) {
  if (delta_grid.empty()) throw std::invalid_argument("delta grid must be non-empty");
  ProbeReport report;
  GridSearchOptions search = options;
  search.monotone_restricted = true;
  search.require_all_states_cooperate = true;
  search.require_strong_assignment = true;
  for (double delta : delta_grid) {
    std::vector<double> thetas(base.thetas().begin(), base.thetas().end() - 1);
    thetas.push_back(delta);
    const StateSpace probe_states = StateSpace::from_doubles(thetas);
    const GridSearchResult found = grid_search(probe_states, penalty, search);
    ProbeEntry entry;
    entry.max_theta = delta;
    entry.equilibria = static_cast<int>(found.exact.size());
    entry.found = !found.exact.empty();
    if (entry.found) {
      if (!report.any_found || delta > report.largest_found) report.largest_found = delta;
      report.any_found = true;
    } else {
      if (!report.any_empty || delta < report.smallest_empty) report.smallest_empty = delta;
      report.any_empty = true;
    }
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace mleq
