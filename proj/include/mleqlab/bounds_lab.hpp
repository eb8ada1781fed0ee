#ifndef MLEQLAB_BOUNDS_LAB_HPP
#define MLEQLAB_BOUNDS_LAB_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mleqlab/equilibrium.hpp"

namespace mleq {

// Auxiliary max-min problem over cell masses p and belief gaps q:
//   max_p max_q min_k  A_k^2 q_k^2,   A_k = sqrt(p_k p_{k+1} / (p_k + p_{k+1}))
// The inner solution equalizes A_k q_k; the outer one minimizes
//   sum_k sqrt(1/p_k + 1/p_{k+1})
// over the simplex, a strictly convex problem.

struct InnerMaxMinResult {
  std::vector<double> gaps;  // q, summing to 1
  double value = 0.0;        // 1 / (sum_j 1/A_j)^2
};

InnerMaxMinResult inner_maxmin(const std::vector<double>& p);

struct OuterMaxMinResult {
  std::vector<double> p;
  double value = 0.0;
  double objective = 0.0;        // minimized sum of sqrt terms
  double gradient_norm = 0.0;    // projected gradient at the optimum
  double start_spread = 0.0;     // max-min of the value across starts
};

OuterMaxMinResult outer_maxmin(int k, int num_starts = 10, std::uint64_t seed = 20240901);

struct BoundQuery {
  StateSpace states;
  PenaltyConfig penalty;
  int m = 1;           // number of cooperating states under scrutiny
  double delta = 0.0;  // monotone-threshold parameter (probe only)
};

struct PredicateReport {
  bool holds = false;  // the impossibility hypothesis is in force
  double lhs = 0.0;
  double rhs = 0.0;
  bool search_ran = false;
  bool counterexample_found = false;
  int equilibria_checked = 0;
};

// No SMLEQ sustains cooperation in m states when 2 c m^3 > 1. The optional
// falsification search scans for a strong equilibrium with at least m
// cooperating states and reports any counterexample instead of asserting.
PredicateReport prop2_predicate(const BoundQuery& query, bool falsify = false,
                                const GridSearchOptions& options = {});

// Same machinery for the low-cost obstruction max(theta) < sqrt(2c/m).
PredicateReport prop3_predicate(const BoundQuery& query, bool falsify = false,
                                const GridSearchOptions& options = {});

struct PartnerBound {
  int full_state = 0;
  int partner_state = 0;
  int partner_history = 0;
  double bound = 0.0;         // on the partner's within-state cooperation rate
  double partner_rate = 0.0;  // n * p(theta', 1)
  bool pass = false;
  bool checked = false;  // the h=0 branch only binds for lower partner states
};

struct CensusReport {
  int n = 0;
  int full_cooperation_count = 0;
  bool fraction_ok = false;  // full-cooperation states are at most half
  std::vector<PartnerBound> partner_bounds;
  bool bounds_ok = true;
  bool pass = false;
};

// Counts states at full cooperation (p(theta,1) = 1/n within 1e-9) for a
// strong equilibrium and checks the paired-cell rate bounds. A failing
// report is a falsification event, not a silent pass.
CensusReport full_cooperation_census(const EquilibriumCandidate& cand);

struct GenericityReport {
  bool generic = false;
  std::vector<std::string> witnesses;
};

// A state space is generic when no signed combination of up to max_len
// distinct states vanishes or reproduces another state. Decided in exact
// rational arithmetic; the tol parameter is accepted for interface
// compatibility and ignored because states are stored exactly.
GenericityReport genericity_check(const StateSpace& states, int max_len, double tol = 0.0);

struct ProbeEntry {
  double max_theta = 0.0;
  bool found = false;
  int equilibria = 0;
};

struct ProbeReport {
  std::vector<ProbeEntry> entries;
  bool any_found = false;
  bool any_empty = false;
  double largest_found = 0.0;
  double smallest_empty = 0.0;
};

// Replaces the top state with each delta in turn and searches for a monotone
// ML equilibrium with positive cooperation in every state (grid plus
// indifference refinement, exhaustive over partitions). The search requires
// optimal assignment of every contingency, the strong reading: without it a
// full-cooperation state can park its null history in a distant cell and the
// threshold never binds. Reports the largest delta at which an equilibrium
// was found and the smallest certified empty.
ProbeReport monotone_threshold_probe(const StateSpace& base, const PenaltyConfig& penalty,
                                     const std::vector<double>& delta_grid,
                                     const GridSearchOptions& options = {});

}  // namespace mleq

#endif
