#ifndef MLEQLAB_EQUILIBRIUM_HPP
#define MLEQLAB_EQUILIBRIUM_HPP

#include <optional>
#include <string>
#include <vector>

#include "mleqlab/partition_engine.hpp"
#include "mleqlab/trust_game.hpp"

namespace mleq {

// A strategy-partition pair together with its derived objects.
struct EquilibriumCandidate {
  StateSpace states;
  Strategy sigma;
  Partition partition;
  PenaltyConfig penalty;
  ErgodicDistribution dist;    // derived
  BeliefProfile profile;       // derived

  double sigma_hat(int state, int history) const {
    return profile.sigma_hat(partition, state, history);
  }
  double belief_gap(int state) const { return sigma_hat(state, 1) - sigma_hat(state, 0); }
};

EquilibriumCandidate make_candidate(const StateSpace& states, Strategy sigma, Partition partition,
                                    PenaltyConfig penalty);

EquilibriumCandidate zero_trust_candidate(const StateSpace& states, PenaltyConfig penalty);

struct Failure {
  std::string condition;
  std::string location;
  double magnitude = 0.0;
};

struct Verdict {
  bool is_mleq = false;
  bool is_smleq = false;
  bool is_monotone_mleq = false;
  std::vector<Failure> failures;
};

struct VerifyOptions {
  double eps = kDefaultEps;          // indifference / assignment tolerance
  double tie_tol = kVTieTolerance;   // objective tie tolerance
  int max_count = kMaxEnumeration;   // enumeration ceiling
};

// (i) the partition attains the minimal V (within tie_tol) over all
// partitions, and (ii) every action played with positive probability is a
// best reply to the cell beliefs; mixing requires indifference within eps.
Verdict verify_mleq(const EquilibriumCandidate& cand, const VerifyOptions& options = {});

// MLEQ plus optimal assignment of every contingency, including null ones.
Verdict verify_smleq(const EquilibriumCandidate& cand, const VerifyOptions& options = {});

// The partition must be monotone w.r.t sigma (beliefs weakly decreasing in
// theta for each history) and minimize V among monotone partitions.
Verdict verify_monotone_mleq(const EquilibriumCandidate& cand, const VerifyOptions& options = {});

// Is the partition monotone w.r.t the given beliefs?
bool partition_is_monotone(const Partition& partition, const BeliefProfile& profile, int n,
                           double slack = 1e-12);

// Full-cooperation symmetric Nash profile: sigma(theta,1)=1, sigma(theta,0)=1-theta.
Strategy nash_benchmark(const StateSpace& states);

// Maximally cooperative trusting MLEQ for n=1, or nothing when c > theta^2/4.
std::optional<EquilibriumCandidate> solve_n1(const StateSpace& states, double c);
std::optional<EquilibriumCandidate> solve_n1(double theta, double c);

struct SolveN2Result {
  std::vector<EquilibriumCandidate> candidates;  // pass verify_smleq
  bool in_regime = true;                         // theta_lo, theta_hi > 1/2 and c in (1/8, 1/4)
  std::vector<std::string> notes;
};

// For each state, the two-cell construction that isolates (theta,1), with the
// other state playing zero trust; the reassignment inequality is solved at
// its binding point by one-dimensional root-finding.
SolveN2Result solve_n2(const StateSpace& states, double c);
SolveN2Result solve_n2(double theta_lo, double theta_hi, double c);

struct FoundEquilibrium {
  EquilibriumCandidate candidate;
  Verdict verdict;
};

struct ApproximateCandidate {
  Strategy sigma;
  Partition partition;
  std::string reason;
};

struct GridSearchOptions {
  int grid = 20;
  double eps_indiff = -1.0;  // loose screening tolerance; default 1.5/grid
  double v_slack = -1.0;     // objective slack for seeding; default 2.0/grid
  double verify_eps = kDefaultEps;
  double tie_tol = kVTieTolerance;
  int max_count = kMaxEnumeration;
  long long max_work = 50'000'000;  // grid points x partitions budget
  int threads = 0;                  // 0: MLEQLAB_THREADS env var, else 1
  bool monotone_restricted = false;
  bool require_all_states_cooperate = false;
  bool require_strong_assignment = false;  // optimal assignment of null contingencies too
};

struct GridSearchResult {
  std::vector<FoundEquilibrium> exact;
  std::vector<ApproximateCandidate> approximate;
  long long points_scanned = 0;
  long long seeds_refined = 0;
};

// Scans sigma over {0, 1/G, ..., 1}^{2n}. Near-consistent pairs (sigma,
// partition) seed a Gauss-Newton solve of the indifference equations with the
// cell structure held fixed; refined candidates are re-verified strictly.
GridSearchResult grid_search(const StateSpace& states, const PenaltyConfig& penalty,
                             const GridSearchOptions& options = {});

// Fixes the partition and the 0/1 pattern of the seed, solves
// sigma_hat(theta,1) - sigma_hat(theta,0) = theta for every state whose
// support contains both actions, and clamps to [0,1]. Empty on divergence.
std::optional<Strategy> refine_indifference(const StateSpace& states, const Partition& partition,
                                            const Strategy& seed, double residual_tol = 1e-11);

}  // namespace mleq

#endif
