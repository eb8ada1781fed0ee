#ifndef MLEQLAB_PARTITION_ENGINE_HPP
#define MLEQLAB_PARTITION_ENGINE_HPP

#include <vector>

#include "mleqlab/partition.hpp"
#include "mleqlab/trust_game.hpp"

namespace mleq {

// Complexity cost per partition cell.
struct PenaltyConfig {
  double c = 0.0;
};

PenaltyConfig validate_penalty(const PenaltyConfig& cfg);

// Two partitions whose objectives differ by less than this are treated as
// tied minimizers; binding equilibria produce exact mathematical ties that
// floating point resolves only to ~1e-16.
inline constexpr double kVTieTolerance = 1e-12;

// Default tolerance for indifference / assignment comparisons on analytic
// candidates.
inline constexpr double kDefaultEps = 1e-9;

// Cell beliefs: the p-weighted mean of sigma over each cell. Cells with zero
// long-run mass fall back to the unweighted mean of their members.
struct BeliefProfile {
  std::vector<double> rep;        // representative strategy per cell
  std::vector<double> cell_mass;  // p_sigma(cell)

  double sigma_hat(const Partition& partition, int state, int history) const {
    return rep[partition.cell_of[contingency_index(state, history)]];
  }
};

BeliefProfile representative_strategies(const Partition& partition, const Strategy& sigma,
                                        const ErgodicDistribution& dist);

// Mean squared prediction error of the cell beliefs, weighted by p_sigma.
double mspe(const Partition& partition, const Strategy& sigma, const ErgodicDistribution& dist);

// V = c * |partition| + MSPE
double objective_v(const Partition& partition, const Strategy& sigma,
                   const ErgodicDistribution& dist, const PenaltyConfig& cfg);

struct MergeDelta {
  double delta = 0.0;
  bool both_null = false;  // merging two zero-mass cells; delta defined as 0
};

// MSPE increase from merging two cells:
//   m_a m_b / (m_a + m_b) * (rep_a - rep_b)^2
// Must equal the direct recomputation mspe(merged) - mspe(original).
MergeDelta merge_delta_mspe(const Partition& partition, int cell_a, int cell_b,
                            const BeliefProfile& profile, const ErgodicDistribution& dist);

struct MergePairCheck {
  int cell_a = 0;
  int cell_b = 0;
  double delta = 0.0;
  double margin = 0.0;  // delta - c; negative means the merge would pay
  bool pass = false;
};

struct MergeInequalityReport {
  bool pass = true;
  std::vector<MergePairCheck> pairs;
};

// Necessary condition for ML-optimality: no pairwise merge may raise MSPE by
// less than the cell cost c.
MergeInequalityReport check_merge_inequality(const Partition& partition, const Strategy& sigma,
                                             const ErgodicDistribution& dist,
                                             const PenaltyConfig& cfg);

struct AssignmentCheck {
  int state = 0;
  int history = 0;
  double own_distance = 0.0;
  double best_distance = 0.0;
  bool pass = false;
};

struct AssignmentReport {
  bool pass = true;
  std::vector<AssignmentCheck> entries;
};

// Every checked contingency must sit in a cell whose belief is (weakly)
// nearest to its own sigma value. strong=true checks zero-mass contingencies
// too; otherwise only the support of p_sigma.
AssignmentReport check_optimal_assignment(const Partition& partition, const Strategy& sigma,
                                          const ErgodicDistribution& dist,
                                          const BeliefProfile& profile, bool strong, double eps);

struct LloydResult {
  Partition partition;
  int iterations = 0;
  bool dropped_cells = false;
};

// Alternates belief recomputation with nearest-belief reassignment of the
// positive-mass contingencies until a fixed point. Ties keep the current
// cell; cells emptied by reassignment are dropped.
LloydResult lloyd_iteration(const Strategy& sigma, const ErgodicDistribution& dist, int k,
                            const Partition& init);

struct MlOptimalResult {
  double v_min = 0.0;
  std::vector<Partition> argmin;  // every partition within tie_tol of v_min
};

// Exhaustive minimizers of V over all partitions of the 2n contingencies.
MlOptimalResult ml_optimal_partitions(const Strategy& sigma, const StateSpace& states,
                                      const PenaltyConfig& cfg, double tie_tol = kVTieTolerance,
                                      int max_count = kMaxEnumeration);

}  // namespace mleq

#endif
