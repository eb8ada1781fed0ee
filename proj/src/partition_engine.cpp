#include "mleqlab/partition_engine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mleq {

PenaltyConfig validate_penalty(const PenaltyConfig& cfg) {
  if (!(cfg.c > 0.0)) throw std::invalid_argument("complexity cost c must be strictly positive");
  return cfg;
}

BeliefProfile representative_strategies(const Partition& partition, const Strategy& sigma,
                                        const ErgodicDistribution& dist) {
  const int count = partition.count();
  if (count != 2 * sigma.n || dist.n != sigma.n) {
    throw std::invalid_argument("partition/strategy/distribution dimension mismatch");
  }
  BeliefProfile profile;
  profile.rep.assign(partition.num_cells, 0.0);
  profile.cell_mass.assign(partition.num_cells, 0.0);
  std::vector<double> weighted(partition.num_cells, 0.0);
  std::vector<int> members(partition.num_cells, 0);
  std::vector<int> sole_member(partition.num_cells, -1);
  std::vector<double> unweighted(partition.num_cells, 0.0);
  for (int i = 0; i < count; ++i) {
    const int cell = partition.cell_of[i];
    profile.cell_mass[cell] += dist.probs[i];
    weighted[cell] += dist.probs[i] * sigma.probs[i];
    unweighted[cell] += sigma.probs[i];
    sole_member[cell] = i;
    ++members[cell];
  }
  for (int cell = 0; cell < partition.num_cells; ++cell) {
    if (members[cell] == 1) {
      profile.rep[cell] = sigma.probs[sole_member[cell]];  // exact, no round trip
    } else if (profile.cell_mass[cell] > 0.0) {
      profile.rep[cell] = weighted[cell] / profile.cell_mass[cell];
    } else {
      profile.rep[cell] = unweighted[cell] / members[cell];
    }
  }
  return profile;
}

double mspe(const Partition& partition, const Strategy& sigma, const ErgodicDistribution& dist) {
  const BeliefProfile profile = representative_strategies(partition, sigma, dist);
  double total = 0.0;
  for (int i = 0; i < partition.count(); ++i) {
    const double err = profile.rep[partition.cell_of[i]] - sigma.probs[i];
    total += dist.probs[i] * err * err;
  }
  return total;
}

double objective_v(const Partition& partition, const Strategy& sigma,
                   const ErgodicDistribution& dist, const PenaltyConfig& cfg) {
  return cfg.c * partition.num_cells + mspe(partition, sigma, dist);
}

MergeDelta merge_delta_mspe(const Partition& partition, int cell_a, int cell_b,
                            const BeliefProfile& profile, const ErgodicDistribution& dist) {
  (void)dist;
  if (cell_a == cell_b) throw std::invalid_argument("merge requires two distinct cells");
  if (cell_a < 0 || cell_b < 0 || cell_a >= partition.num_cells || cell_b >= partition.num_cells) {
    throw std::invalid_argument("cell id out of range");
  }
  const double ma = profile.cell_mass[cell_a];
  const double mb = profile.cell_mass[cell_b];
  MergeDelta out;
  if (ma <= 0.0 && mb <= 0.0) {
    out.both_null = true;
    out.delta = 0.0;
    return out;
  }
  if (ma <= 0.0 || mb <= 0.0) {
    out.delta = 0.0;  // a null cell merges for free
    return out;
  }
  const double gap = profile.rep[cell_a] - profile.rep[cell_b];
  out.delta = (ma * mb) / (ma + mb) * gap * gap;
  return out;
}

MergeInequalityReport check_merge_inequality(const Partition& partition, const Strategy& sigma,
                                             const ErgodicDistribution& dist,
                                             const PenaltyConfig& cfg) {
  const BeliefProfile profile = representative_strategies(partition, sigma, dist);
  MergeInequalityReport report;
  for (int a = 0; a < partition.num_cells; ++a) {
    for (int b = a + 1; b < partition.num_cells; ++b) {
      const MergeDelta delta = merge_delta_mspe(partition, a, b, profile, dist);
      MergePairCheck check;
      check.cell_a = a;
      check.cell_b = b;
      check.delta = delta.delta;
      check.margin = delta.delta - cfg.c;
      check.pass = check.margin >= 0.0;
      if (!check.pass) report.pass = false;
      report.pairs.push_back(check);
    }
  }
  return report;
}

AssignmentReport check_optimal_assignment(const Partition& partition, const Strategy& sigma,
                                          const ErgodicDistribution& dist,
                                          const BeliefProfile& profile, bool strong, double eps) {
  AssignmentReport report;
  for (int i = 0; i < partition.count(); ++i) {
    if (!strong && !(dist.probs[i] > 0.0)) continue;
    AssignmentCheck check;
    const Contingency contingency = contingency_from_index(i);
    check.state = contingency.state;
    check.history = contingency.history;
    check.own_distance = std::abs(profile.rep[partition.cell_of[i]] - sigma.probs[i]);
    double best = std::numeric_limits<double>::infinity();
    for (int cell = 0; cell < partition.num_cells; ++cell) {
      best = std::min(best, std::abs(profile.rep[cell] - sigma.probs[i]));
    }
    check.best_distance = best;
    check.pass = check.own_distance <= best + eps;
    if (!check.pass) report.pass = false;
    report.entries.push_back(check);
  }
  return report;
}

LloydResult lloyd_iteration(const Strategy& sigma, const ErgodicDistribution& dist, int k,
                            const Partition& init) {
  if (init.num_cells != k) throw std::invalid_argument("initial partition must have k cells");
  LloydResult result;
  result.partition = init;
  const int count = init.count();
  const int max_iterations = 1000;
  for (int iter = 0; iter < max_iterations; ++iter) {
    result.iterations = iter + 1;
    const BeliefProfile profile = representative_strategies(result.partition, sigma, dist);
    std::vector<int> labels = result.partition.cell_of;
    bool changed = false;
    for (int i = 0; i < count; ++i) {
      if (!(dist.probs[i] > 0.0)) continue;  // null contingencies stay put
      const int current = labels[i];
      int best_cell = current;
      double best_distance = std::abs(profile.rep[current] - sigma.probs[i]);
      for (int cell = 0; cell < result.partition.num_cells; ++cell) {
        const double d = std::abs(profile.rep[cell] - sigma.probs[i]);
        if (d < best_distance) {  // strict: ties keep the current cell
          best_distance = d;
          best_cell = cell;
        }
      }
      if (best_cell != current) {
        labels[i] = best_cell;
        changed = true;
      }
    }
    if (!changed) break;
    Partition next = canonical_partition(labels);
    if (next.num_cells < result.partition.num_cells) result.dropped_cells = true;
    result.partition = next;
  }
  return result;
}

MlOptimalResult ml_optimal_partitions(const Strategy& sigma, const StateSpace& states,
                                      const PenaltyConfig& cfg, double tie_tol, int max_count) {
  validate_penalty(cfg);
  const ErgodicDistribution dist = ergodic_distribution(sigma, states);
  const int count = states.num_contingencies();
  MlOptimalResult result;
  result.v_min = std::numeric_limits<double>::infinity();
  for_each_partition(
      count,
      [&](const Partition& p) {
        result.v_min = std::min(result.v_min, objective_v(p, sigma, dist, cfg));
        return true;
      },
      max_count);
  for_each_partition(
      count,
      [&](const Partition& p) {
        if (objective_v(p, sigma, dist, cfg) <= result.v_min + tie_tol) {
          result.argmin.push_back(p);
        }
        return true;
      },
      max_count);
  return result;
}

}  // namespace mleq
