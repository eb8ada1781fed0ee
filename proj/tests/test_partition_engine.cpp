#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mleqlab/errors.hpp"
#include "mleqlab/partition_engine.hpp"
#include "mleqlab/rng.hpp"

using namespace mleq;

namespace {

Strategy strategy_n1(double s0, double s1) {
  Strategy sigma(1);
  sigma.at(0, 0) = s0;
  sigma.at(0, 1) = s1;
  return sigma;
}

struct RandomInstance {
  StateSpace states = StateSpace::from_doubles({0.5});
  Strategy sigma;
  ErgodicDistribution dist;
};

RandomInstance random_instance(Rng& rng, int max_n = 3) {
  RandomInstance out;
  const int n = 1 + static_cast<int>(rng.below(max_n));
  std::vector<double> thetas;
  double last = 0.02;
  for (int s = 0; s < n; ++s) {
    last += 0.02 + rng.uniform() * (0.9 - last) / (n - s + 1);
    thetas.push_back(last);
  }
  out.states = StateSpace::from_doubles(thetas);
  out.sigma = Strategy(n);
  for (double& p : out.sigma.probs) p = rng.uniform();
  // sprinkle pure actions so null contingencies appear
  for (double& p : out.sigma.probs) {
    const double roll = rng.uniform();
    if (roll < 0.15) p = 0.0;
    if (roll > 0.9) p = 1.0;
  }
  out.dist = ergodic_distribution(out.sigma, out.states);
  return out;
}

Partition random_partition(int count, Rng& rng) {
  std::vector<int> labels(count);
  for (int& label : labels) label = static_cast<int>(rng.below(count));
  return canonical_partition(labels);
}

}  // namespace

TEST_CASE("representative strategies: weighted means and null cells") {
  const StateSpace one = StateSpace::from_doubles({0.6});
  const Strategy sigma = strategy_n1(0.2, 0.8);
  const ErgodicDistribution dist = ergodic_distribution(sigma, one);

  const Partition fine = Partition::finest(2);
  const BeliefProfile fine_profile = representative_strategies(fine, sigma, dist);
  CHECK(fine_profile.rep[fine.cell_of[contingency_index(0, 1)]] == 0.8);
  CHECK(fine_profile.rep[fine.cell_of[contingency_index(0, 0)]] == 0.2);

  const Partition coarse = Partition::coarsest(2);
  const BeliefProfile pooled = representative_strategies(coarse, sigma, dist);
  CHECK(pooled.rep[0] == doctest::Approx(0.5).epsilon(1e-14));

  // a null singleton keeps its own sigma value
  const Strategy trusting = strategy_n1(0.0, 0.7);  // h=1 never reached
  const ErgodicDistribution null_dist = ergodic_distribution(trusting, one);
  CHECK(null_dist(0, 1) == 0.0);
  const BeliefProfile null_profile = representative_strategies(fine, trusting, null_dist);
  CHECK(null_profile.rep[fine.cell_of[contingency_index(0, 1)]] == 0.7);
}

TEST_CASE("mspe closed cases") {
  const StateSpace one = StateSpace::from_doubles({0.6});
  const Strategy sigma = strategy_n1(0.2, 0.8);
  const ErgodicDistribution dist = ergodic_distribution(sigma, one);
  CHECK(mspe(Partition::finest(2), sigma, dist) == 0.0);

  const Strategy zero = strategy_n1(0.0, 0.0);
  CHECK(mspe(Partition::coarsest(2), zero, ergodic_distribution(zero, one)) == 0.0);

  // 0.5*(0.3)^2 + 0.5*(0.3)^2
  CHECK(mspe(Partition::coarsest(2), sigma, dist) == doctest::Approx(0.09).epsilon(1e-13));
}

TEST_CASE("objective V") {
  const StateSpace one = StateSpace::from_doubles({0.6});
  const Strategy zero = strategy_n1(0.0, 0.0);
  const ErgodicDistribution zero_dist = ergodic_distribution(zero, one);
  CHECK(objective_v(Partition::coarsest(2), zero, zero_dist, {0.1}) ==
        doctest::Approx(0.1).epsilon(1e-15));

  const Strategy sigma = strategy_n1(0.2, 0.8);
  const ErgodicDistribution dist = ergodic_distribution(sigma, one);
  CHECK(objective_v(Partition::finest(2), sigma, dist, {0.09}) == doctest::Approx(0.18));
  // binding case ties the coarse partition with the fine one
  CHECK(objective_v(Partition::coarsest(2), sigma, dist, {0.09}) ==
        doctest::Approx(0.18).epsilon(1e-12));
}

TEST_CASE("merge delta closed cases") {
  const StateSpace one = StateSpace::from_doubles({0.6});
  const Strategy sigma = strategy_n1(0.2, 0.8);
  const ErgodicDistribution dist = ergodic_distribution(sigma, one);
  const Partition fine = Partition::finest(2);
  const BeliefProfile profile = representative_strategies(fine, sigma, dist);

  const MergeDelta delta = merge_delta_mspe(fine, 0, 1, profile, dist);
  CHECK_FALSE(delta.both_null);
  CHECK(delta.delta == doctest::Approx(0.09).epsilon(1e-12));  // 0.25 * 0.36

  // equal representatives merge for free
  const Strategy flat = strategy_n1(0.4, 0.4);
  const ErgodicDistribution flat_dist = ergodic_distribution(flat, one);
  const BeliefProfile flat_profile = representative_strategies(fine, flat, flat_dist);
  CHECK(merge_delta_mspe(fine, 0, 1, flat_profile, flat_dist).delta ==
        doctest::Approx(0.0).epsilon(1e-15));

  // a null cell contributes no mass
  const Strategy absorbing = strategy_n1(0.0, 0.5);
  const ErgodicDistribution absorbing_dist = ergodic_distribution(absorbing, one);
  const BeliefProfile absorbing_profile = representative_strategies(fine, absorbing, absorbing_dist);
  const int null_cell = fine.cell_of[contingency_index(0, 1)];
  const int live_cell = fine.cell_of[contingency_index(0, 0)];
  CHECK(merge_delta_mspe(fine, live_cell, null_cell, absorbing_profile, absorbing_dist).delta ==
        0.0);
}

TEST_CASE("merge identity: formula equals direct recomputation") {
  Rng rng(4242);
  for (int trial = 0; trial < 3000; ++trial) {
    const RandomInstance inst = random_instance(rng);
    const int count = inst.states.num_contingencies();
    Partition partition = random_partition(count, rng);
    if (partition.num_cells < 2) continue;
    const BeliefProfile profile = representative_strategies(partition, inst.sigma, inst.dist);
    const int cell_a = static_cast<int>(rng.below(partition.num_cells));
    int cell_b = static_cast<int>(rng.below(partition.num_cells));
    if (cell_b == cell_a) cell_b = (cell_a + 1) % partition.num_cells;

    std::vector<int> merged_labels = partition.cell_of;
    for (int& label : merged_labels) {
      if (label == cell_b) label = cell_a;
    }
    const Partition merged = canonical_partition(merged_labels);
    const double direct =
        mspe(merged, inst.sigma, inst.dist) - mspe(partition, inst.sigma, inst.dist);
    const double formula = merge_delta_mspe(partition, cell_a, cell_b, profile, inst.dist).delta;
    CHECK(std::abs(direct - formula) <= 1e-12);
  }
}

TEST_CASE("merge inequality report") {
  const StateSpace one = StateSpace::from_doubles({0.6});
  const Strategy sigma = strategy_n1(0.2, 0.8);
  const ErgodicDistribution dist = ergodic_distribution(sigma, one);
  const Partition fine = Partition::finest(2);

  const MergeInequalityReport binding = check_merge_inequality(fine, sigma, dist, {0.09});
  CHECK(binding.pass);
  REQUIRE(binding.pairs.size() == 1);
  CHECK(std::abs(binding.pairs[0].margin) <= 1e-12);  // binding at equality

  const MergeInequalityReport failing = check_merge_inequality(fine, sigma, dist, {0.1});
  CHECK_FALSE(failing.pass);
  CHECK(failing.pairs[0].margin == doctest::Approx(-0.01).epsilon(1e-9));

  // the one-cell partition has no pairs to check
  CHECK(check_merge_inequality(Partition::coarsest(2), sigma, dist, {0.1}).pass);
}

TEST_CASE("optimal assignment checks") {
  const StateSpace one = StateSpace::from_doubles({0.6});
  const Strategy sigma = strategy_n1(0.2, 0.8);
  const ErgodicDistribution dist = ergodic_distribution(sigma, one);
  const Partition fine = Partition::finest(2);
  const BeliefProfile profile = representative_strategies(fine, sigma, dist);
  CHECK(check_optimal_assignment(fine, sigma, dist, profile, true, 1e-9).pass);

  // two-cell bundling of the untrusting state with (theta,0): all members sit
  // nearest their own cell's belief
  const StateSpace two = StateSpace::from_doubles({0.75, 0.9});
  Strategy bundled(2);
  bundled.at(1, 1) = 0.9447513812154696;
  bundled.at(1, 0) = 0.4710671706891544;
  const Partition structural = Partition::from_cells(
      4, {{contingency_index(0, 1), contingency_index(0, 0), contingency_index(1, 0)},
          {contingency_index(1, 1)}});
  const ErgodicDistribution bundled_dist = ergodic_distribution(bundled, two);
  const BeliefProfile bundled_profile = representative_strategies(structural, bundled, bundled_dist);
  CHECK(check_optimal_assignment(structural, bundled, bundled_dist, bundled_profile, true, 1e-9)
            .pass);

  // a contingency with sigma=1 stuck in a belief-0 cell while a 0.9 cell exists
  const StateSpace pair = StateSpace::from_doubles({0.4, 0.6});
  Strategy bad(2);
  bad.at(0, 0) = 0.9;
  bad.at(0, 1) = 0.9;
  bad.at(1, 0) = 1.0;
  bad.at(1, 1) = 0.0;
  const Partition mixed = Partition::from_cells(
      4, {{contingency_index(0, 0), contingency_index(0, 1)},
          {contingency_index(1, 0), contingency_index(1, 1)}});
  const ErgodicDistribution bad_dist = ergodic_distribution(bad, pair);
  const BeliefProfile bad_profile = representative_strategies(mixed, bad, bad_dist);
  const AssignmentReport report =
      check_optimal_assignment(mixed, bad, bad_dist, bad_profile, true, 1e-9);
  CHECK_FALSE(report.pass);
}

TEST_CASE("lloyd iteration") {
  const StateSpace one = StateSpace::from_doubles({0.6});
  const Strategy sigma = strategy_n1(0.2, 0.8);
  const ErgodicDistribution dist = ergodic_distribution(sigma, one);

  // already optimally assigned: fixed point immediately
  const LloydResult fixed = lloyd_iteration(sigma, dist, 2, Partition::finest(2));
  CHECK(fixed.partition == Partition::finest(2));
  CHECK_FALSE(fixed.dropped_cells);

  // constant strategy: ties keep the current assignment
  const Strategy flat = strategy_n1(0.5, 0.5);
  const ErgodicDistribution flat_dist = ergodic_distribution(flat, one);
  const LloydResult tied = lloyd_iteration(flat, flat_dist, 2, Partition::finest(2));
  CHECK(tied.partition == Partition::finest(2));

  // two-means on two separated weighted points recovers the fine split
  const LloydResult split = lloyd_iteration(
      sigma, dist, 2, Partition::from_cells(2, {{0}, {1}}));
  CHECK(split.partition == Partition::finest(2));

  // a straddling cell between two anchored beliefs empties and is dropped
  const StateSpace two = StateSpace::from_doubles({0.4, 0.6});
  Strategy spread(2);
  spread.at(0, 0) = 0.3;
  spread.at(0, 1) = 0.7;
  spread.at(1, 0) = 0.3;
  spread.at(1, 1) = 0.7;
  const ErgodicDistribution spread_dist = ergodic_distribution(spread, two);
  const Partition straddle = Partition::from_cells(
      4, {{contingency_index(0, 0), contingency_index(0, 1)},
          {contingency_index(1, 0)},
          {contingency_index(1, 1)}});
  const LloydResult dropped = lloyd_iteration(spread, spread_dist, 3, straddle);
  CHECK(dropped.dropped_cells);
  CHECK(dropped.partition.num_cells == 2);
}

TEST_CASE("lloyd MSPE is monotone") {
  Rng rng(515);
  for (int trial = 0; trial < 300; ++trial) {
    const RandomInstance inst = random_instance(rng);
    const int count = inst.states.num_contingencies();
    Partition init = random_partition(count, rng);
    double current = mspe(init, inst.sigma, inst.dist);
    Partition partition = init;
    for (int step = 0; step < 10; ++step) {
      const LloydResult next = lloyd_iteration(inst.sigma, inst.dist, partition.num_cells, partition);
      const double value = mspe(next.partition, inst.sigma, inst.dist);
      CHECK(value <= current + 1e-12);
      if (next.partition == partition) break;
      partition = next.partition;
      current = value;
    }
  }
}

TEST_CASE("partition enumeration matches Bell numbers") {
  const std::vector<std::uint64_t> bell{1, 2, 5, 15, 52, 203, 877, 4140};
  for (int count = 1; count <= 8; ++count) {
    CHECK(bell_number(count) == bell[count - 1]);
    long long seen = 0;
    Partition first, last;
    for_each_partition(count, [&](const Partition& p) {
      if (seen == 0) first = p;
      last = p;
      ++seen;
      return true;
    });
    CHECK(seen == static_cast<long long>(bell[count - 1]));
    CHECK(first == Partition::coarsest(count));
    CHECK(last == Partition::finest(count));
  }
  CHECK(bell_number(12) == 4213597ULL);
  CHECK_THROWS_AS(for_each_partition(13, [](const Partition&) { return true; }), SizeError);
}

TEST_CASE("partition helpers") {
  const Partition p = Partition::from_cells(4, {{2, 0}, {1}, {3}});
  CHECK(p.num_cells == 3);
  CHECK(p.cell_of[0] == p.cell_of[2]);
  CHECK_THROWS_AS(Partition::from_cells(3, {{0, 1}}), std::invalid_argument);      // no cover
  CHECK_THROWS_AS(Partition::from_cells(3, {{0, 1}, {1, 2}}), std::invalid_argument);  // overlap
}

TEST_CASE("ml optimal partitions on closed cases") {
  const StateSpace one = StateSpace::from_doubles({0.6});

  const Strategy zero = strategy_n1(0.0, 0.0);
  const MlOptimalResult trivial = ml_optimal_partitions(zero, one, {0.05});
  REQUIRE(trivial.argmin.size() == 1);
  CHECK(trivial.argmin[0] == Partition::coarsest(2));

  // binding case: fine and coarse tie exactly
  const Strategy binding = strategy_n1(0.2, 0.8);
  const MlOptimalResult tie = ml_optimal_partitions(binding, one, {0.09});
  CHECK(tie.argmin.size() == 2);
  CHECK(tie.v_min == doctest::Approx(0.18).epsilon(1e-12));

  // interior case: the fine partition wins outright
  const Strategy interior = strategy_n1(0.15, 0.75);
  const MlOptimalResult fine = ml_optimal_partitions(interior, one, {0.08});
  REQUIRE(fine.argmin.size() == 1);
  CHECK(fine.argmin[0] == Partition::finest(2));
}

TEST_CASE("ml optimal partitions satisfy the necessary conditions") {
  Rng rng(808);
  for (int trial = 0; trial < 250; ++trial) {
    const RandomInstance inst = random_instance(rng, 2);
    const double c = 0.002 + 0.3 * rng.uniform();
    const MlOptimalResult result = ml_optimal_partitions(inst.sigma, inst.states, {c});
    REQUIRE(!result.argmin.empty());
    const int count = inst.states.num_contingencies();
    for (const Partition& partition : result.argmin) {
      CHECK(objective_v(partition, inst.sigma, inst.dist, {c}) >= c * partition.num_cells - 1e-12);
      const BeliefProfile profile = representative_strategies(partition, inst.sigma, inst.dist);
      // pairwise-distinct representatives (up to the exact-tie tolerance)
      const MergeInequalityReport merges =
          check_merge_inequality(partition, inst.sigma, inst.dist, {c});
      for (const auto& pair : merges.pairs) CHECK(pair.margin >= -2e-12);
      // every supported contingency is optimally assigned
      CHECK(check_optimal_assignment(partition, inst.sigma, inst.dist, profile, false, 1e-9).pass);
    }
    // V at the finest partition is exactly the pure complexity cost
    CHECK(objective_v(Partition::finest(count), inst.sigma, inst.dist, {c}) ==
          doctest::Approx(c * count).epsilon(1e-15));
  }
}
