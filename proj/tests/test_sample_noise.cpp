#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mleqlab/errors.hpp"
#include "mleqlab/partition_engine.hpp"
#include "mleqlab/rng.hpp"
#include "mleqlab/sample_noise.hpp"

using namespace mleq;

TEST_CASE("closed forms") {
  const NoisyObservationModel model = make_noise_model(0.2, 0.8, 0.09);
  CHECK(expected_mspe_fine(model) == doctest::Approx(0.18).epsilon(1e-15));
  CHECK(expected_mspe_coarse(model) == doctest::Approx(0.18).epsilon(1e-13));  // indifference point

  CHECK(expected_mspe_fine(make_noise_model(0.3, 0.6, 0.0)) == 0.0);
  CHECK(expected_mspe_fine(make_noise_model(0.3, 0.6, 0.5)) == 1.0);

  const NoisyObservationModel flat = make_noise_model(0.4, 0.4, 0.07);
  CHECK(expected_mspe_coarse(flat) == doctest::Approx(0.07).epsilon(1e-14));

  CHECK_THROWS_AS(make_noise_model(0.0, 1.0, 0.1), ModelError);  // ill-defined kernel
  CHECK_THROWS_AS(make_noise_model(0.0, 0.5, 0.1), ModelError);  // h=1 never reached
}

TEST_CASE("fine partition preference") {
  CHECK(fine_partition_preferred(make_noise_model(0.2, 0.8, 0.09)));         // equality counts
  CHECK_FALSE(fine_partition_preferred(make_noise_model(0.2, 0.8, 0.1)));
  CHECK_FALSE(fine_partition_preferred(make_noise_model(0.4, 0.4, 0.01)));   // no gap
}

TEST_CASE("agreement with the merge inequality at c = v") {
  const StateSpace one = StateSpace::from_doubles({0.5});
  Rng rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    Strategy sigma(1);
    sigma.at(0, 0) = 0.02 + 0.96 * rng.uniform();
    sigma.at(0, 1) = 0.02 + 0.96 * rng.uniform();
    const double v = 0.001 + 0.3 * rng.uniform();
    const NoisyObservationModel model = make_noise_model(sigma(0, 0), sigma(0, 1), v);
    const ErgodicDistribution dist = ergodic_distribution(sigma, one);
    const Partition fine = Partition::finest(2);
    const BeliefProfile profile = representative_strategies(fine, sigma, dist);
    const bool merge_keeps_fine =
        merge_delta_mspe(fine, 0, 1, profile, dist).delta >= v;
    CHECK(fine_partition_preferred(model) == merge_keeps_fine);
  }
}

TEST_CASE("relabeling both histories and strategy components is a symmetry") {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const double s0 = 0.05 + 0.9 * rng.uniform();
    const double s1 = 0.05 + 0.9 * rng.uniform();
    const double v = 0.001 + 0.2 * rng.uniform();
    const NoisyObservationModel model = make_noise_model(s0, s1, v);
    const NoisyObservationModel flipped = make_noise_model(1.0 - s1, 1.0 - s0, v);
    CHECK(expected_mspe_fine(model) == doctest::Approx(expected_mspe_fine(flipped)).epsilon(1e-12));
    CHECK(expected_mspe_coarse(model) ==
          doctest::Approx(expected_mspe_coarse(flipped)).epsilon(1e-11));
  }
}

TEST_CASE("monte carlo matches the closed forms") {
  const NoisyObservationModel model = make_noise_model(0.2, 0.8, 0.09);

  const MonteCarloMspe fine = monte_carlo_mspe(model, NoisePartition::Fine, 1'000'000, 99);
  CHECK(std::abs(fine.mean - 0.18) <= 4.0 * fine.std_error);
  CHECK(std::abs(fine.mean - 0.18) <= 0.002);

  const MonteCarloMspe coarse = monte_carlo_mspe(model, NoisePartition::Coarse, 1'000'000, 100);
  CHECK(std::abs(coarse.mean - expected_mspe_coarse(model)) <= 4.0 * coarse.std_error);

  const NoisyObservationModel flat = make_noise_model(0.5, 0.5, 0.04);
  const MonteCarloMspe flat_coarse = monte_carlo_mspe(flat, NoisePartition::Coarse, 200'000, 5);
  CHECK(std::abs(flat_coarse.mean - 0.04) <= 4.0 * flat_coarse.std_error);

  CHECK_THROWS_AS(monte_carlo_mspe(model, NoisePartition::Fine, 100, 1), std::invalid_argument);

  // determinism under the master seed
  const MonteCarloMspe again = monte_carlo_mspe(model, NoisePartition::Fine, 1'000'000, 99);
  CHECK(again.mean == fine.mean);
  CHECK(again.std_error == fine.std_error);
}

TEST_CASE("vanishing noise recovers the noiseless prediction error") {
  const StateSpace one = StateSpace::from_doubles({0.5});
  Strategy sigma(1);
  sigma.at(0, 0) = 0.3;
  sigma.at(0, 1) = 0.7;
  const NoisyObservationModel model = make_noise_model(0.3, 0.7, 1e-8);
  const ErgodicDistribution dist = ergodic_distribution(sigma, one);

  const MonteCarloMspe coarse = monte_carlo_mspe(model, NoisePartition::Coarse, 100'000, 17);
  CHECK(std::abs(coarse.mean - mspe(Partition::coarsest(2), sigma, dist)) <= 1e-4);

  const MonteCarloMspe fine = monte_carlo_mspe(model, NoisePartition::Fine, 100'000, 18);
  CHECK(std::abs(fine.mean - mspe(Partition::finest(2), sigma, dist)) <= 1e-4);
}
