#ifndef MLEQLAB_SAMPLE_NOISE_HPP
#define MLEQLAB_SAMPLE_NOISE_HPP

#include <cstdint>

#include "mleqlab/trust_game.hpp"

namespace mleq {

// Single-state reduced form where the complexity cost is reinterpreted as the
// variance constant of finite-sample observation noise: players see
// x(h) = sigma(h) + eps(h) with Var(eps(h)) = v / p(h).
struct NoisyObservationModel {
  double sigma0 = 0.0;
  double sigma1 = 0.0;
  double v = 0.0;
  double p0 = 0.0;  // ergodic mass of h=0
  double p1 = 0.0;
};

// Throws ModelError when either history has zero long-run mass.
NoisyObservationModel make_noise_model(const Strategy& sigma, double v);
NoisyObservationModel make_noise_model(double sigma0, double sigma1, double v);

// Expected MSPE of the two-cell (rational-expectations) partition: 2v.
double expected_mspe_fine(const NoisyObservationModel& model);

// Expected MSPE of the one-cell partition: p0 p1 (sigma1-sigma0)^2 + v.
double expected_mspe_coarse(const NoisyObservationModel& model);

// Fine beats coarse exactly when the between-history variance covers the
// noise premium; coincides with the merge inequality at c = v.
bool fine_partition_preferred(const NoisyObservationModel& model);

enum class NoisePartition { Fine, Coarse };

struct MonteCarloMspe {
  double mean = 0.0;
  double std_error = 0.0;
  long long samples = 0;
};

// Gaussian-noise stochastic oracle for the two closed forms above.
MonteCarloMspe monte_carlo_mspe(const NoisyObservationModel& model, NoisePartition partition,
                                long long samples, std::uint64_t seed);

}  // namespace mleq

#endif
