#include "mleqlab/sample_noise.hpp"

#include <cmath>
#include <stdexcept>

#include "mleqlab/errors.hpp"
#include "mleqlab/rng.hpp"

namespace mleq {

NoisyObservationModel make_noise_model(const Strategy& sigma, double v) {
  if (sigma.n != 1) throw std::invalid_argument("the noisy reduced form is defined for n=1");
  return make_noise_model(sigma(0, 0), sigma(0, 1), v);
}

NoisyObservationModel make_noise_model(double sigma0, double sigma1, double v) {
  if (!(v >= 0.0)) throw std::invalid_argument("noise variance must be nonnegative");
  Strategy sigma(1);
  sigma.at(0, 0) = sigma0;
  sigma.at(0, 1) = sigma1;
  validate_strategy(sigma);
  if (sigma0 == 0.0 && sigma1 == 1.0) {
    throw ModelError("noisy observation model undefined: ill-defined kernel");
  }
  const ErgodicDistribution dist = ergodic_distribution(sigma, StateSpace::from_doubles({0.5}));
  NoisyObservationModel model;
  model.sigma0 = sigma0;
  model.sigma1 = sigma1;
  model.v = v;
  model.p0 = dist(0, 0);
  model.p1 = dist(0, 1);
  if (!(model.p0 > 0.0) || !(model.p1 > 0.0)) {
    throw ModelError("noisy observation model undefined: a history has zero long-run mass");
  }
  return model;
}

double expected_mspe_fine(const NoisyObservationModel& model) { return 2.0 * model.v; }

double expected_mspe_coarse(const NoisyObservationModel& model) {
  const double gap = model.sigma1 - model.sigma0;
  return model.p0 * model.p1 * gap * gap + model.v;
}

bool fine_partition_preferred(const NoisyObservationModel& model) {
  return expected_mspe_fine(model) <= expected_mspe_coarse(model);
}

MonteCarloMspe monte_carlo_mspe(const NoisyObservationModel& model, NoisePartition partition,
                                long long samples, std::uint64_t seed) {
  if (samples < 10'000) throw std::invalid_argument("need at least 1e4 samples");
  const double scale0 = std::sqrt(model.v / model.p0);
  const double scale1 = std::sqrt(model.v / model.p1);
  // fixed-size batches with derived seeds; the aggregate is independent of
  // how batches are scheduled
  const long long batch_size = 1 << 16;
  double sum = 0.0;
  double sum_sq = 0.0;
  long long done = 0;
  for (long long batch = 0; done < samples; ++batch) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(batch)));
    const long long count = std::min(batch_size, samples - done);
    double batch_sum = 0.0;
    double batch_sum_sq = 0.0;
    for (long long i = 0; i < count; ++i) {
      const double x0 = model.sigma0 + scale0 * rng.normal();
      const double x1 = model.sigma1 + scale1 * rng.normal();
      double err;
      if (partition == NoisePartition::Fine) {
        err = model.p0 * (x0 - model.sigma0) * (x0 - model.sigma0) +
              model.p1 * (x1 - model.sigma1) * (x1 - model.sigma1);
      } else {
        const double pooled = model.p0 * x0 + model.p1 * x1;
        err = model.p0 * (pooled - model.sigma0) * (pooled - model.sigma0) +
              model.p1 * (pooled - model.sigma1) * (pooled - model.sigma1);
      }
      batch_sum += err;
      batch_sum_sq += err * err;
    }
    sum += batch_sum;
    sum_sq += batch_sum_sq;
    done += count;
  }
  MonteCarloMspe out;
  out.samples = samples;
  out.mean = sum / static_cast<double>(samples);
  const double variance =
      std::max(0.0, sum_sq / static_cast<double>(samples) - out.mean * out.mean);
  out.std_error = std::sqrt(variance / static_cast<double>(samples));
  return out;
}

}  // namespace mleq
