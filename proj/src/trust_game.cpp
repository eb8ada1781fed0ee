#include "mleqlab/trust_game.hpp"

#include <algorithm>
#include <stdexcept>

#include "mleqlab/rng.hpp"

namespace mleq {

StateSpace::StateSpace(std::vector<Rational> states) : exact_(std::move(states)) {
  if (exact_.empty()) throw std::invalid_argument("state space must be non-empty");
  const Rational zero(0), one(1);
  for (std::size_t i = 0; i < exact_.size(); ++i) {
    if (!(exact_[i] > zero && exact_[i] < one)) {
      throw std::invalid_argument("state " + rational_to_string(exact_[i]) +
                                  " is outside the open interval (0,1)");
    }
    if (i > 0 && !(exact_[i - 1] < exact_[i])) {
      throw std::invalid_argument("states must be strictly increasing");
    }
  }
  values_.reserve(exact_.size());
  for (const auto& r : exact_) values_.push_back(to_double(r));
}

StateSpace StateSpace::from_doubles(const std::vector<double>& states) {
  std::vector<Rational> exact;
  exact.reserve(states.size());
  for (double v : states) exact.emplace_back(v);  // binary doubles are exact rationals
  return StateSpace(std::move(exact));
}

Strategy validate_strategy(const Strategy& sigma) {
  if (sigma.n <= 0 || sigma.probs.size() != 2 * static_cast<std::size_t>(sigma.n)) {
    throw std::invalid_argument("strategy has inconsistent dimensions");
  }
  for (double p : sigma.probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("strategy probability outside [0,1]");
  }
  return sigma;
}

double payoff(int action, int next_action, double theta) {
  return static_cast<double>(next_action) - theta * static_cast<double>(action);
}

ErgodicDistribution ergodic_distribution(const Strategy& sigma, const StateSpace& states) {
  const int n = states.n();
  if (sigma.n != n) throw std::invalid_argument("strategy/state-space dimension mismatch");
  ErgodicDistribution dist;
  dist.n = n;
  dist.probs.assign(2 * static_cast<std::size_t>(n), 0.0);
  const double state_mass = 1.0 / static_cast<double>(n);
  for (int s = 0; s < n; ++s) {
    const double s0 = sigma(s, 0);
    const double s1 = sigma(s, 1);
    double p1;
    // pure kernels are resolved exactly so that null contingencies carry
    // mass 0.0, not rounding dust
    if (s0 == 0.0 && s1 == 1.0) {
      p1 = 0.5 * state_mass;  // ill-defined kernel fallback
    } else if (s1 == 1.0) {
      p1 = state_mass;  // absorbing at h=1
    } else if (s0 == 0.0) {
      p1 = 0.0;  // absorbing at h=0
    } else {
      p1 = s0 / (static_cast<double>(n) * (s0 + (1.0 - s1)));
    }
    dist.probs[contingency_index(s, 1)] = p1;
    dist.probs[contingency_index(s, 0)] = std::max(0.0, state_mass - p1);
  }
  return dist;
}

BestReplySet best_replies(double sigma_hat1, double sigma_hat0, double theta, double eps) {
  const double gap = sigma_hat1 - sigma_hat0;
  BestReplySet out;
  if (gap > theta + eps) {
    out.cooperate = true;
  } else if (gap < theta - eps) {
    out.defect = true;
  } else {
    out.defect = true;
    out.cooperate = true;
  }
  return out;
}

std::vector<int> simulate_trajectory(const Strategy& sigma, int state, int initial_action,
                                     long long horizon, std::uint64_t seed) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (state < 0 || state >= sigma.n) throw std::invalid_argument("state index out of range");
  Rng rng(seed);
  std::vector<int> actions;
  actions.reserve(static_cast<std::size_t>(horizon));
  int current = initial_action;
  for (long long t = 0; t < horizon; ++t) {
    current = rng.bernoulli(sigma(state, current)) ? 1 : 0;
    actions.push_back(current);
  }
  return actions;
}

double overall_cooperation_rate(const ErgodicDistribution& dist) {
  double total = 0.0;
  for (int s = 0; s < dist.n; ++s) total += dist(s, 1);
  return total;
}

}  // namespace mleq
