#ifndef MLEQLAB_TRUST_GAME_HPP
#define MLEQLAB_TRUST_GAME_HPP

#include <cstdint>
#include <vector>

#include "mleqlab/rational.hpp"

namespace mleq {

// A contingency is a (payoff state, observed previous action) pair.
struct Contingency {
  int state = 0;
  int history = 0;
  bool operator==(const Contingency&) const = default;
};

// Flat index used throughout: state-major, history minor.
inline int contingency_index(int state, int history) { return 2 * state + history; }
inline Contingency contingency_from_index(int index) { return {index / 2, index % 2}; }

// Payoff states theta_1 < ... < theta_n, all in (0,1), drawn uniformly.
// Exact rational values are retained for the genericity machinery.
class StateSpace {
 public:
  explicit StateSpace(std::vector<Rational> states);
  static StateSpace from_doubles(const std::vector<double>& states);

  int n() const { return static_cast<int>(values_.size()); }
  int num_contingencies() const { return 2 * n(); }
  double theta(int i) const { return values_[i]; }
  const std::vector<double>& thetas() const { return values_; }
  const Rational& exact(int i) const { return exact_[i]; }
  const std::vector<Rational>& exact_values() const { return exact_; }
  double max_theta() const { return values_.back(); }

 private:
  std::vector<Rational> exact_;
  std::vector<double> values_;
};

// Population mixed strategy: probability of action 1 per contingency.
struct Strategy {
  int n = 0;
  std::vector<double> probs;  // size 2n, index = contingency_index

  Strategy() = default;
  explicit Strategy(int n_states, double fill = 0.0)
      : n(n_states), probs(2 * static_cast<std::size_t>(n_states), fill) {}

  double operator()(int state, int history) const { return probs[contingency_index(state, history)]; }
  double& at(int state, int history) { return probs[contingency_index(state, history)]; }
};

Strategy validate_strategy(const Strategy& sigma);

// Long-run distribution over contingencies induced by a strategy.
struct ErgodicDistribution {
  int n = 0;
  std::vector<double> probs;  // size 2n, index = contingency_index

  double operator()(int state, int history) const { return probs[contingency_index(state, history)]; }
};

// u_t(a_t, a_{t+1}) = a_{t+1} - theta * a_t
double payoff(int action, int next_action, double theta);

// Per-state two-state chain invariant mass. When the kernel is ill-defined
// (sigma(theta,0)=0 and sigma(theta,1)=1) the mass splits evenly, p = 1/2n.
ErgodicDistribution ergodic_distribution(const Strategy& sigma, const StateSpace& states);

struct BestReplySet {
  bool defect = false;     // action 0
  bool cooperate = false;  // action 1
  bool contains(int action) const { return action == 1 ? cooperate : defect; }
};

// Action 1 (0) is a best reply iff the belief gap sigma_hat(theta,1) -
// sigma_hat(theta,0) is weakly above (below) theta; ties within eps keep both.
BestReplySet best_replies(double sigma_hat1, double sigma_hat0, double theta, double eps);

// a_{t+1} ~ Bernoulli(sigma(theta, a_t)); returns a_1..a_T given a_0.
std::vector<int> simulate_trajectory(const Strategy& sigma, int state, int initial_action,
                                     long long horizon, std::uint64_t seed);

// Sum over states of p(theta, 1).
double overall_cooperation_rate(const ErgodicDistribution& dist);

}  // namespace mleq

#endif
