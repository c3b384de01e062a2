#pragma once

#include <Eigen/Core>

namespace acgap {

// Per-state softmax policy over logits theta in R^{S*A}. The probability
// vector, the expansion matrix Pi (S x S*A, state s row holds pi(s, .) in
// block s) and the logit Jacobian H ((S*A) x (S*A), block-diagonal with
// H[(s,b),(s,a)] = pi(s,a) * (1[a==b] - pi(s,b))) are cached and rebuilt on
// every logit change. Probabilities are computed with per-state max
// subtraction, so they are strictly positive.
//
// Mutation is single-writer; treat an instance as immutable while shared.
class SoftmaxPolicy {
 public:
  SoftmaxPolicy(int n_states, int n_actions);  // uniform policy (zero logits)
  SoftmaxPolicy(int n_states, int n_actions, Eigen::VectorXd logits);

  void set_logits(Eigen::VectorXd logits);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  int dim() const { return n_states_ * n_actions_; }
  int pair_index(int s, int a) const { return s * n_actions_ + a; }

  const Eigen::VectorXd& logits() const { return logits_; }
  const Eigen::VectorXd& probs() const { return probs_; }
  const Eigen::MatrixXd& expansion() const { return expansion_; }
  const Eigen::MatrixXd& jacobian() const { return jacobian_; }

  double prob(int s, int a) const { return probs_[pair_index(s, a)]; }

 private:
  void rebuild_cache();

  int n_states_;
  int n_actions_;
  Eigen::VectorXd logits_;
  Eigen::VectorXd probs_;
  Eigen::MatrixXd expansion_;
  Eigen::MatrixXd jacobian_;
};

}  // namespace acgap
