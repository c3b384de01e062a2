#include "acgap/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace acgap {

SoftmaxPolicy::SoftmaxPolicy(int n_states, int n_actions)
    : SoftmaxPolicy(n_states, n_actions, Eigen::VectorXd::Zero(n_states * n_actions)) {}

SoftmaxPolicy::SoftmaxPolicy(int n_states, int n_actions, Eigen::VectorXd logits)
    : n_states_(n_states), n_actions_(n_actions), logits_(std::move(logits)) {
  if (n_states_ < 1 || n_actions_ < 1)
    throw std::invalid_argument("SoftmaxPolicy: sizes must be positive");
  if (logits_.size() != dim())
    throw std::invalid_argument("SoftmaxPolicy: logits must have length S*A");
  rebuild_cache();
}

void SoftmaxPolicy::set_logits(Eigen::VectorXd logits) {
  if (logits.size() != dim())
    throw std::invalid_argument("SoftmaxPolicy: logits must have length S*A");
  logits_ = std::move(logits);
  rebuild_cache();
}

void SoftmaxPolicy::rebuild_cache() {
  if (!logits_.allFinite()) throw std::invalid_argument("SoftmaxPolicy: non-finite logits");
  const int sa = dim();
  probs_.resize(sa);
  for (int s = 0; s < n_states_; ++s) {
    const auto block = logits_.segment(s * n_actions_, n_actions_);
    const double peak = block.maxCoeff();
    Eigen::VectorXd exps = (block.array() - peak).exp();
    probs_.segment(s * n_actions_, n_actions_) = exps / exps.sum();
  }
  expansion_ = Eigen::MatrixXd::Zero(n_states_, sa);
  for (int s = 0; s < n_states_; ++s)
    expansion_.row(s).segment(s * n_actions_, n_actions_) =
        probs_.segment(s * n_actions_, n_actions_);
  jacobian_ = Eigen::MatrixXd::Zero(sa, sa);
  for (int s = 0; s < n_states_; ++s) {
    const auto pi = probs_.segment(s * n_actions_, n_actions_);
    auto block = jacobian_.block(s * n_actions_, s * n_actions_, n_actions_, n_actions_);
    block.noalias() = -pi * pi.transpose();
    block.diagonal() += pi;
  }
}

}  // namespace acgap
