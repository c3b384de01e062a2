#include "acgap/solvers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace acgap {

namespace {
constexpr double kRecursionTol = 1e-10;
constexpr double kDualityTol = 1e-10;

void check_shapes(const TabularMdp& mdp, const SoftmaxPolicy& policy) {
  if (mdp.n_states != policy.n_states() || mdp.n_actions != policy.n_actions())
    throw std::invalid_argument("mdp and policy shapes disagree");
}
}  // namespace

Eigen::VectorXd expand_over_actions(const Eigen::VectorXd& per_state, int n_actions) {
  Eigen::VectorXd out(per_state.size() * n_actions);
  for (Eigen::Index s = 0; s < per_state.size(); ++s)
    out.segment(s * n_actions, n_actions).setConstant(per_state[s]);
  return out;
}

Eigen::VectorXd sum_over_actions(const Eigen::VectorXd& per_pair, int n_actions) {
  Eigen::VectorXd out(per_pair.size() / n_actions);
  for (Eigen::Index s = 0; s < out.size(); ++s)
    out[s] = per_pair.segment(s * n_actions, n_actions).sum();
  return out;
}

ExactEvaluator::ExactEvaluator(const TabularMdp& mdp, const SoftmaxPolicy& policy)
    : mdp_(mdp), policy_(policy) {
  check_shapes(mdp, policy);
  const int sa = mdp.num_pairs();
  p_pi_.noalias() = mdp.transition * policy.expansion();
  psi_ = Eigen::MatrixXd::Identity(sa, sa) - mdp.gamma * p_pi_;
}

const Eigen::PartialPivLU<Eigen::MatrixXd>& ExactEvaluator::psi_lu() const {
  if (!have_lu_) {
    psi_lu_.compute(psi_);
    have_lu_ = true;
  }
  return psi_lu_;
}

Eigen::VectorXd ExactEvaluator::solve_psi(const Eigen::VectorXd& rhs) const {
  return psi_lu().solve(rhs);
}

Eigen::VectorXd ExactEvaluator::solve_psi_transpose(const Eigen::VectorXd& rhs) const {
  // (I - gamma Pi^T P^T) is exactly Psi^T, so one factorization serves both.
  return psi_lu().transpose().solve(rhs);
}

const Eigen::VectorXd& ExactEvaluator::occupancy() const {
  if (!have_occupancy_) {
    const Eigen::VectorXd rhs =
        (1.0 - mdp_.gamma) * policy_.expansion().transpose() * mdp_.init_dist;
    occupancy_ = solve_psi_transpose(rhs);
    const double recursion_err =
        (occupancy_ - rhs - mdp_.gamma * policy_.expansion().transpose() *
                                (mdp_.transition.transpose() * occupancy_))
            .lpNorm<Eigen::Infinity>();
    if (!(recursion_err < kRecursionTol)) {
      std::ostringstream msg;
      msg << "occupancy recursion residual " << recursion_err << " exceeds " << kRecursionTol;
      throw std::runtime_error(msg.str());
    }
    state_occupancy_ = sum_over_actions(occupancy_, mdp_.n_actions);
    have_occupancy_ = true;
  }
  return occupancy_;
}

const Eigen::VectorXd& ExactEvaluator::state_occupancy() const {
  occupancy();
  return state_occupancy_;
}

const Eigen::VectorXd& ExactEvaluator::q_values() const {
  if (!have_q_) {
    q_values_ = solve_psi(mdp_.reward);
    have_q_ = true;
  }
  return q_values_;
}

double ExactEvaluator::objective() const {
  const double primal =
      (1.0 - mdp_.gamma) * mdp_.init_dist.dot(policy_.expansion() * q_values());
  const double dual = occupancy().dot(mdp_.reward);
  const double tol = kDualityTol * std::max(1.0, std::abs(dual));
  if (!(std::abs(primal - dual) <= tol)) {
    std::ostringstream msg;
    msg << "objective duality gap " << std::abs(primal - dual) << " exceeds " << tol;
    throw std::runtime_error(msg.str());
  }
  return primal;
}

Eigen::VectorXd ExactEvaluator::bellman_residual(const Eigen::VectorXd& critic_values) const {
  return mdp_.reward + mdp_.gamma * (p_pi_ * critic_values) - critic_values;
}

StationaryDistribution solve_stationary(const TabularMdp& mdp, const SoftmaxPolicy& policy) {
  ExactEvaluator ev(mdp, policy);
  return {ev.occupancy(), ev.state_occupancy()};
}

Eigen::VectorXd solve_q_values(const TabularMdp& mdp, const SoftmaxPolicy& policy) {
  ExactEvaluator ev(mdp, policy);
  return ev.q_values();
}

double policy_objective(const TabularMdp& mdp, const SoftmaxPolicy& policy) {
  ExactEvaluator ev(mdp, policy);
  return ev.objective();
}

Eigen::VectorXd residual(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                         const CriticTable& critic) {
  check_shapes(mdp, policy);
  if (critic.values.size() != mdp.num_pairs())
    throw std::invalid_argument("residual: critic has wrong length");
  ExactEvaluator ev(mdp, policy);
  return ev.bellman_residual(critic.values);
}

double actor_objective(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                       const CriticTable& critic) {
  check_shapes(mdp, policy);
  return (1.0 - mdp.gamma) * mdp.init_dist.dot(policy.expansion() * critic.values);
}

double critic_objective(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                        const CriticTable& critic, const Eigen::VectorXd& weights) {
  if (weights.size() != mdp.num_pairs())
    throw std::invalid_argument("critic_objective: weights have wrong length");
  const Eigen::VectorXd delta = residual(mdp, policy, critic);
  return 0.5 * weights.dot(delta.cwiseProduct(delta));
}

Eigen::VectorXd solve_res_q_values(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                   const Eigen::VectorXd& residual_reward) {
  check_shapes(mdp, policy);
  if (residual_reward.size() != mdp.num_pairs())
    throw std::invalid_argument("solve_res_q_values: reward has wrong length");
  ExactEvaluator ev(mdp, policy);
  return ev.solve_psi(residual_reward);
}

}  // namespace acgap
