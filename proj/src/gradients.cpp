#include "acgap/gradients.hpp"

#include <stdexcept>

namespace acgap {

namespace {

// H * (weights_per_pair .* values): the common shape of every actor-side
// gradient here.
Eigen::VectorXd weighted_jacobian_product(const SoftmaxPolicy& policy,
                                          const Eigen::VectorXd& pair_weights,
                                          const Eigen::VectorXd& values) {
  return policy.jacobian() * pair_weights.cwiseProduct(values);
}

void check_critic(const ExactEvaluator& ev, const Eigen::VectorXd& values, const char* who) {
  if (values.size() != ev.mdp().num_pairs())
    throw std::invalid_argument(std::string(who) + ": table has wrong length");
}

}  // namespace

Eigen::VectorXd grad_policy_exact(const ExactEvaluator& ev) {
  const Eigen::VectorXd w = expand_over_actions(ev.state_occupancy(), ev.mdp().n_actions);
  return weighted_jacobian_product(ev.policy(), w, ev.q_values());
}

Eigen::VectorXd grad_policy_exact(const TabularMdp& mdp, const SoftmaxPolicy& policy) {
  ExactEvaluator ev(mdp, policy);
  return grad_policy_exact(ev);
}

Eigen::VectorXd grad_actor_initial(const ExactEvaluator& ev, const CriticTable& critic) {
  check_critic(ev, critic.values, "grad_actor_initial");
  const Eigen::VectorXd w = expand_over_actions(ev.mdp().init_dist, ev.mdp().n_actions);
  return (1.0 - ev.mdp().gamma) * weighted_jacobian_product(ev.policy(), w, critic.values);
}

Eigen::VectorXd grad_actor_initial(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                   const CriticTable& critic) {
  ExactEvaluator ev(mdp, policy);
  return grad_actor_initial(ev, critic);
}

Eigen::VectorXd grad_actor_occupancy(const ExactEvaluator& ev, const CriticTable& critic) {
  check_critic(ev, critic.values, "grad_actor_occupancy");
  const Eigen::VectorXd w = expand_over_actions(ev.state_occupancy(), ev.mdp().n_actions);
  return weighted_jacobian_product(ev.policy(), w, critic.values);
}

Eigen::VectorXd grad_actor_occupancy(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                     const CriticTable& critic) {
  ExactEvaluator ev(mdp, policy);
  return grad_actor_occupancy(ev, critic);
}

Eigen::MatrixXd stationary_derivative(const ExactEvaluator& ev) {
  const Eigen::VectorXd w = expand_over_actions(ev.state_occupancy(), ev.mdp().n_actions);
  // Upsilon = H diag(w) Psi^{-1}; solve Psi^T X = diag(w) H^T, Upsilon = X^T.
  const Eigen::MatrixXd rhs = w.asDiagonal() * ev.policy().jacobian().transpose();
  const Eigen::MatrixXd transposed = ev.psi_lu().transpose().solve(rhs);
  return transposed.transpose();
}

Eigen::MatrixXd stationary_derivative(const TabularMdp& mdp, const SoftmaxPolicy& policy) {
  ExactEvaluator ev(mdp, policy);
  return stationary_derivative(ev);
}

GapCorrections gap_corrections(const ExactEvaluator& ev, const CriticTable& critic) {
  check_critic(ev, critic.values, "gap_corrections");
  const TabularMdp& mdp = ev.mdp();
  const Eigen::VectorXd delta = ev.bellman_residual(critic.values);

  // Occupancy frozen: the residual's only theta-dependence is the expected
  // next-state critic value, so the weight on state s~ is gamma * (P^T d)(s~).
  const Eigen::VectorXd next_weight =
      mdp.gamma * (mdp.transition.transpose() * ev.occupancy());
  GapCorrections out;
  out.residual_term = weighted_jacobian_product(
      ev.policy(), expand_over_actions(next_weight, mdp.n_actions), critic.values);
  out.occupancy_term = stationary_derivative(ev) * delta;
  out.total = out.residual_term + out.occupancy_term;
  return out;
}

GapCorrections gap_corrections(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                               const CriticTable& critic) {
  ExactEvaluator ev(mdp, policy);
  return gap_corrections(ev, critic);
}

Eigen::VectorXd grad_critic_full(const ExactEvaluator& ev, const CriticTable& critic,
                                 const Eigen::VectorXd& weights) {
  check_critic(ev, critic.values, "grad_critic_full");
  check_critic(ev, weights, "grad_critic_full weights");
  const Eigen::VectorXd delta = ev.bellman_residual(critic.values);
  return -ev.psi().transpose() * weights.cwiseProduct(delta);
}

Eigen::VectorXd grad_critic_full(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                 const CriticTable& critic, const Eigen::VectorXd& weights) {
  ExactEvaluator ev(mdp, policy);
  return grad_critic_full(ev, critic, weights);
}

Eigen::VectorXd grad_critic_semi(const Eigen::VectorXd& residual,
                                 const Eigen::VectorXd& weights) {
  if (residual.size() != weights.size())
    throw std::invalid_argument("grad_critic_semi: size mismatch");
  return -weights.cwiseProduct(residual);
}

Eigen::VectorXd grad_res_actor(const ExactEvaluator& ev, const ResCriticTable& res_critic) {
  check_critic(ev, res_critic.values, "grad_res_actor");
  const Eigen::VectorXd w = expand_over_actions(ev.state_occupancy(), ev.mdp().n_actions);
  return weighted_jacobian_product(ev.policy(), w, res_critic.values);
}

Eigen::VectorXd grad_res_actor(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                               const ResCriticTable& res_critic) {
  ExactEvaluator ev(mdp, policy);
  return grad_res_actor(ev, res_critic);
}

CriticTable q_learning_update(const CriticTable& critic, const Eigen::VectorXd& residual,
                              const Eigen::VectorXd& weights, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("q_learning_update: alpha must be positive");
  if (critic.values.size() != residual.size() || critic.values.size() != weights.size())
    throw std::invalid_argument("q_learning_update: size mismatch");
  CriticTable next(Eigen::VectorXd(critic.values + alpha * weights.cwiseProduct(residual)));
  next.check_finite();
  return next;
}

SoftmaxPolicy greedy_policy(const CriticTable& critic, int n_states, int n_actions) {
  if (critic.values.size() != static_cast<Eigen::Index>(n_states) * n_actions)
    throw std::invalid_argument("greedy_policy: critic has wrong length");
  constexpr double kGreedyLogitGap = 40.0;
  Eigen::VectorXd logits = Eigen::VectorXd::Zero(critic.values.size());
  for (int s = 0; s < n_states; ++s) {
    int best = 0;
    for (int a = 1; a < n_actions; ++a)
      if (critic.values[s * n_actions + a] > critic.values[s * n_actions + best]) best = a;
    logits[s * n_actions + best] = kGreedyLogitGap;
  }
  return SoftmaxPolicy(n_states, n_actions, std::move(logits));
}

GradientReport compute_gradient_report(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                       const CriticTable& critic) {
  ExactEvaluator ev(mdp, policy);
  GradientReport report;
  report.grad_pg = grad_policy_exact(ev);
  report.grad_actor_initial = grad_actor_initial(ev, critic);
  report.grad_actor_occupancy = grad_actor_occupancy(ev, critic);
  report.corrections = gap_corrections(ev, critic);
  report.upsilon = stationary_derivative(ev);
  return report;
}

nlohmann::json gradient_report_to_json(const GradientReport& report) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); };
  nlohmann::json j;
  j["grad_pg"] = vec(report.grad_pg);
  j["grad_actor_initial"] = vec(report.grad_actor_initial);
  j["grad_actor_occupancy"] = vec(report.grad_actor_occupancy);
  j["correction_total"] = vec(report.corrections.total);
  j["correction_residual_term"] = vec(report.corrections.residual_term);
  j["correction_occupancy_term"] = vec(report.corrections.occupancy_term);
  std::vector<std::vector<double>> upsilon;
  upsilon.reserve(static_cast<std::size_t>(report.upsilon.rows()));
  for (int i = 0; i < report.upsilon.rows(); ++i) {
    Eigen::VectorXd row = report.upsilon.row(i);
    upsilon.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["upsilon"] = upsilon;
  return j;
}

}  // namespace acgap
