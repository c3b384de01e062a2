#pragma once

#include <Eigen/Core>
#include <json.hpp>

#include "acgap/critic.hpp"
#include "acgap/solvers.hpp"

namespace acgap {

// The three theta-gradient corrections that separate the actor-critic
// updates from the true policy gradient, for a fixed critic:
//   total           = d/dtheta of d^T delta        (both dependences active)
//   residual_term   = d/dtheta of (d')^T delta     (occupancy frozen)
//   occupancy_term  = d/dtheta of d^T (delta')     (residual frozen) = Upsilon * delta
// total = residual_term + occupancy_term by the product rule.
struct GapCorrections {
  Eigen::VectorXd total;
  Eigen::VectorXd residual_term;
  Eigen::VectorXd occupancy_term;
};

// Everything needed to audit the actor-update identities on one
// (mdp, policy, critic) triple. Satisfies:
//   pg = actor_initial + corrections.total
//   pg = actor_occupancy + corrections.occupancy_term
//   actor_occupancy = actor_initial + corrections.residual_term
//   upsilon * ones = 0   (occupancy mass is conserved)
struct GradientReport {
  Eigen::VectorXd grad_pg;
  Eigen::VectorXd grad_actor_initial;
  Eigen::VectorXd grad_actor_occupancy;
  GapCorrections corrections;
  Eigen::MatrixXd upsilon;  // (dim theta) x (S*A), [i][sa] = d d(sa) / d theta_i
};

// True policy gradient H * diag(Xi^T d_S) * q_theta.
Eigen::VectorXd grad_policy_exact(const ExactEvaluator& ev);
Eigen::VectorXd grad_policy_exact(const TabularMdp& mdp, const SoftmaxPolicy& policy);

// Actor gradient with initial-state weighting: (1-gamma) H diag(Xi^T mu0) q_phi.
Eigen::VectorXd grad_actor_initial(const ExactEvaluator& ev, const CriticTable& critic);
Eigen::VectorXd grad_actor_initial(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                   const CriticTable& critic);

// Actor gradient with on-policy occupancy weighting: H diag(Xi^T d_S) q_phi.
Eigen::VectorXd grad_actor_occupancy(const ExactEvaluator& ev, const CriticTable& critic);
Eigen::VectorXd grad_actor_occupancy(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                     const CriticTable& critic);

// Derivative of the discounted occupancy w.r.t. the logits:
// Upsilon = H diag(Xi^T d_S) Psi^{-1}.
Eigen::MatrixXd stationary_derivative(const ExactEvaluator& ev);
Eigen::MatrixXd stationary_derivative(const TabularMdp& mdp, const SoftmaxPolicy& policy);

GapCorrections gap_corrections(const ExactEvaluator& ev, const CriticTable& critic);
GapCorrections gap_corrections(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                               const CriticTable& critic);

// Gradient of the weighted squared-residual critic objective: -Psi^T D delta.
Eigen::VectorXd grad_critic_full(const ExactEvaluator& ev, const CriticTable& critic,
                                 const Eigen::VectorXd& weights);
Eigen::VectorXd grad_critic_full(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                 const CriticTable& critic, const Eigen::VectorXd& weights);

// Semi-gradient of the same objective (target frozen): -D delta.
// Policy-independent given the residual.
Eigen::VectorXd grad_critic_semi(const Eigen::VectorXd& residual, const Eigen::VectorXd& weights);

// Occupancy-weighted actor gradient driven by a residual-value table:
// H diag(Xi^T d_S) w_psi.
Eigen::VectorXd grad_res_actor(const ExactEvaluator& ev, const ResCriticTable& res_critic);
Eigen::VectorXd grad_res_actor(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                               const ResCriticTable& res_critic);

// One tabular value-iteration-style step q <- q + alpha * D * delta,
// elementwise (1 - alpha d(sa)) q(sa) + alpha d(sa) q'(sa).
CriticTable q_learning_update(const CriticTable& critic, const Eigen::VectorXd& residual,
                              const Eigen::VectorXd& weights, double alpha);

// Logits placing softmax mass >= 1 - 1e-9 on the per-state argmax of the
// table (ties to the lowest action index). Exact greedy is unreachable under
// softmax; a logit gap of 40 leaves < 1e-17 mass per competing action.
SoftmaxPolicy greedy_policy(const CriticTable& critic, int n_states, int n_actions);

GradientReport compute_gradient_report(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                       const CriticTable& critic);

nlohmann::json gradient_report_to_json(const GradientReport& report);

}  // namespace acgap
