#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include "acgap/critic.hpp"
#include "acgap/mdp.hpp"
#include "acgap/policy.hpp"

namespace acgap {

// Discounted occupancy of a policy over state-action pairs, together with
// its state marginal.
struct StationaryDistribution {
  Eigen::VectorXd joint;           // d, length S*A, sums to 1
  Eigen::VectorXd state_marginal;  // Xi * d, length S
};

// Copies a per-state vector onto every action slot (Xi^T x).
Eigen::VectorXd expand_over_actions(const Eigen::VectorXd& per_state, int n_actions);
// Sums a per-pair vector over actions (Xi x).
Eigen::VectorXd sum_over_actions(const Eigen::VectorXd& per_pair, int n_actions);

// Shared dense algebra for one (mdp, policy) snapshot. Builds P*Pi and a
// single LU factorization of Psi = I - gamma*P*Pi, which serves both the
// Q-value system Psi q = r and the occupancy system Psi^T d = (1-gamma)Pi^T mu0.
// Occupancy, Q-values and the objective are computed lazily and cached.
//
// The referenced mdp/policy must outlive the evaluator and stay unchanged.
// Instances are not thread-safe; use one per thread.
class ExactEvaluator {
 public:
  ExactEvaluator(const TabularMdp& mdp, const SoftmaxPolicy& policy);

  const TabularMdp& mdp() const { return mdp_; }
  const SoftmaxPolicy& policy() const { return policy_; }

  const Eigen::MatrixXd& transition_under_policy() const { return p_pi_; }  // P*Pi
  const Eigen::MatrixXd& psi() const { return psi_; }                       // I - gamma*P*Pi

  Eigen::VectorXd solve_psi(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd solve_psi_transpose(const Eigen::VectorXd& rhs) const;
  const Eigen::PartialPivLU<Eigen::MatrixXd>& psi_lu() const;  // factored on first use

  const Eigen::VectorXd& occupancy() const;        // d
  const Eigen::VectorXd& state_occupancy() const;  // Xi d
  const Eigen::VectorXd& q_values() const;         // q_theta

  // J(theta). Computed in both the primal form (1-gamma)mu0^T Pi q and the
  // dual form d^T r; disagreement beyond the duality tolerance throws.
  double objective() const;

  Eigen::VectorXd bellman_residual(const Eigen::VectorXd& critic_values) const;

 private:
  const TabularMdp& mdp_;
  const SoftmaxPolicy& policy_;
  Eigen::MatrixXd p_pi_;
  Eigen::MatrixXd psi_;

  mutable bool have_lu_ = false;
  mutable Eigen::PartialPivLU<Eigen::MatrixXd> psi_lu_;
  mutable bool have_occupancy_ = false;
  mutable Eigen::VectorXd occupancy_;
  mutable Eigen::VectorXd state_occupancy_;
  mutable bool have_q_ = false;
  mutable Eigen::VectorXd q_values_;
};

// d such that d = (1-gamma)Pi^T mu0 + gamma Pi^T P^T d, by direct LU solve.
StationaryDistribution solve_stationary(const TabularMdp& mdp, const SoftmaxPolicy& policy);

// q solving (I - gamma*P*Pi) q = r.
Eigen::VectorXd solve_q_values(const TabularMdp& mdp, const SoftmaxPolicy& policy);

double policy_objective(const TabularMdp& mdp, const SoftmaxPolicy& policy);

// Bellman residual of a critic: delta = r + gamma*P*Pi*q_phi - q_phi.
Eigen::VectorXd residual(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                         const CriticTable& critic);

// (1-gamma) mu0^T Pi q_phi.
double actor_objective(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                       const CriticTable& critic);

// 0.5 * sum_sa weights(sa) * delta(sa)^2. Weights may be any nonnegative
// vector (replay-buffer empirical distributions included).
double critic_objective(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                        const CriticTable& critic, const Eigen::VectorXd& weights);

// w solving (I - gamma*P*Pi) w = residual_reward: the on-policy value of a
// residual treated as reward.
Eigen::VectorXd solve_res_q_values(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                   const Eigen::VectorXd& residual_reward);

}  // namespace acgap
