#pragma once

#include <vector>

#include <Eigen/Core>

#include "acgap/critic.hpp"
#include "acgap/gradients.hpp"
#include "acgap/replay.hpp"
#include "acgap/solvers.hpp"

namespace acgap {

// Ingredients of the bilevel (leader = actor, follower = critic) gradient.
// The critic must be tabular, its loss weighted by the on-policy occupancy,
// with mu0 and pi of full support for the full Hessian to be invertible.
struct StackelbergTerms {
  // Mixed derivative of the critic gradient w.r.t. the logits,
  // [i][sa] = d/dtheta_i of (dJq/dq)(sa), differentiated through the
  // residual, the Bellman operator and the occupancy weighting.
  Eigen::MatrixXd cross_term;     // (dim theta) x (S*A)
  Eigen::MatrixXd hessian;        // Psi^T D Psi (full critic Hessian)
  Eigen::VectorXd semi_hessian;   // diagonal of the semi Hessian, equals d
  Eigen::VectorXd dq_jpi;         // dJpi/dq = (1-gamma) Pi^T mu0
  Eigen::VectorXd dq_jpi_semi;    // semi form of the same derivative, equals d
  double eta = 0.0;               // Hessian ridge used by the regularized update
};

StackelbergTerms stackelberg_terms(const ExactEvaluator& ev, const CriticTable& critic,
                                   double eta = 0.0);
StackelbergTerms stackelberg_terms(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                   const CriticTable& critic, double eta = 0.0);

// Leader gradient with the follower at its best response, full critic
// Hessian: dJpi/dtheta - cross^T Hessian^{-1} dJpi/dq. Equals the exact
// policy gradient when the assumptions above hold. Throws when the Hessian
// is numerically singular (smallest eigenvalue < 1e-12); falls back to a
// least-squares solve when it is merely marginal (< 1e-10).
Eigen::VectorXd stackelberg_gradient_full(const ExactEvaluator& ev, const CriticTable& critic);
Eigen::VectorXd stackelberg_gradient_full(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                          const CriticTable& critic);

// Same leader gradient with the semi (frozen-target) critic derivative:
// the Hessian collapses to diag(d) and dJpi/dq to d. Also equals the exact
// policy gradient.
Eigen::VectorXd stackelberg_gradient_semi(const ExactEvaluator& ev, const CriticTable& critic);
Eigen::VectorXd stackelberg_gradient_semi(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                          const CriticTable& critic);

// Ridge-regularized semi variant with an arbitrary nonnegative critic-loss
// weighting: dJpi/dtheta - cross^T (diag(weights) + eta I)^{-1} d.
// With eta = 0 and weights = d it reduces to stackelberg_gradient_semi;
// eta > 0 is required when the weights lack full support.
//
// The cross term differentiates through the weighting distribution only when
// the weights equal the current exact occupancy (max-abs diff <= 1e-12);
// any other weight vector is treated as a fixed replay distribution, whose
// theta-derivative does not exist.
Eigen::VectorXd stackelberg_gradient_regularized(const ExactEvaluator& ev,
                                                 const CriticTable& critic, double eta,
                                                 const Eigen::VectorXd& weights);
Eigen::VectorXd stackelberg_gradient_regularized(const TabularMdp& mdp,
                                                 const SoftmaxPolicy& policy,
                                                 const CriticTable& critic, double eta,
                                                 const Eigen::VectorXd& weights);

// Sample estimate of the semi cross term from a batch of transitions. The
// batch distribution is treated as theta-independent, so only the
// residual-through-pi dependence is differentiated: this estimator is
// structurally BIASED relative to the exact cross term (it cannot see the
// occupancy's theta-dependence), which measure_stackelberg_bias quantifies.
// Entry [i][sa] accumulates -weight_b * gamma * sum_a~ q(s~_b, a~) H[i, (s~_b, a~)]
// over batch entries with (s_b, a_b) = (s, a). Default weights are 1/|batch|.
Eigen::MatrixXd stackelberg_cross_term_sampled(const std::vector<Transition>& batch,
                                               const SoftmaxPolicy& policy,
                                               const CriticTable& critic, double gamma,
                                               const std::vector<double>& weights = {});

}  // namespace acgap
