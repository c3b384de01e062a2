#include "acgap/stackelberg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <sstream>
#include <stdexcept>

namespace acgap {

namespace {

constexpr double kSingularEig = 1e-12;
constexpr double kMarginalEig = 1e-10;
constexpr double kSupportFloor = 1e-300;
constexpr double kOnPolicyTol = 1e-12;

void require_full_support(const Eigen::VectorXd& d) {
  if (d.minCoeff() <= kSupportFloor)
    throw std::runtime_error(
        "stackelberg: occupancy lost full support (best-response assumption violated)");
}

// H * diag(Xi^T per_state) * values, the recurring contraction.
Eigen::VectorXd h_weighted(const ExactEvaluator& ev, const Eigen::VectorXd& per_state,
                           const Eigen::VectorXd& values) {
  return ev.policy().jacobian() *
         expand_over_actions(per_state, ev.mdp().n_actions).cwiseProduct(values);
}

}  // namespace

StackelbergTerms stackelberg_terms(const ExactEvaluator& ev, const CriticTable& critic,
                                   double eta) {
  const TabularMdp& mdp = ev.mdp();
  const int sa = mdp.num_pairs();
  if (critic.values.size() != sa)
    throw std::invalid_argument("stackelberg_terms: critic has wrong length");
  const Eigen::VectorXd& d = ev.occupancy();
  require_full_support(d);

  const Eigen::VectorXd delta = ev.bellman_residual(critic.values);
  const Eigen::MatrixXd& psi = ev.psi();
  const Eigen::MatrixXd& jac = ev.policy().jacobian();
  const Eigen::MatrixXd upsilon = stationary_derivative(ev);

  StackelbergTerms terms;
  terms.eta = eta;
  terms.hessian = psi.transpose() * d.asDiagonal() * psi;
  terms.semi_hessian = d;
  terms.dq_jpi = (1.0 - mdp.gamma) * ev.policy().expansion().transpose() * mdp.init_dist;
  terms.dq_jpi_semi = d;

  // d/dtheta of (dJq/dq) = d/dtheta of (-Psi^T D delta), differentiated
  // through the Bellman operator, the occupancy weights and the residual:
  //   gamma H diag(Xi^T P^T D delta) - Upsilon diag(delta) Psi
  //   - gamma diag(H q) R,   R row (s,b) = (Psi^T D P) column s.
  const Eigen::VectorXd c = mdp.transition.transpose() * d.cwiseProduct(delta);
  const Eigen::MatrixXd k = psi.transpose() * d.asDiagonal() * mdp.transition;  // (S*A) x S
  const Eigen::VectorXd t = jac * critic.values;  // t(i) = sum_a H[i,(s_i,a)] q(s_i,a)

  Eigen::MatrixXd cross =
      mdp.gamma * jac * expand_over_actions(c, mdp.n_actions).asDiagonal();
  cross.noalias() -= upsilon * delta.asDiagonal() * psi;
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a) {
      const int i = s * mdp.n_actions + a;
      cross.row(i).noalias() -= mdp.gamma * t[i] * k.col(s).transpose();
    }
  terms.cross_term = std::move(cross);
  return terms;
}

StackelbergTerms stackelberg_terms(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                   const CriticTable& critic, double eta) {
  ExactEvaluator ev(mdp, policy);
  return stackelberg_terms(ev, critic, eta);
}

Eigen::VectorXd stackelberg_gradient_full(const ExactEvaluator& ev, const CriticTable& critic) {
  const StackelbergTerms terms = stackelberg_terms(ev, critic);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(terms.hessian,
                                                           Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < kSingularEig) {
    std::ostringstream msg;
    msg << "stackelberg_gradient_full: critic Hessian is numerically singular (min eigenvalue "
        << min_eig << ")";
    throw std::runtime_error(msg.str());
  }
  Eigen::VectorXd v;
  if (min_eig < kMarginalEig) {
    v = terms.hessian.completeOrthogonalDecomposition().solve(terms.dq_jpi);
  } else {
    v = terms.hessian.ldlt().solve(terms.dq_jpi);
  }
  return grad_actor_initial(ev, critic) - terms.cross_term * v;
}

Eigen::VectorXd stackelberg_gradient_full(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                          const CriticTable& critic) {
  ExactEvaluator ev(mdp, policy);
  return stackelberg_gradient_full(ev, critic);
}

Eigen::VectorXd stackelberg_gradient_semi(const ExactEvaluator& ev, const CriticTable& critic) {
  const TabularMdp& mdp = ev.mdp();
  if (critic.values.size() != mdp.num_pairs())
    throw std::invalid_argument("stackelberg_gradient_semi: critic has wrong length");
  const Eigen::VectorXd& d = ev.occupancy();
  require_full_support(d);
  const Eigen::VectorXd v = d.cwiseQuotient(d);  // semi-Hessian^{-1} dJpi/dq
  const Eigen::VectorXd delta = ev.bellman_residual(critic.values);
  const Eigen::VectorXd next_weight = mdp.transition.transpose() * d.cwiseProduct(v);
  return grad_actor_initial(ev, critic) + stationary_derivative(ev) * delta.cwiseProduct(v) +
         mdp.gamma * h_weighted(ev, next_weight, critic.values);
}

Eigen::VectorXd stackelberg_gradient_semi(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                          const CriticTable& critic) {
  ExactEvaluator ev(mdp, policy);
  return stackelberg_gradient_semi(ev, critic);
}

Eigen::VectorXd stackelberg_gradient_regularized(const ExactEvaluator& ev,
                                                 const CriticTable& critic, double eta,
                                                 const Eigen::VectorXd& weights) {
  const TabularMdp& mdp = ev.mdp();
  if (critic.values.size() != mdp.num_pairs() || weights.size() != mdp.num_pairs())
    throw std::invalid_argument("stackelberg_gradient_regularized: size mismatch");
  if (eta < 0.0)
    throw std::invalid_argument("stackelberg_gradient_regularized: eta must be >= 0");
  if (weights.minCoeff() < 0.0)
    throw std::invalid_argument("stackelberg_gradient_regularized: negative weights");
  if (eta == 0.0 && weights.minCoeff() <= 0.0)
    throw std::runtime_error(
        "stackelberg_gradient_regularized: eta > 0 required without full-support weights");

  const Eigen::VectorXd& d = ev.occupancy();
  const Eigen::VectorXd v = (d.array() / (weights.array() + eta)).matrix();  // (D+eta I)^{-1} d
  const Eigen::VectorXd next_weight = mdp.transition.transpose() * weights.cwiseProduct(v);
  Eigen::VectorXd grad = grad_actor_initial(ev, critic) +
                         mdp.gamma * h_weighted(ev, next_weight, critic.values);
  const bool on_policy = (weights - d).lpNorm<Eigen::Infinity>() <= kOnPolicyTol;
  if (on_policy) {
    const Eigen::VectorXd delta = ev.bellman_residual(critic.values);
    grad += stationary_derivative(ev) * delta.cwiseProduct(v);
  }
  return grad;
}

Eigen::VectorXd stackelberg_gradient_regularized(const TabularMdp& mdp,
                                                 const SoftmaxPolicy& policy,
                                                 const CriticTable& critic, double eta,
                                                 const Eigen::VectorXd& weights) {
  ExactEvaluator ev(mdp, policy);
  return stackelberg_gradient_regularized(ev, critic, eta, weights);
}

Eigen::MatrixXd stackelberg_cross_term_sampled(const std::vector<Transition>& batch,
                                               const SoftmaxPolicy& policy,
                                               const CriticTable& critic, double gamma,
                                               const std::vector<double>& weights) {
  if (batch.empty()) throw std::invalid_argument("stackelberg_cross_term_sampled: empty batch");
  if (!weights.empty() && weights.size() != batch.size())
    throw std::invalid_argument("stackelberg_cross_term_sampled: weights/batch size mismatch");
  const int n_actions = policy.n_actions();
  const int sa = policy.dim();
  if (critic.values.size() != sa)
    throw std::invalid_argument("stackelberg_cross_term_sampled: critic has wrong length");

  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(sa, sa);
  const double uniform_weight = 1.0 / static_cast<double>(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Transition& t = batch[b];
    const double w = weights.empty() ? uniform_weight : weights[b];
    const int ns = t.next_state;
    // d(delta_b)/dtheta restricted to the next-state block: the target's
    // expected critic value is the only pi-dependent piece.
    const Eigen::VectorXd inner =
        policy.jacobian().block(ns * n_actions, ns * n_actions, n_actions, n_actions) *
        critic.values.segment(ns * n_actions, n_actions);
    cross.block(ns * n_actions, policy.pair_index(t.state, t.action), n_actions, 1) -=
        w * gamma * inner;
  }
  return cross;
}

}  // namespace acgap
