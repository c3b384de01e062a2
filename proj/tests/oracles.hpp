#pragma once

// Test-only oracles: truncated series, distribution-space rollouts and
// finite differences. Deliberately independent of the library's linear-solve
// paths so they can certify them.

#include <functional>

#include <Eigen/Core>

#include "acgap/mdp.hpp"
#include "acgap/policy.hpp"
#include "acgap/rng.hpp"

namespace acgap::testing {

// Discounted occupancy by rolling the chain in distribution space:
// sum_{i<=T} (1-gamma) gamma^i Pr(S_i, A_i), T chosen so gamma^T < tail_tol.
inline Eigen::VectorXd occupancy_series(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                        double tail_tol = 1e-12) {
  Eigen::VectorXd step(mdp.num_pairs());
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a)
      step[mdp.pair_index(s, a)] = mdp.init_dist[s] * policy.prob(s, a);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(mdp.num_pairs());
  double weight = 1.0 - mdp.gamma;
  for (double tail = 1.0; tail >= tail_tol; tail *= mdp.gamma) {
    total += weight * step;
    weight *= mdp.gamma;
    const Eigen::VectorXd state_mass = mdp.transition.transpose() * step;
    for (int s = 0; s < mdp.n_states; ++s)
      for (int a = 0; a < mdp.n_actions; ++a)
        step[mdp.pair_index(s, a)] = state_mass[s] * policy.prob(s, a);
  }
  return total;
}

// Q-values by truncated Neumann series sum_i (gamma P Pi)^i r.
inline Eigen::VectorXd q_values_series(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                       double tail_tol = 1e-12) {
  const Eigen::MatrixXd p_pi = mdp.transition * policy.expansion();
  Eigen::VectorXd term = mdp.reward;
  Eigen::VectorXd total = Eigen::VectorXd::Zero(mdp.num_pairs());
  for (double tail = 1.0; tail >= tail_tol; tail *= mdp.gamma) {
    total += term;
    term = mdp.gamma * (p_pi * term);
  }
  return total;
}

inline double discounted_return_series(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                       double tail_tol = 1e-12) {
  return occupancy_series(mdp, policy, tail_tol).dot(mdp.reward);
}

inline Eigen::VectorXd central_diff_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double eps) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + eps;
    const double hi = f(probe);
    probe[i] = x[i] - eps;
    const double lo = f(probe);
    probe[i] = x[i];
    grad[i] = (hi - lo) / (2.0 * eps);
  }
  return grad;
}

// [i][j] = d f_j / d x_i.
inline Eigen::MatrixXd central_diff_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double eps) {
  Eigen::VectorXd probe = x;
  probe[0] += eps;
  const Eigen::Index out_dim = f(probe).size();
  probe[0] = x[0];
  Eigen::MatrixXd jac(x.size(), out_dim);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + eps;
    const Eigen::VectorXd hi = f(probe);
    probe[i] = x[i] - eps;
    const Eigen::VectorXd lo = f(probe);
    probe[i] = x[i];
    jac.row(i) = ((hi - lo) / (2.0 * eps)).transpose();
  }
  return jac;
}

inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

inline SoftmaxPolicy random_policy(int n_states, int n_actions, std::uint64_t seed,
                                   double scale = 2.0) {
  SplitRng rng(seed);
  return SoftmaxPolicy(n_states, n_actions,
                       rng.uniform_vector(n_states * n_actions, -scale, scale));
}

inline Eigen::VectorXd random_values(Eigen::Index n, std::uint64_t seed, double scale = 2.0) {
  SplitRng rng(seed);
  return rng.uniform_vector(n, -scale, scale);
}

}  // namespace acgap::testing
