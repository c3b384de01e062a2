#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "acgap/critic.hpp"
#include "acgap/mdp.hpp"
#include "acgap/policy.hpp"
#include "acgap/rng.hpp"

namespace acgap {

// Seeded family of random (mdp, policy, critic) triples the identity and
// oracle checks run over. Sizes and discounts are cycled so every
// combination appears.
struct InstanceFamily {
  std::vector<int> state_sizes{2, 3, 4, 6};
  std::vector<int> action_sizes{2, 3};
  std::vector<double> gammas{0.5, 0.9, 0.99};
  int instances = 100;
  std::uint64_t base_seed = 20240001ULL;
  double reward_scale = 1.0;
  double logit_scale = 2.0;
  double critic_scale = 2.0;
};

struct VerifyInstance {
  TabularMdp mdp;
  SoftmaxPolicy policy;
  CriticTable critic;
};

VerifyInstance make_instance(const InstanceFamily& family, int index);

struct Tolerances {
  double duality = 1e-10;
  double objective_gap = 1e-10;
  double closed_form = 1e-9;
  double residual_closure = 1e-9;
  double psi_ones = 1e-12;
  double mass_conservation = 1e-9;
  double stackelberg = 1e-8;
  double eta_limit = 1e-6;
  double finite_diff = 1e-4;       // relative, vs central differences
  double softmax_jacobian = 1e-5;  // relative
  double hessian_fd = 1e-3;        // relative
  double argmax_invariance = 1e-10;
  double continuity_ratio = 10.0;  // ||g(eta+de)-g(eta)|| vs local-slope * de
  double bias_positive_floor = 1e-12;
  double bias_zero = 1e-9;

  // Every tolerance set to the same value (negative controls).
  static Tolerances all(double value);
};

struct CheckResult {
  std::string name;
  int instances_run = 0;
  double max_abs_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;  // max_abs_error <= tolerance on every instance
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  std::uint64_t seed_begin = 0;
  std::uint64_t seed_end = 0;
  double wall_time_seconds = 0.0;

  bool all_pass() const;
  nlohmann::json to_json() const;
  void print(std::ostream& out) const;
};

// Runs every registered identity/oracle check over the family. Each check
// reports its worst error across instances; a report passes only if every
// check stays within its tolerance.
VerificationReport verify_all(const InstanceFamily& family, const Tolerances& tol);

// --- oracle utilities (independent of the closed forms they audit) ---

// Central-difference gradient of a scalar function, eps = probe step.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double eps);

// Central-difference Jacobian, [i][j] = d f_j / d x_i.
Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double eps);

// inf-norm difference scaled by max(1, |a|, |b|).
double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Worst relative error of a candidate occupancy derivative against central
// differences of the exact occupancy. Exposed so tests can feed corrupted
// candidates and watch the check fail.
double upsilon_fd_error(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                        const Eigen::MatrixXd& upsilon_candidate, double eps = 1e-5);

// Optimal state-action values by value iteration (sup-norm tolerance on the
// fixed point, not the step).
Eigen::VectorXd value_iteration_q(const TabularMdp& mdp, double tol = 1e-12,
                                  int max_iter = 1000000);

// Optimal objective (1-gamma) * sum_s mu0(s) max_a q*(s, a).
double optimal_objective(const TabularMdp& mdp);

// Gap between the frozen-batch-distribution bilevel update and the exact
// policy gradient, by batch size (size 0 = exhaustive exact weighting; the
// estimator's structural bias, which does not vanish with more samples).
struct BiasEntry {
  std::size_t batch_size = 0;
  double gap = 0.0;  // l2 norm
};

std::vector<BiasEntry> measure_stackelberg_bias(const TabularMdp& mdp,
                                                const SoftmaxPolicy& policy,
                                                const CriticTable& critic,
                                                const std::vector<std::size_t>& batch_sizes,
                                                SplitRng& rng);

}  // namespace acgap
