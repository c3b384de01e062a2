#include "acgap/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "acgap/envs.hpp"
#include "acgap/gradients.hpp"
#include "acgap/solvers.hpp"
#include "acgap/stackelberg.hpp"

namespace acgap {

namespace {
constexpr double kFdEps = 1e-5;
constexpr double kSoftmaxFdEps = 1e-6;
constexpr double kHessianFdEps = 1e-3;
}  // namespace

VerifyInstance make_instance(const InstanceFamily& family, int index) {
  const int n_s = family.state_sizes[index % family.state_sizes.size()];
  const int n_a =
      family.action_sizes[(index / family.state_sizes.size()) % family.action_sizes.size()];
  const double gamma =
      family.gammas[(index / (family.state_sizes.size() * family.action_sizes.size())) %
                    family.gammas.size()];
  SplitRng rng = SplitRng(family.base_seed).split(static_cast<std::uint64_t>(index));
  TabularMdp mdp = random_mdp(n_s, n_a, rng.next_u64(), family.reward_scale, gamma);
  const int sa = mdp.num_pairs();
  SoftmaxPolicy policy(n_s, n_a, rng.uniform_vector(sa, -family.logit_scale, family.logit_scale));
  CriticTable critic(rng.uniform_vector(sa, -family.critic_scale, family.critic_scale));
  return {std::move(mdp), std::move(policy), std::move(critic)};
}

Tolerances Tolerances::all(double value) {
  Tolerances t;
  t.duality = t.objective_gap = t.closed_form = t.residual_closure = t.psi_ones = value;
  t.mass_conservation = t.stackelberg = t.eta_limit = t.finite_diff = value;
  t.softmax_jacobian = t.hessian_fd = t.argmax_invariance = t.continuity_ratio = value;
  t.bias_positive_floor = t.bias_zero = value;
  return t;
}

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j;
  j["seed_begin"] = seed_begin;
  j["seed_end"] = seed_end;
  j["wall_time_seconds"] = wall_time_seconds;
  j["all_pass"] = all_pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"instances_run", c.instances_run},
                           {"max_abs_error", c.max_abs_error},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass}});
  return j;
}

void VerificationReport::print(std::ostream& out) const {
  for (const auto& c : checks) {
    out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  instances=" << c.instances_run
        << "  max_error=" << c.max_abs_error << "  tolerance=" << c.tolerance << "\n";
  }
  out << (all_pass() ? "RESULT: all checks passed" : "RESULT: CHECK FAILURES") << "  ("
      << checks.size() << " checks, seeds " << seed_begin << ".." << seed_end << ", "
      << wall_time_seconds << "s)\n";
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double eps) {
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

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double eps) {
  Eigen::VectorXd probe = x;
  probe[0] = x[0] + eps;
  Eigen::VectorXd sample = f(probe);
  probe[0] = x[0];
  Eigen::MatrixXd jac(x.size(), sample.size());
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

double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

double upsilon_fd_error(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                        const Eigen::MatrixXd& upsilon_candidate, double eps) {
  const auto occupancy_of = [&](const Eigen::VectorXd& logits) {
    SoftmaxPolicy probe(mdp.n_states, mdp.n_actions, logits);
    return solve_stationary(mdp, probe).joint;
  };
  const Eigen::MatrixXd fd = fd_jacobian(occupancy_of, policy.logits(), eps);
  return relative_error(upsilon_candidate, fd);
}

Eigen::VectorXd value_iteration_q(const TabularMdp& mdp, double tol, int max_iter) {
  mdp.validate();
  const int sa = mdp.num_pairs();
  Eigen::VectorXd q = Eigen::VectorXd::Zero(sa);
  Eigen::VectorXd best(mdp.n_states);
  const double step_tol =
      mdp.gamma > 0.0 ? tol * (1.0 - mdp.gamma) / mdp.gamma : tol;
  for (int iter = 0; iter < max_iter; ++iter) {
    for (int s = 0; s < mdp.n_states; ++s)
      best[s] = q.segment(s * mdp.n_actions, mdp.n_actions).maxCoeff();
    const Eigen::VectorXd next = mdp.reward + mdp.gamma * (mdp.transition * best);
    const double delta = (next - q).lpNorm<Eigen::Infinity>();
    q = next;
    if (delta < step_tol) return q;
  }
  throw std::runtime_error("value_iteration_q: did not converge");
}

double optimal_objective(const TabularMdp& mdp) {
  const Eigen::VectorXd q = value_iteration_q(mdp);
  double j = 0.0;
  for (int s = 0; s < mdp.n_states; ++s)
    j += mdp.init_dist[s] * q.segment(s * mdp.n_actions, mdp.n_actions).maxCoeff();
  return (1.0 - mdp.gamma) * j;
}

std::vector<BiasEntry> measure_stackelberg_bias(const TabularMdp& mdp,
                                                const SoftmaxPolicy& policy,
                                                const CriticTable& critic,
                                                const std::vector<std::size_t>& batch_sizes,
                                                SplitRng& rng) {
  ExactEvaluator ev(mdp, policy);
  const Eigen::VectorXd pg = grad_policy_exact(ev);
  const Eigen::VectorXd actor_init = grad_actor_initial(ev, critic);
  const GapCorrections corrections = gap_corrections(ev, critic);
  const Eigen::VectorXd& d = ev.occupancy();
  const Eigen::MatrixXd& jac = policy.jacobian();
  const int n_actions = mdp.n_actions;

  std::vector<BiasEntry> out;
  for (std::size_t n : batch_sizes) {
    Eigen::VectorXd correction_estimate;
    if (n == 0) {
      // Exhaustive exact weighting: the frozen-distribution estimator
      // recovers the residual-path term exactly, and nothing else.
      correction_estimate = corrections.residual_term;
    } else {
      correction_estimate = Eigen::VectorXd::Zero(policy.dim());
      for (std::size_t i = 0; i < n; ++i) {
        const int sa = rng.categorical(d);
        const int next = rng.categorical(mdp.transition.row(sa).transpose());
        // gamma * sum_a q(next, a) dlog-free jacobian column block
        correction_estimate.segment(next * n_actions, n_actions) +=
            (mdp.gamma / static_cast<double>(n)) *
            (jac.block(next * n_actions, next * n_actions, n_actions, n_actions) *
             critic.values.segment(next * n_actions, n_actions));
      }
    }
    out.push_back({n, (actor_init + correction_estimate - pg).norm()});
  }
  return out;
}

namespace {

struct Check {
  std::string name;
  double tolerance = 0.0;
  std::function<double(const VerifyInstance&, int index)> error;
};

}  // namespace

VerificationReport verify_all(const InstanceFamily& family, const Tolerances& tol) {
  const auto start = std::chrono::steady_clock::now();

  std::vector<Check> checks;
  checks.push_back({"duality", tol.duality, [](const VerifyInstance& in, int) {
                      ExactEvaluator ev(in.mdp, in.policy);
                      const double primal = (1.0 - in.mdp.gamma) *
                                            in.mdp.init_dist.dot(in.policy.expansion() *
                                                                 ev.q_values());
                      return std::abs(primal - ev.occupancy().dot(in.mdp.reward));
                    }});
  checks.push_back({"objective_gap", tol.objective_gap, [](const VerifyInstance& in, int) {
                      ExactEvaluator ev(in.mdp, in.policy);
                      const double gap = ev.objective() -
                                         actor_objective(in.mdp, in.policy, in.critic);
                      const double inner =
                          ev.occupancy().dot(ev.bellman_residual(in.critic.values));
                      return std::abs(gap - inner);
                    }});
  checks.push_back({"psi_ones", tol.psi_ones, [](const VerifyInstance& in, int) {
                      ExactEvaluator ev(in.mdp, in.policy);
                      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(in.mdp.num_pairs());
                      return (ev.psi() * ones - (1.0 - in.mdp.gamma) * ones)
                          .lpNorm<Eigen::Infinity>();
                    }});
  checks.push_back({"residual_closure", tol.residual_closure, [](const VerifyInstance& in, int) {
                      ExactEvaluator ev(in.mdp, in.policy);
                      const Eigen::VectorXd closure =
                          in.critic.values +
                          ev.solve_psi(ev.bellman_residual(in.critic.values));
                      return (closure - ev.q_values()).lpNorm<Eigen::Infinity>();
                    }});
  checks.push_back(
      {"softmax_jacobian_fd", tol.softmax_jacobian, [](const VerifyInstance& in, int) {
         const auto probs_of = [&](const Eigen::VectorXd& logits) {
           return SoftmaxPolicy(in.mdp.n_states, in.mdp.n_actions, logits).probs();
         };
         const Eigen::MatrixXd fd = fd_jacobian(probs_of, in.policy.logits(), kSoftmaxFdEps);
         return relative_error(in.policy.jacobian(), fd);
       }});
  checks.push_back({"pg_identity_initial", tol.closed_form, [](const VerifyInstance& in, int) {
                      const GradientReport r =
                          compute_gradient_report(in.mdp, in.policy, in.critic);
                      return (r.grad_pg - r.grad_actor_initial - r.corrections.total)
                          .lpNorm<Eigen::Infinity>();
                    }});
  checks.push_back({"pg_identity_occupancy", tol.closed_form, [](const VerifyInstance& in, int) {
                      const GradientReport r =
                          compute_gradient_report(in.mdp, in.policy, in.critic);
                      return (r.grad_pg - r.grad_actor_occupancy -
                              r.corrections.occupancy_term)
                          .lpNorm<Eigen::Infinity>();
                    }});
  checks.push_back({"actor_gradient_chain", tol.closed_form, [](const VerifyInstance& in, int) {
                      const GradientReport r =
                          compute_gradient_report(in.mdp, in.policy, in.critic);
                      return (r.grad_actor_occupancy - r.grad_actor_initial -
                              r.corrections.residual_term)
                          .lpNorm<Eigen::Infinity>();
                    }});
  checks.push_back({"upsilon_mass", tol.mass_conservation, [](const VerifyInstance& in, int) {
                      const Eigen::MatrixXd upsilon =
                          stationary_derivative(in.mdp, in.policy);
                      return (upsilon * Eigen::VectorXd::Ones(upsilon.cols()))
                          .lpNorm<Eigen::Infinity>();
                    }});
  checks.push_back({"upsilon_fd", tol.finite_diff, [](const VerifyInstance& in, int) {
                      return upsilon_fd_error(in.mdp, in.policy,
                                              stationary_derivative(in.mdp, in.policy), kFdEps);
                    }});
  checks.push_back({"pg_fd", tol.finite_diff, [](const VerifyInstance& in, int) {
                      const auto j_of = [&](const Eigen::VectorXd& logits) {
                        return policy_objective(
                            in.mdp, SoftmaxPolicy(in.mdp.n_states, in.mdp.n_actions, logits));
                      };
                      const Eigen::VectorXd fd = fd_gradient(j_of, in.policy.logits(), kFdEps);
                      return relative_error(grad_policy_exact(in.mdp, in.policy), fd);
                    }});
  checks.push_back({"actor_initial_fd", tol.finite_diff, [](const VerifyInstance& in, int) {
                      const auto j_of = [&](const Eigen::VectorXd& logits) {
                        return actor_objective(
                            in.mdp, SoftmaxPolicy(in.mdp.n_states, in.mdp.n_actions, logits),
                            in.critic);
                      };
                      const Eigen::VectorXd fd = fd_gradient(j_of, in.policy.logits(), kFdEps);
                      return relative_error(grad_actor_initial(in.mdp, in.policy, in.critic),
                                            fd);
                    }});
  checks.push_back({"correction_total_fd", tol.finite_diff, [](const VerifyInstance& in, int) {
                      const auto gap_of = [&](const Eigen::VectorXd& logits) {
                        SoftmaxPolicy probe(in.mdp.n_states, in.mdp.n_actions, logits);
                        ExactEvaluator ev(in.mdp, probe);
                        return ev.occupancy().dot(ev.bellman_residual(in.critic.values));
                      };
                      const Eigen::VectorXd fd = fd_gradient(gap_of, in.policy.logits(), kFdEps);
                      const GapCorrections c = gap_corrections(in.mdp, in.policy, in.critic);
                      return relative_error(c.total, fd);
                    }});
  checks.push_back({"critic_full_fd", tol.finite_diff, [](const VerifyInstance& in, int) {
                      ExactEvaluator ev(in.mdp, in.policy);
                      const Eigen::VectorXd weights = ev.occupancy();
                      const auto loss_of = [&](const Eigen::VectorXd& values) {
                        return critic_objective(in.mdp, in.policy, CriticTable(values), weights);
                      };
                      const Eigen::VectorXd fd =
                          fd_gradient(loss_of, in.critic.values, kFdEps);
                      return relative_error(
                          grad_critic_full(in.mdp, in.policy, in.critic, weights), fd);
                    }});
  checks.push_back({"stackelberg_full", tol.stackelberg, [](const VerifyInstance& in, int) {
                      return (stackelberg_gradient_full(in.mdp, in.policy, in.critic) -
                              grad_policy_exact(in.mdp, in.policy))
                          .lpNorm<Eigen::Infinity>();
                    }});
  checks.push_back({"stackelberg_semi", tol.stackelberg, [](const VerifyInstance& in, int) {
                      return (stackelberg_gradient_semi(in.mdp, in.policy, in.critic) -
                              grad_policy_exact(in.mdp, in.policy))
                          .lpNorm<Eigen::Infinity>();
                    }});
  checks.push_back({"stackelberg_eta_limit", tol.eta_limit, [](const VerifyInstance& in, int) {
                      ExactEvaluator ev(in.mdp, in.policy);
                      const Eigen::VectorXd g = stackelberg_gradient_regularized(
                          ev, in.critic, 1e12, ev.occupancy());
                      return (g - grad_actor_initial(ev, in.critic)).lpNorm<Eigen::Infinity>();
                    }});
  checks.push_back({"hessian_fd", tol.hessian_fd, [](const VerifyInstance& in, int) {
                      ExactEvaluator ev(in.mdp, in.policy);
                      const Eigen::VectorXd weights = ev.occupancy();
                      const int sa = in.mdp.num_pairs();
                      const auto loss_of = [&](const Eigen::VectorXd& values) {
                        return critic_objective(in.mdp, in.policy, CriticTable(values), weights);
                      };
                      Eigen::MatrixXd fd(sa, sa);
                      Eigen::VectorXd probe = in.critic.values;
                      const double eps = kHessianFdEps;
                      for (int i = 0; i < sa; ++i)
                        for (int j = 0; j < sa; ++j) {
                          probe = in.critic.values;
                          probe[i] += eps;
                          probe[j] += eps;
                          const double pp = loss_of(probe);
                          probe = in.critic.values;
                          probe[i] += eps;
                          probe[j] -= eps;
                          const double pm = loss_of(probe);
                          probe = in.critic.values;
                          probe[i] -= eps;
                          probe[j] += eps;
                          const double mp = loss_of(probe);
                          probe = in.critic.values;
                          probe[i] -= eps;
                          probe[j] -= eps;
                          const double mm = loss_of(probe);
                          fd(i, j) = (pp - pm - mp + mm) / (4.0 * eps * eps);
                        }
                      const StackelbergTerms terms =
                          stackelberg_terms(in.mdp, in.policy, in.critic);
                      return relative_error(terms.hessian, fd);
                    }});
  checks.push_back(
      {"argmax_invariance", tol.argmax_invariance, [](const VerifyInstance& in, int index) {
         ExactEvaluator ev(in.mdp, in.policy);
         SplitRng rng(0xA11CE5ULL + static_cast<std::uint64_t>(index));
         const Eigen::VectorXd per_state =
             rng.uniform_vector(in.mdp.n_states, -1.0, 1.0);
         CriticTable shifted(Eigen::VectorXd(
             in.critic.values + expand_over_actions(per_state, in.mdp.n_actions)));
         const double err_init = (grad_actor_initial(ev, shifted) -
                                  grad_actor_initial(ev, in.critic))
                                     .lpNorm<Eigen::Infinity>();
         const double err_occ = (grad_actor_occupancy(ev, shifted) -
                                 grad_actor_occupancy(ev, in.critic))
                                    .lpNorm<Eigen::Infinity>();
         return std::max(err_init, err_occ);
       }});
  checks.push_back(
      {"regularized_continuity", tol.continuity_ratio, [](const VerifyInstance& in, int) {
         ExactEvaluator ev(in.mdp, in.policy);
         const Eigen::VectorXd& d = ev.occupancy();
         const auto g = [&](double eta) {
           return stackelberg_gradient_regularized(ev, in.critic, eta, d);
         };
         const double de = 1e-6;
         const double err = (g(0.5 + de) - g(0.5)).lpNorm<Eigen::Infinity>();
         const double slope = (g(0.6) - g(0.4)).lpNorm<Eigen::Infinity>() / 0.2;
         return err / (std::max(slope, 1.0) * de);
       }});
  checks.push_back(
      {"bias_exhaustive_positive", 0.0, [&](const VerifyInstance& in, int index) {
         SplitRng rng(0xB1A5ULL + static_cast<std::uint64_t>(index));
         const auto bias =
             measure_stackelberg_bias(in.mdp, in.policy, in.critic, {0}, rng);
         // Shortfall below the positivity floor; 0 when strictly positive.
         return std::max(0.0, tol.bias_positive_floor - bias.front().gap);
       }});
  checks.push_back({"bias_zero_at_exact_critic", tol.bias_zero,
                    [](const VerifyInstance& in, int index) {
                      SplitRng rng(0xB1A6ULL + static_cast<std::uint64_t>(index));
                      CriticTable exact(solve_q_values(in.mdp, in.policy));
                      const auto bias =
                          measure_stackelberg_bias(in.mdp, in.policy, exact, {0}, rng);
                      return bias.front().gap;
                    }});

  VerificationReport report;
  report.seed_begin = family.base_seed;
  report.seed_end = family.base_seed + static_cast<std::uint64_t>(family.instances) - 1;
  for (const Check& check : checks) {
    CheckResult result;
    result.name = check.name;
    result.tolerance = check.tolerance;
    result.instances_run = family.instances;
    double worst = 0.0;
    for (int i = 0; i < family.instances; ++i) {
      const VerifyInstance instance = make_instance(family, i);
      worst = std::max(worst, check.error(instance, i));
    }
    result.max_abs_error = worst;
    result.pass = worst <= check.tolerance;
    report.checks.push_back(std::move(result));
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace acgap
