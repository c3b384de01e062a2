#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "acgap/critic.hpp"
#include "acgap/mdp.hpp"
#include "acgap/optim.hpp"
#include "acgap/policy.hpp"
#include "acgap/replay.hpp"
#include "acgap/rng.hpp"
#include "acgap/trace.hpp"

namespace acgap {

enum class SampleAlgorithm { ActorO, ActorG, StackAC, ResAC };

std::string to_string(SampleAlgorithm algorithm);
SampleAlgorithm sample_algorithm_from_string(const std::string& name);

struct SampleAgentConfig {
  SampleAlgorithm algorithm = SampleAlgorithm::ResAC;
  int episodes = 1000;
  int batch_size = 300;
  int episode_length = 300;
  double actor_lr = 0.01;
  double critic_lr = 0.02;
  double res_critic_lr = 0.02;
  double eta = 0.5;                  // Stack-AC Hessian ridge
  std::optional<double> clip_c;     // res-critic reward clip; off by default
  int critic_steps = 1;
  int res_critic_steps = 1;
  OptimizerKind optimizer = OptimizerKind::Adam;
  // uniform(-scale, scale) seeded init; zero scale = uniform policy / zero tables
  double logit_init_scale = 0.0;
  double value_init_scale = 0.0;

  void validate() const;
};

// Scalar objective/loss value plus its gradient w.r.t. the owning table.
struct SampleLoss {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

// Weighted score-function objective over explicit (state, action) pairs:
// sum_i w_i * log pi(a_i | s_i) * values(s_i, a_i), gradient w.r.t. the
// logits with `values` treated as constant. Uniform 1/n weights when empty.
// This is the core every actor estimator below reduces to.
SampleLoss weighted_score_objective(const std::vector<std::pair<int, int>>& state_actions,
                                    const std::vector<double>& weights,
                                    const SoftmaxPolicy& policy, const Eigen::VectorXd& values);

// Mean squared TD error over the batch, targets r + gamma*q'(s~,a~) frozen
// (semi-gradient: the gradient flows only through q(s,a)). No 1/2 factor.
SampleLoss sample_critic_loss(const std::vector<Transition>& batch, const CriticTable& critic,
                              double gamma, int n_actions,
                              const std::vector<double>& weights = {});

// Score-function actor estimate weighted by initial states; one action is
// drawn fresh from the current policy per batch state. The critic value is a
// constant w.r.t. the logits.
SampleLoss actor_o_objective(const std::vector<int>& initial_states, const SoftmaxPolicy& policy,
                             const CriticTable& critic, SplitRng& rng);

// Same estimator over stored on-policy transitions.
SampleLoss actor_g_objective(const std::vector<Transition>& batch, const SoftmaxPolicy& policy,
                             const CriticTable& critic, const std::vector<double>& weights = {});

// Mean squared residual-value TD error. The per-transition reward is the
// critic's TD error delta' = r + gamma q'(s~,a~) - q'(s,a) (critic frozen),
// optionally clipped to [-clip_c, clip_c]; the bootstrap target w'(s~,a~) is
// frozen as well.
SampleLoss res_critic_loss(const std::vector<Transition>& batch, const CriticTable& critic,
                           const ResCriticTable& res_critic, double gamma, int n_actions,
                           std::optional<double> clip_c = std::nullopt,
                           const std::vector<double>& weights = {});

// Actor estimate driven by critic + residual-critic values.
SampleLoss res_actor_objective(const std::vector<Transition>& batch, const SoftmaxPolicy& policy,
                               const CriticTable& critic, const ResCriticTable& res_critic,
                               const std::vector<double>& weights = {});

// Sampled bilevel actor direction: the initial-state actor estimate minus
// cross^T (diag(d~) + eta I)^{-1} d~, where d~ is the empirical state-action
// distribution of batch_d and cross is the frozen-batch sampled cross term
// (biased; see stackelberg.hpp). Pairs absent from batch_d carry zero
// empirical Hessian mass and enter only through the eta ridge. Requires
// eta > 0.
Eigen::VectorXd stack_actor_update(const std::vector<int>& batch_o,
                                   const std::vector<Transition>& batch_d,
                                   const SoftmaxPolicy& policy, const CriticTable& critic,
                                   double eta, double gamma, SplitRng& rng,
                                   const std::vector<double>& weights_o = {},
                                   const std::vector<double>& weights_d = {});

// Empirical state-action frequencies of a batch (optionally weighted).
Eigen::VectorXd empirical_pair_distribution(const std::vector<Transition>& batch, int n_states,
                                            int n_actions,
                                            const std::vector<double>& weights = {});

// Runs one agent on the MDP: per episode, collect `episode_length` steps,
// one actor update, then `critic_steps` critic updates and (Res-AC)
// `res_critic_steps` residual-critic updates, each on a fresh batch drawn
// with replacement from the episode buffer.
//
// Trace columns: episode, env_steps, exact_j (model-exact J of the
// post-update policy), empirical_return ((1-gamma)-discounted return of the
// episode just collected), critic_loss; Res-AC adds res_critic_loss,
// critic_pred_j and combined_pred_j (initial-state returns predicted by the
// critic and by critic + residual critic).
TrainingTrace run_sample_agent(const TabularMdp& env, const SampleAgentConfig& config,
                               std::uint64_t seed);

}  // namespace acgap
