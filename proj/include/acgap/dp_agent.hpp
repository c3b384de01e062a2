#pragma once

#include <cstdint>
#include <string>

#include "acgap/mdp.hpp"
#include "acgap/optim.hpp"
#include "acgap/trace.hpp"

namespace acgap {

// Actor update rules for the exact dynamic-programming loops.
//   PolicyGradient  ascend the exact policy gradient (uses q_theta)
//   ActorO          ascend the initial-state-weighted critic gradient
//   ActorG          ascend the occupancy-weighted critic gradient
//   StackFull       bilevel gradient, full critic Hessian
//   StackSemi       bilevel gradient, semi (frozen-target) Hessian
//   ResAC           ActorG plus the residual-critic correction
//   Greedy          set logits greedily w.r.t. the critic (policy improvement)
enum class ActorRule { PolicyGradient, ActorO, ActorG, StackFull, StackSemi, ResAC, Greedy };

// Critic update rules (all weighted by the exact current occupancy):
//   BellmanResidualFull  descend -Psi^T D delta (true gradient)
//   TemporalDifferenceSemi descend -D delta (target frozen)
//   ExactEvaluation      q <- q_theta each iteration
//   None                 critic frozen
enum class CriticRule { BellmanResidualFull, TemporalDifferenceSemi, ExactEvaluation, None };

std::string to_string(ActorRule rule);
std::string to_string(CriticRule rule);
ActorRule actor_rule_from_string(const std::string& name);
CriticRule critic_rule_from_string(const std::string& name);

struct DpAgentConfig {
  ActorRule actor_rule = ActorRule::PolicyGradient;
  CriticRule critic_rule = CriticRule::ExactEvaluation;
  CriticRule res_critic_rule = CriticRule::TemporalDifferenceSemi;  // ResAC only
  double actor_lr = 0.01;
  double critic_lr = 0.02;
  double res_critic_lr = 0.02;
  int iterations = 2000;
  double eta = 0.0;          // StackSemi ridge; 0 = unregularized (exact bilevel gradient)
  int critic_steps = 1;      // critic updates per actor update
  int res_critic_steps = 1;  // residual-critic updates per actor update
  OptimizerKind optimizer = OptimizerKind::Adam;
  // uniform(-scale, scale) seeded init; zero scale = uniform policy / zero tables
  double logit_init_scale = 0.0;
  double value_init_scale = 0.0;

  void validate() const;
};

// Exact training loop: each iteration runs critic_steps critic updates,
// res_critic_steps residual-critic updates (ResAC), then one actor update,
// everything computed in closed form from the model. Trace columns:
// iteration, j, j_q (+ j_w for ResAC), logged after the iteration's updates.
// Deterministic given the seed; the seed only drives the optional random
// parameter init.
TrainingTrace run_dp(const TabularMdp& mdp, const DpAgentConfig& config, std::uint64_t seed);

}  // namespace acgap
