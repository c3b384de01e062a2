#include "acgap/dp_agent.hpp"

#include <memory>
#include <stdexcept>

#include "acgap/critic.hpp"
#include "acgap/gradients.hpp"
#include "acgap/policy.hpp"
#include "acgap/rng.hpp"
#include "acgap/solvers.hpp"
#include "acgap/stackelberg.hpp"

namespace acgap {

std::string to_string(ActorRule rule) {
  switch (rule) {
    case ActorRule::PolicyGradient: return "pg";
    case ActorRule::ActorO: return "actor_o";
    case ActorRule::ActorG: return "actor_g";
    case ActorRule::StackFull: return "stack_full";
    case ActorRule::StackSemi: return "stack_semi";
    case ActorRule::ResAC: return "res_ac";
    case ActorRule::Greedy: return "greedy";
  }
  throw std::logic_error("unknown ActorRule");
}

std::string to_string(CriticRule rule) {
  switch (rule) {
    case CriticRule::BellmanResidualFull: return "br";
    case CriticRule::TemporalDifferenceSemi: return "td";
    case CriticRule::ExactEvaluation: return "exact";
    case CriticRule::None: return "none";
  }
  throw std::logic_error("unknown CriticRule");
}

ActorRule actor_rule_from_string(const std::string& name) {
  if (name == "pg") return ActorRule::PolicyGradient;
  if (name == "actor_o") return ActorRule::ActorO;
  if (name == "actor_g") return ActorRule::ActorG;
  if (name == "stack_full") return ActorRule::StackFull;
  if (name == "stack_semi") return ActorRule::StackSemi;
  if (name == "res_ac") return ActorRule::ResAC;
  if (name == "greedy") return ActorRule::Greedy;
  throw std::invalid_argument("unknown actor rule: " + name);
}

CriticRule critic_rule_from_string(const std::string& name) {
  if (name == "br") return CriticRule::BellmanResidualFull;
  if (name == "td") return CriticRule::TemporalDifferenceSemi;
  if (name == "exact") return CriticRule::ExactEvaluation;
  if (name == "none") return CriticRule::None;
  throw std::invalid_argument("unknown critic rule: " + name);
}

void DpAgentConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("DpAgentConfig: iterations must be >= 1");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0) || !(res_critic_lr > 0.0))
    throw std::invalid_argument("DpAgentConfig: learning rates must be positive");
  if (critic_steps < 1 || res_critic_steps < 1)
    throw std::invalid_argument("DpAgentConfig: update counts must be >= 1");
  if (eta < 0.0) throw std::invalid_argument("DpAgentConfig: eta must be >= 0");
  if (logit_init_scale < 0.0 || value_init_scale < 0.0)
    throw std::invalid_argument("DpAgentConfig: init scales must be >= 0");
  // The pure policy-gradient rows always pair with a critic column.
  if (actor_rule == ActorRule::PolicyGradient && critic_rule == CriticRule::None)
    throw std::invalid_argument("DpAgentConfig: PolicyGradient requires a critic rule");
  if (res_critic_rule == CriticRule::None)
    throw std::invalid_argument("DpAgentConfig: res_critic_rule cannot be None");
}

TrainingTrace run_dp(const TabularMdp& mdp, const DpAgentConfig& config, std::uint64_t seed) {
  mdp.validate();
  config.validate();
  const int sa = mdp.num_pairs();
  const bool residual_agent = config.actor_rule == ActorRule::ResAC;

  SplitRng rng(seed);
  Eigen::VectorXd logits = Eigen::VectorXd::Zero(sa);
  CriticTable critic(sa);
  ResCriticTable res_critic(sa);
  if (config.logit_init_scale > 0.0)
    logits = rng.split(0).uniform_vector(sa, -config.logit_init_scale, config.logit_init_scale);
  if (config.value_init_scale > 0.0) {
    SplitRng value_rng = rng.split(1);
    critic.values =
        value_rng.uniform_vector(sa, -config.value_init_scale, config.value_init_scale);
    res_critic.values =
        value_rng.uniform_vector(sa, -config.value_init_scale, config.value_init_scale);
  }
  SoftmaxPolicy policy(mdp.n_states, mdp.n_actions, logits);
  Optimizer actor_opt(config.optimizer, sa, config.actor_lr);
  Optimizer critic_opt(config.optimizer, sa, config.critic_lr);
  Optimizer res_critic_opt(config.optimizer, sa, config.res_critic_lr);

  TrainingTrace trace;
  trace.columns = residual_agent ? std::vector<std::string>{"iteration", "j", "j_q", "j_w"}
                                 : std::vector<std::string>{"iteration", "j", "j_q"};

  auto evaluator = std::make_unique<ExactEvaluator>(mdp, policy);
  for (int iteration = 1; iteration <= config.iterations; ++iteration) {
    // Critic update(s) against the current policy's occupancy.
    for (int step = 0; step < config.critic_steps; ++step) {
      switch (config.critic_rule) {
        case CriticRule::ExactEvaluation:
          critic.values = evaluator->q_values();
          break;
        case CriticRule::BellmanResidualFull:
          critic.values = critic_opt.step(
              critic.values, grad_critic_full(*evaluator, critic, evaluator->occupancy()),
              StepDirection::Descend);
          break;
        case CriticRule::TemporalDifferenceSemi:
          critic.values = critic_opt.step(
              critic.values,
              grad_critic_semi(evaluator->bellman_residual(critic.values),
                               evaluator->occupancy()),
              StepDirection::Descend);
          break;
        case CriticRule::None:
          break;
      }
    }
    critic.check_finite();

    if (residual_agent) {
      // The residual reward is frozen at the current critic/policy.
      const Eigen::VectorXd residual_reward = evaluator->bellman_residual(critic.values);
      for (int step = 0; step < config.res_critic_steps; ++step) {
        switch (config.res_critic_rule) {
          case CriticRule::ExactEvaluation:
            res_critic.values = evaluator->solve_psi(residual_reward);
            break;
          case CriticRule::BellmanResidualFull: {
            const Eigen::VectorXd w_residual =
                residual_reward +
                mdp.gamma * (evaluator->transition_under_policy() * res_critic.values) -
                res_critic.values;
            res_critic.values = res_critic_opt.step(
                res_critic.values,
                Eigen::VectorXd(-evaluator->psi().transpose() *
                                evaluator->occupancy().cwiseProduct(w_residual)),
                StepDirection::Descend);
            break;
          }
          case CriticRule::TemporalDifferenceSemi: {
            const Eigen::VectorXd w_residual =
                residual_reward +
                mdp.gamma * (evaluator->transition_under_policy() * res_critic.values) -
                res_critic.values;
            res_critic.values = res_critic_opt.step(
                res_critic.values, grad_critic_semi(w_residual, evaluator->occupancy()),
                StepDirection::Descend);
            break;
          }
          case CriticRule::None:
            break;
        }
      }
      res_critic.check_finite();
    }

    // Actor update using this iteration's critic.
    switch (config.actor_rule) {
      case ActorRule::PolicyGradient:
        policy.set_logits(actor_opt.step(policy.logits(), grad_policy_exact(*evaluator),
                                         StepDirection::Ascend));
        break;
      case ActorRule::ActorO:
        policy.set_logits(actor_opt.step(policy.logits(), grad_actor_initial(*evaluator, critic),
                                         StepDirection::Ascend));
        break;
      case ActorRule::ActorG:
        policy.set_logits(actor_opt.step(
            policy.logits(), grad_actor_occupancy(*evaluator, critic), StepDirection::Ascend));
        break;
      case ActorRule::StackFull:
        policy.set_logits(actor_opt.step(
            policy.logits(), stackelberg_gradient_full(*evaluator, critic),
            StepDirection::Ascend));
        break;
      case ActorRule::StackSemi: {
        const Eigen::VectorXd grad =
            config.eta > 0.0
                ? stackelberg_gradient_regularized(*evaluator, critic, config.eta,
                                                   evaluator->occupancy())
                : stackelberg_gradient_semi(*evaluator, critic);
        policy.set_logits(actor_opt.step(policy.logits(), grad, StepDirection::Ascend));
        break;
      }
      case ActorRule::ResAC: {
        const Eigen::VectorXd grad =
            grad_actor_occupancy(*evaluator, critic) + grad_res_actor(*evaluator, res_critic);
        policy.set_logits(actor_opt.step(policy.logits(), grad, StepDirection::Ascend));
        break;
      }
      case ActorRule::Greedy:
        policy.set_logits(greedy_policy(critic, mdp.n_states, mdp.n_actions).logits());
        break;
    }

    // Post-update state for the trace (and for the next iteration's updates).
    evaluator = std::make_unique<ExactEvaluator>(mdp, policy);
    const double j = evaluator->objective();
    const Eigen::VectorXd delta = evaluator->bellman_residual(critic.values);
    const double j_q = 0.5 * evaluator->occupancy().dot(delta.cwiseProduct(delta));
    if (residual_agent) {
      const Eigen::VectorXd w_residual =
          delta + mdp.gamma * (evaluator->transition_under_policy() * res_critic.values) -
          res_critic.values;
      const double j_w = 0.5 * evaluator->occupancy().dot(w_residual.cwiseProduct(w_residual));
      trace.add_row({static_cast<double>(iteration), j, j_q, j_w});
    } else {
      trace.add_row({static_cast<double>(iteration), j, j_q});
    }
  }
  return trace;
}

}  // namespace acgap
