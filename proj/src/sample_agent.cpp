#include "acgap/sample_agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "acgap/gradients.hpp"
#include "acgap/solvers.hpp"
#include "acgap/stackelberg.hpp"

namespace acgap {

namespace {

std::vector<double> resolve_weights(const std::vector<double>& weights, std::size_t n,
                                    const char* who) {
  if (weights.empty()) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  if (weights.size() != n)
    throw std::invalid_argument(std::string(who) + ": weights/batch size mismatch");
  return weights;
}

// Adds w * value * dlog pi(a|s)/dtheta (supported on the block of s).
void add_score_term(Eigen::VectorXd& grad, const SoftmaxPolicy& policy, int s, int a, double w,
                    double value) {
  const int n_actions = policy.n_actions();
  auto block = grad.segment(s * n_actions, n_actions);
  block -= (w * value) * policy.probs().segment(s * n_actions, n_actions);
  block[a] += w * value;
}

}  // namespace

std::string to_string(SampleAlgorithm algorithm) {
  switch (algorithm) {
    case SampleAlgorithm::ActorO: return "actor_o";
    case SampleAlgorithm::ActorG: return "actor_g";
    case SampleAlgorithm::StackAC: return "stack_ac";
    case SampleAlgorithm::ResAC: return "res_ac";
  }
  throw std::logic_error("unknown SampleAlgorithm");
}

SampleAlgorithm sample_algorithm_from_string(const std::string& name) {
  if (name == "actor_o") return SampleAlgorithm::ActorO;
  if (name == "actor_g") return SampleAlgorithm::ActorG;
  if (name == "stack_ac") return SampleAlgorithm::StackAC;
  if (name == "res_ac") return SampleAlgorithm::ResAC;
  throw std::invalid_argument("unknown sample algorithm: " + name);
}

void SampleAgentConfig::validate() const {
  if (episodes < 1 || batch_size < 1 || episode_length < 1)
    throw std::invalid_argument("SampleAgentConfig: counts must be positive");
  // zero is allowed (frozen parameters, useful for ablations)
  if (!(actor_lr >= 0.0) || !(critic_lr >= 0.0) || !(res_critic_lr >= 0.0))
    throw std::invalid_argument("SampleAgentConfig: learning rates must be nonnegative");
  if (critic_steps < 1 || res_critic_steps < 1)
    throw std::invalid_argument("SampleAgentConfig: update counts must be >= 1");
  if (algorithm == SampleAlgorithm::StackAC && !(eta > 0.0))
    throw std::invalid_argument("SampleAgentConfig: Stack-AC requires eta > 0");
  if (clip_c && !(*clip_c > 0.0))
    throw std::invalid_argument("SampleAgentConfig: clip_c must be positive when set");
  if (logit_init_scale < 0.0 || value_init_scale < 0.0)
    throw std::invalid_argument("SampleAgentConfig: init scales must be >= 0");
}

SampleLoss weighted_score_objective(const std::vector<std::pair<int, int>>& state_actions,
                                    const std::vector<double>& weights,
                                    const SoftmaxPolicy& policy, const Eigen::VectorXd& values) {
  if (state_actions.empty())
    throw std::invalid_argument("weighted_score_objective: empty batch");
  if (values.size() != policy.dim())
    throw std::invalid_argument("weighted_score_objective: values have wrong length");
  const auto w = resolve_weights(weights, state_actions.size(), "weighted_score_objective");
  SampleLoss out;
  out.gradient = Eigen::VectorXd::Zero(policy.dim());
  for (std::size_t i = 0; i < state_actions.size(); ++i) {
    const auto [s, a] = state_actions[i];
    const double value = values[policy.pair_index(s, a)];
    out.value += w[i] * std::log(policy.prob(s, a)) * value;
    add_score_term(out.gradient, policy, s, a, w[i], value);
  }
  return out;
}

SampleLoss sample_critic_loss(const std::vector<Transition>& batch, const CriticTable& critic,
                              double gamma, int n_actions, const std::vector<double>& weights) {
  if (batch.empty()) throw std::invalid_argument("sample_critic_loss: empty batch");
  const auto w = resolve_weights(weights, batch.size(), "sample_critic_loss");
  SampleLoss out;
  out.gradient = Eigen::VectorXd::Zero(critic.values.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = batch[i];
    const int sa = t.state * n_actions + t.action;
    const int next = t.next_state * n_actions + t.next_action;
    const double target = t.reward + gamma * critic.values[next];  // frozen
    const double err = critic.values[sa] - target;
    out.value += w[i] * err * err;
    out.gradient[sa] += w[i] * 2.0 * err;
  }
  return out;
}

SampleLoss actor_o_objective(const std::vector<int>& initial_states, const SoftmaxPolicy& policy,
                             const CriticTable& critic, SplitRng& rng) {
  if (initial_states.empty()) throw std::invalid_argument("actor_o_objective: empty batch");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(initial_states.size());
  for (int s : initial_states) pairs.emplace_back(s, sample_action(policy, s, rng));
  return weighted_score_objective(pairs, {}, policy, critic.values);
}

SampleLoss actor_g_objective(const std::vector<Transition>& batch, const SoftmaxPolicy& policy,
                             const CriticTable& critic, const std::vector<double>& weights) {
  if (batch.empty()) throw std::invalid_argument("actor_g_objective: empty batch");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(batch.size());
  for (const Transition& t : batch) pairs.emplace_back(t.state, t.action);
  return weighted_score_objective(pairs, weights, policy, critic.values);
}

SampleLoss res_critic_loss(const std::vector<Transition>& batch, const CriticTable& critic,
                           const ResCriticTable& res_critic, double gamma, int n_actions,
                           std::optional<double> clip_c, const std::vector<double>& weights) {
  if (batch.empty()) throw std::invalid_argument("res_critic_loss: empty batch");
  const auto w = resolve_weights(weights, batch.size(), "res_critic_loss");
  SampleLoss out;
  out.gradient = Eigen::VectorXd::Zero(res_critic.values.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = batch[i];
    const int sa = t.state * n_actions + t.action;
    const int next = t.next_state * n_actions + t.next_action;
    double residual_reward = t.reward + gamma * critic.values[next] - critic.values[sa];
    if (clip_c) residual_reward = std::clamp(residual_reward, -*clip_c, *clip_c);
    const double target = residual_reward + gamma * res_critic.values[next];  // frozen
    const double err = res_critic.values[sa] - target;
    out.value += w[i] * err * err;
    out.gradient[sa] += w[i] * 2.0 * err;
  }
  return out;
}

SampleLoss res_actor_objective(const std::vector<Transition>& batch, const SoftmaxPolicy& policy,
                               const CriticTable& critic, const ResCriticTable& res_critic,
                               const std::vector<double>& weights) {
  if (batch.empty()) throw std::invalid_argument("res_actor_objective: empty batch");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(batch.size());
  for (const Transition& t : batch) pairs.emplace_back(t.state, t.action);
  return weighted_score_objective(pairs, weights, policy,
                                  critic.values + res_critic.values);
}

Eigen::VectorXd empirical_pair_distribution(const std::vector<Transition>& batch, int n_states,
                                            int n_actions, const std::vector<double>& weights) {
  if (batch.empty()) throw std::invalid_argument("empirical_pair_distribution: empty batch");
  const auto w = resolve_weights(weights, batch.size(), "empirical_pair_distribution");
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_states) * n_actions);
  for (std::size_t i = 0; i < batch.size(); ++i)
    dist[batch[i].state * n_actions + batch[i].action] += w[i];
  return dist;
}

Eigen::VectorXd stack_actor_update(const std::vector<int>& batch_o,
                                   const std::vector<Transition>& batch_d,
                                   const SoftmaxPolicy& policy, const CriticTable& critic,
                                   double eta, double gamma, SplitRng& rng,
                                   const std::vector<double>& weights_o,
                                   const std::vector<double>& weights_d) {
  if (batch_o.empty() || batch_d.empty())
    throw std::invalid_argument("stack_actor_update: empty batch");
  if (!(eta > 0.0)) throw std::invalid_argument("stack_actor_update: eta must be > 0");

  SampleLoss actor;
  if (weights_o.empty()) {
    actor = actor_o_objective(batch_o, policy, critic, rng);
  } else {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(batch_o.size());
    for (int s : batch_o) pairs.emplace_back(s, sample_action(policy, s, rng));
    actor = weighted_score_objective(pairs, weights_o, policy, critic.values);
  }

  const Eigen::VectorXd empirical =
      empirical_pair_distribution(batch_d, policy.n_states(), policy.n_actions(), weights_d);
  // (diag(d~) + eta I)^{-1} d~; zero for pairs absent from the batch.
  const Eigen::VectorXd v = (empirical.array() / (empirical.array() + eta)).matrix();
  const Eigen::MatrixXd cross =
      stackelberg_cross_term_sampled(batch_d, policy, critic, gamma, weights_d);
  return actor.gradient - cross * v;
}

TrainingTrace run_sample_agent(const TabularMdp& env, const SampleAgentConfig& config,
                               std::uint64_t seed) {
  env.validate();
  config.validate();
  const bool residual_agent = config.algorithm == SampleAlgorithm::ResAC;
  const bool keeps_initial_states = config.algorithm == SampleAlgorithm::ActorO ||
                                    config.algorithm == SampleAlgorithm::StackAC;
  const int sa = env.num_pairs();

  SplitRng root(seed);
  SplitRng env_rng = root.split(0);
  SplitRng batch_rng = root.split(1);
  SplitRng actor_rng = root.split(2);

  SoftmaxPolicy policy(env.n_states, env.n_actions);
  CriticTable critic(sa);
  ResCriticTable res_critic(sa);
  if (config.logit_init_scale > 0.0)
    policy.set_logits(root.split(3).uniform_vector(sa, -config.logit_init_scale,
                                                   config.logit_init_scale));
  if (config.value_init_scale > 0.0) {
    SplitRng value_rng = root.split(4);
    critic.values =
        value_rng.uniform_vector(sa, -config.value_init_scale, config.value_init_scale);
    res_critic.values =
        value_rng.uniform_vector(sa, -config.value_init_scale, config.value_init_scale);
  }
  Optimizer actor_opt(config.optimizer, sa, config.actor_lr);
  Optimizer critic_opt(config.optimizer, sa, config.critic_lr);
  Optimizer res_critic_opt(config.optimizer, sa, config.res_critic_lr);

  MdpSimulator sim(env);
  InitialStateBuffer initial_states;
  ReplayBuffer episode_buffer;

  TrainingTrace trace;
  trace.columns = {"episode", "env_steps", "exact_j", "empirical_return", "critic_loss"};
  if (residual_agent)
    trace.columns.insert(trace.columns.end(),
                         {"res_critic_loss", "critic_pred_j", "combined_pred_j"});

  for (int episode = 1; episode <= config.episodes; ++episode) {
    episode_buffer.clear();
    const EpisodeResult ep = collect_episode(sim, policy, config.episode_length, env_rng);
    for (const Transition& t : ep.transitions) episode_buffer.add(t);
    if (keeps_initial_states) initial_states.add(ep.initial_state);

    // Actor first, then critic(s), following the per-episode update order of
    // the sampled algorithms.
    Eigen::VectorXd actor_grad;
    switch (config.algorithm) {
      case SampleAlgorithm::ActorO:
        actor_grad = actor_o_objective(
                         initial_states.sample(static_cast<std::size_t>(config.batch_size),
                                               batch_rng),
                         policy, critic, actor_rng)
                         .gradient;
        break;
      case SampleAlgorithm::ActorG:
        actor_grad = actor_g_objective(episode_buffer.sample(
                                           static_cast<std::size_t>(config.batch_size),
                                           batch_rng),
                                       policy, critic)
                         .gradient;
        break;
      case SampleAlgorithm::StackAC:
        actor_grad = stack_actor_update(
            initial_states.sample(static_cast<std::size_t>(config.batch_size), batch_rng),
            episode_buffer.sample(static_cast<std::size_t>(config.batch_size), batch_rng),
            policy, critic, config.eta, env.gamma, actor_rng);
        break;
      case SampleAlgorithm::ResAC:
        actor_grad = res_actor_objective(
                         episode_buffer.sample(static_cast<std::size_t>(config.batch_size),
                                               batch_rng),
                         policy, critic, res_critic)
                         .gradient;
        break;
    }
    policy.set_logits(actor_opt.step(policy.logits(), actor_grad, StepDirection::Ascend));

    double critic_loss = 0.0;
    for (int step = 0; step < config.critic_steps; ++step) {
      const SampleLoss loss = sample_critic_loss(
          episode_buffer.sample(static_cast<std::size_t>(config.batch_size), batch_rng), critic,
          env.gamma, env.n_actions);
      critic.values = critic_opt.step(critic.values, loss.gradient, StepDirection::Descend);
      critic_loss = loss.value;
    }
    critic.check_finite();

    double res_loss = 0.0;
    if (residual_agent) {
      for (int step = 0; step < config.res_critic_steps; ++step) {
        const SampleLoss loss = res_critic_loss(
            episode_buffer.sample(static_cast<std::size_t>(config.batch_size), batch_rng),
            critic, res_critic, env.gamma, env.n_actions, config.clip_c);
        res_critic.values =
            res_critic_opt.step(res_critic.values, loss.gradient, StepDirection::Descend);
        res_loss = loss.value;
      }
      res_critic.check_finite();
    }

    const double exact_j = policy_objective(env, policy);
    std::vector<double> row = {static_cast<double>(episode),
                               static_cast<double>(episode) * config.episode_length, exact_j,
                               ep.discounted_return, critic_loss};
    if (residual_agent) {
      const double critic_pred = actor_objective(env, policy, critic);
      const double combined_pred = actor_objective(
          env, policy, CriticTable(Eigen::VectorXd(critic.values + res_critic.values)));
      row.insert(row.end(), {res_loss, critic_pred, combined_pred});
    }
    trace.add_row(std::move(row));
  }
  return trace;
}

}  // namespace acgap
