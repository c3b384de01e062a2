#include "acgap/replay.hpp"

#include <stdexcept>

namespace acgap {

void ReplayBuffer::add(const Transition& t) {
  transitions_.push_back(t);
  if (capacity_ && transitions_.size() > *capacity_)
    transitions_.erase(transitions_.begin(),
                       transitions_.begin() + (transitions_.size() - *capacity_));
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, SplitRng& rng) const {
  if (transitions_.empty()) throw std::runtime_error("ReplayBuffer::sample: buffer is empty");
  std::vector<Transition> batch;
  batch.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    batch.push_back(transitions_[static_cast<std::size_t>(
        rng.uniform_int(static_cast<int>(transitions_.size())))]);
  return batch;
}

std::vector<int> InitialStateBuffer::sample(std::size_t n, SplitRng& rng) const {
  if (states_.empty()) throw std::runtime_error("InitialStateBuffer::sample: buffer is empty");
  std::vector<int> batch;
  batch.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    batch.push_back(states_[static_cast<std::size_t>(
        rng.uniform_int(static_cast<int>(states_.size())))]);
  return batch;
}

int MdpSimulator::reset(SplitRng& rng) {
  state_ = rng.categorical(mdp_->init_dist);
  return state_;
}

std::pair<int, double> MdpSimulator::step(int action, SplitRng& rng) {
  if (state_ < 0) throw std::runtime_error("MdpSimulator::step before reset");
  if (action < 0 || action >= mdp_->n_actions)
    throw std::invalid_argument("MdpSimulator::step: action out of range");
  const int sa = mdp_->pair_index(state_, action);
  const double reward = mdp_->reward[sa];
  state_ = rng.categorical(mdp_->transition.row(sa).transpose());
  return {state_, reward};
}

int sample_action(const SoftmaxPolicy& policy, int state, SplitRng& rng) {
  return rng.categorical(
      policy.probs().segment(state * policy.n_actions(), policy.n_actions()));
}

EpisodeResult collect_episode(MdpSimulator& sim, const SoftmaxPolicy& policy,
                              int episode_length, SplitRng& rng) {
  if (episode_length <= 0)
    throw std::invalid_argument("collect_episode: episode_length must be positive");
  const double gamma = sim.mdp().gamma;
  EpisodeResult result;
  result.transitions.reserve(static_cast<std::size_t>(episode_length));
  int state = sim.reset(rng);
  result.initial_state = state;
  int action = sample_action(policy, state, rng);
  double ret = 0.0;
  double discount = 1.0;
  for (int t = 0; t < episode_length; ++t) {
    const auto [next_state, reward] = sim.step(action, rng);
    const int next_action = sample_action(policy, next_state, rng);
    result.transitions.push_back({state, action, reward, next_state, next_action});
    ret += discount * reward;
    discount *= gamma;
    state = next_state;
    action = next_action;
  }
  result.discounted_return = (1.0 - gamma) * ret;
  return result;
}

}  // namespace acgap
