#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "acgap/mdp.hpp"
#include "acgap/policy.hpp"
#include "acgap/rng.hpp"

namespace acgap {

// SARSA-style tuple (s, a, r, s~, a~) as stored by every sample-based
// algorithm here.
struct Transition {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  int next_state = 0;
  int next_action = 0;
};

// Ordered transition store. Unbounded unless a capacity is given, in which
// case the oldest entries are dropped.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::optional<std::size_t> capacity = std::nullopt)
      : capacity_(capacity) {}

  void add(const Transition& t);
  void clear() { transitions_.clear(); }
  std::size_t size() const { return transitions_.size(); }
  const std::vector<Transition>& data() const { return transitions_; }

  // Batch of n transitions drawn with replacement.
  std::vector<Transition> sample(std::size_t n, SplitRng& rng) const;

 private:
  std::vector<Transition> transitions_;
  std::optional<std::size_t> capacity_;
};

// Store of observed initial states (states only, unbounded).
class InitialStateBuffer {
 public:
  void add(int state) { states_.push_back(state); }
  std::size_t size() const { return states_.size(); }
  const std::vector<int>& data() const { return states_; }
  std::vector<int> sample(std::size_t n, SplitRng& rng) const;

 private:
  std::vector<int> states_;
};

// Samples trajectories from a TabularMdp.
class MdpSimulator {
 public:
  explicit MdpSimulator(const TabularMdp& mdp) : mdp_(&mdp) { mdp.validate(); }

  const TabularMdp& mdp() const { return *mdp_; }
  int reset(SplitRng& rng);
  // Returns (next_state, reward). Must be preceded by reset().
  std::pair<int, double> step(int action, SplitRng& rng);
  int state() const { return state_; }

 private:
  const TabularMdp* mdp_;
  int state_ = -1;
};

struct EpisodeResult {
  std::vector<Transition> transitions;
  int initial_state = 0;
  double discounted_return = 0.0;  // (1-gamma)-normalized discounted reward sum
};

// Runs exactly episode_length steps with actions sampled from the policy,
// chaining next-actions SARSA style (the recorded next_action is the action
// executed at the following step).
EpisodeResult collect_episode(MdpSimulator& sim, const SoftmaxPolicy& policy,
                              int episode_length, SplitRng& rng);

int sample_action(const SoftmaxPolicy& policy, int state, SplitRng& rng);

}  // namespace acgap
