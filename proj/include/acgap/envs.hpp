#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "acgap/mdp.hpp"

namespace acgap {

// Four-rooms gridworld on an 11x11 occupancy mask: two internal walls with
// four doorways, deterministic moves (walls bounce back), reward 1 on every
// transition whose next cell is the goal, uniform initial distribution over
// free cells. The goal is NOT absorbing; episodes run a fixed length.
// Actions: 0 = up, 1 = down, 2 = left, 3 = right.
struct FourRoomSpec {
  std::vector<std::string> mask;  // '#' wall, '.' free, 'G' goal (exactly one)
  int episode_length = 300;
  double gamma = 0.9;

  // Classic layout with the goal one step in from the upper-right corner.
  static FourRoomSpec standard();

  // Throws std::invalid_argument on malformed masks, a blocked goal, or
  // free cells that cannot reach the goal.
  void validate() const;

  std::pair<int, int> goal_cell() const;  // (row, col)
};

nlohmann::json fourroom_spec_to_json(const FourRoomSpec& spec);
FourRoomSpec fourroom_spec_from_json(const nlohmann::json& j);

TabularMdp fourroom_mdp(const FourRoomSpec& spec);

// Grid cell (row, col) of each MDP state, in state order.
std::vector<std::pair<int, int>> fourroom_state_cells(const FourRoomSpec& spec);

// Dense random MDP for oracle testing: flat-Dirichlet transition rows (full
// support), rewards uniform in [-reward_scale, reward_scale], uniform mu0.
TabularMdp random_mdp(int n_states, int n_actions, std::uint64_t seed,
                      double reward_scale = 1.0, double gamma = 0.9);

}  // namespace acgap
