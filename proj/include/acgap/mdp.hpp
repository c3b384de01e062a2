#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

namespace acgap {

// Finite MDP in dense form. State-action pairs are indexed row-major:
// pair (s, a) lives at s * n_actions + a, and `transition` row (s, a)
// holds P(. | s, a).
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  Eigen::MatrixXd transition;  // (S*A) x S, rows are probability vectors
  Eigen::VectorXd reward;      // S*A
  Eigen::VectorXd init_dist;   // S
  double gamma = 0.9;

  int num_pairs() const { return n_states * n_actions; }
  int pair_index(int s, int a) const { return s * n_actions + a; }

  // Throws std::invalid_argument if shapes or stochasticity constraints are
  // violated (rows and init_dist must sum to 1 within 1e-12, gamma < 1).
  void validate() const;
};

nlohmann::json mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const nlohmann::json& j);

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path);
TabularMdp load_mdp(const std::filesystem::path& path);

}  // namespace acgap
