#include "acgap/mdp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace acgap {

namespace {
constexpr double kStochasticTol = 1e-12;
}

void TabularMdp::validate() const {
  if (n_states < 1 || n_actions < 1)
    throw std::invalid_argument("TabularMdp: n_states and n_actions must be positive");
  const int sa = num_pairs();
  if (transition.rows() != sa || transition.cols() != n_states)
    throw std::invalid_argument("TabularMdp: transition must be (S*A) x S");
  if (reward.size() != sa) throw std::invalid_argument("TabularMdp: reward must have length S*A");
  if (init_dist.size() != n_states)
    throw std::invalid_argument("TabularMdp: init_dist must have length S");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("TabularMdp: gamma must lie in [0, 1)");
  if (!reward.allFinite() || !transition.allFinite() || !init_dist.allFinite())
    throw std::invalid_argument("TabularMdp: non-finite entries");
  for (int row = 0; row < sa; ++row) {
    if (transition.row(row).minCoeff() < 0.0)
      throw std::invalid_argument("TabularMdp: negative transition probability");
    if (std::abs(transition.row(row).sum() - 1.0) > kStochasticTol) {
      std::ostringstream msg;
      msg << "TabularMdp: transition row " << row << " sums to " << transition.row(row).sum();
      throw std::invalid_argument(msg.str());
    }
  }
  if (init_dist.minCoeff() < 0.0)
    throw std::invalid_argument("TabularMdp: negative initial probability");
  if (std::abs(init_dist.sum() - 1.0) > kStochasticTol)
    throw std::invalid_argument("TabularMdp: init_dist does not sum to 1");
}

nlohmann::json mdp_to_json(const TabularMdp& mdp) {
  nlohmann::json j;
  j["n_states"] = mdp.n_states;
  j["n_actions"] = mdp.n_actions;
  j["gamma"] = mdp.gamma;
  std::vector<double> transition;
  transition.reserve(static_cast<std::size_t>(mdp.transition.size()));
  for (int row = 0; row < mdp.transition.rows(); ++row)
    for (int col = 0; col < mdp.transition.cols(); ++col)
      transition.push_back(mdp.transition(row, col));
  j["transition"] = transition;
  j["reward"] = std::vector<double>(mdp.reward.begin(), mdp.reward.end());
  j["init_dist"] = std::vector<double>(mdp.init_dist.begin(), mdp.init_dist.end());
  return j;
}

TabularMdp mdp_from_json(const nlohmann::json& j) {
  TabularMdp mdp;
  mdp.n_states = j.at("n_states").get<int>();
  mdp.n_actions = j.at("n_actions").get<int>();
  mdp.gamma = j.at("gamma").get<double>();
  const auto transition = j.at("transition").get<std::vector<double>>();
  const auto reward = j.at("reward").get<std::vector<double>>();
  const auto init = j.at("init_dist").get<std::vector<double>>();
  const int sa = mdp.n_states * mdp.n_actions;
  if (static_cast<int>(transition.size()) != sa * mdp.n_states)
    throw std::invalid_argument("mdp_from_json: transition has wrong length");
  if (static_cast<int>(reward.size()) != sa)
    throw std::invalid_argument("mdp_from_json: reward has wrong length");
  if (static_cast<int>(init.size()) != mdp.n_states)
    throw std::invalid_argument("mdp_from_json: init_dist has wrong length");
  mdp.transition.resize(sa, mdp.n_states);
  for (int row = 0; row < sa; ++row)
    for (int col = 0; col < mdp.n_states; ++col)
      mdp.transition(row, col) = transition[static_cast<std::size_t>(row) * mdp.n_states + col];
  mdp.reward = Eigen::Map<const Eigen::VectorXd>(reward.data(), sa);
  mdp.init_dist = Eigen::Map<const Eigen::VectorXd>(init.data(), mdp.n_states);
  mdp.validate();
  return mdp;
}

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mdp: cannot open " + path.string());
  out << mdp_to_json(mdp).dump(2) << '\n';
}

TabularMdp load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mdp: cannot open " + path.string());
  nlohmann::json j;
  in >> j;
  return mdp_from_json(j);
}

}  // namespace acgap
