#include "acgap/envs.hpp"

#include <deque>
#include <stdexcept>

#include "acgap/rng.hpp"

namespace acgap {

namespace {

constexpr int kActionCount = 4;
// up, down, left, right
constexpr int kRowDelta[kActionCount] = {-1, 1, 0, 0};
constexpr int kColDelta[kActionCount] = {0, 0, -1, 1};

bool is_free(char c) { return c == '.' || c == 'G'; }

}  // namespace

FourRoomSpec FourRoomSpec::standard() {
  FourRoomSpec spec;
  spec.mask = {
      ".....#.....",
      ".....#...G.",
      "...........",
      ".....#.....",
      ".....#.....",
      "#.####.....",
      ".....###.##",
      ".....#.....",
      ".....#.....",
      "...........",
      ".....#.....",
  };
  return spec;
}

void FourRoomSpec::validate() const {
  if (mask.empty()) throw std::invalid_argument("FourRoomSpec: empty mask");
  const std::size_t cols = mask.front().size();
  if (cols == 0) throw std::invalid_argument("FourRoomSpec: empty mask row");
  int goals = 0;
  for (const auto& row : mask) {
    if (row.size() != cols) throw std::invalid_argument("FourRoomSpec: ragged mask");
    for (char c : row) {
      if (c != '#' && c != '.' && c != 'G')
        throw std::invalid_argument("FourRoomSpec: mask may contain only '#', '.', 'G'");
      if (c == 'G') ++goals;
    }
  }
  if (goals != 1) throw std::invalid_argument("FourRoomSpec: mask must contain exactly one 'G'");
  if (episode_length <= 0) throw std::invalid_argument("FourRoomSpec: episode_length <= 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("FourRoomSpec: bad gamma");

  // Every free cell must reach the goal: BFS on reversed move edges.
  const int n_rows = static_cast<int>(mask.size());
  const int n_cols = static_cast<int>(cols);
  const auto [goal_r, goal_c] = goal_cell();
  std::vector<std::vector<bool>> seen(n_rows, std::vector<bool>(n_cols, false));
  std::deque<std::pair<int, int>> frontier{{goal_r, goal_c}};
  seen[goal_r][goal_c] = true;
  while (!frontier.empty()) {
    const auto [r, c] = frontier.front();
    frontier.pop_front();
    for (int a = 0; a < kActionCount; ++a) {
      // A neighbour that can move into (r, c) reaches the goal too.
      const int pr = r - kRowDelta[a];
      const int pc = c - kColDelta[a];
      if (pr < 0 || pr >= n_rows || pc < 0 || pc >= n_cols) continue;
      if (!is_free(mask[pr][pc]) || seen[pr][pc]) continue;
      seen[pr][pc] = true;
      frontier.emplace_back(pr, pc);
    }
  }
  for (int r = 0; r < n_rows; ++r)
    for (int c = 0; c < n_cols; ++c)
      if (is_free(mask[r][c]) && !seen[r][c])
        throw std::invalid_argument("FourRoomSpec: free cell cannot reach the goal");
}

std::pair<int, int> FourRoomSpec::goal_cell() const {
  for (std::size_t r = 0; r < mask.size(); ++r) {
    const auto c = mask[r].find('G');
    if (c != std::string::npos) return {static_cast<int>(r), static_cast<int>(c)};
  }
  throw std::invalid_argument("FourRoomSpec: no goal in mask");
}

nlohmann::json fourroom_spec_to_json(const FourRoomSpec& spec) {
  return nlohmann::json{
      {"mask", spec.mask}, {"episode_length", spec.episode_length}, {"gamma", spec.gamma}};
}

FourRoomSpec fourroom_spec_from_json(const nlohmann::json& j) {
  FourRoomSpec spec;
  spec.mask = j.at("mask").get<std::vector<std::string>>();
  spec.episode_length = j.value("episode_length", 300);
  spec.gamma = j.value("gamma", 0.9);
  spec.validate();
  return spec;
}

std::vector<std::pair<int, int>> fourroom_state_cells(const FourRoomSpec& spec) {
  spec.validate();
  std::vector<std::pair<int, int>> cells;
  for (std::size_t r = 0; r < spec.mask.size(); ++r)
    for (std::size_t c = 0; c < spec.mask[r].size(); ++c)
      if (is_free(spec.mask[r][c])) cells.emplace_back(static_cast<int>(r), static_cast<int>(c));
  return cells;
}

TabularMdp fourroom_mdp(const FourRoomSpec& spec) {
  const auto cells = fourroom_state_cells(spec);
  const int n_rows = static_cast<int>(spec.mask.size());
  const int n_cols = static_cast<int>(spec.mask.front().size());
  std::vector<std::vector<int>> state_of(n_rows, std::vector<int>(n_cols, -1));
  for (std::size_t i = 0; i < cells.size(); ++i) state_of[cells[i].first][cells[i].second] = static_cast<int>(i);

  const auto [goal_r, goal_c] = spec.goal_cell();
  const int goal_state = state_of[goal_r][goal_c];
  const int n_states = static_cast<int>(cells.size());

  TabularMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = kActionCount;
  mdp.gamma = spec.gamma;
  mdp.transition = Eigen::MatrixXd::Zero(n_states * kActionCount, n_states);
  mdp.reward = Eigen::VectorXd::Zero(n_states * kActionCount);
  mdp.init_dist = Eigen::VectorXd::Constant(n_states, 1.0 / n_states);

  for (int s = 0; s < n_states; ++s) {
    const auto [r, c] = cells[static_cast<std::size_t>(s)];
    for (int a = 0; a < kActionCount; ++a) {
      int nr = r + kRowDelta[a];
      int nc = c + kColDelta[a];
      if (nr < 0 || nr >= n_rows || nc < 0 || nc >= n_cols || !is_free(spec.mask[nr][nc])) {
        nr = r;  // bounce off walls and the border
        nc = c;
      }
      const int next = state_of[nr][nc];
      const int sa = mdp.pair_index(s, a);
      mdp.transition(sa, next) = 1.0;
      if (next == goal_state) mdp.reward[sa] = 1.0;
    }
  }
  mdp.validate();
  return mdp;
}

TabularMdp random_mdp(int n_states, int n_actions, std::uint64_t seed, double reward_scale,
                      double gamma) {
  if (n_states < 1 || n_actions < 1)
    throw std::invalid_argument("random_mdp: sizes must be positive");
  SplitRng rng(seed);
  TabularMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.gamma = gamma;
  const int sa = n_states * n_actions;
  mdp.transition.resize(sa, n_states);
  for (int row = 0; row < sa; ++row)
    mdp.transition.row(row) = rng.dirichlet_uniform(n_states).transpose();
  mdp.reward = rng.uniform_vector(sa, -reward_scale, reward_scale);
  mdp.init_dist = Eigen::VectorXd::Constant(n_states, 1.0 / n_states);
  mdp.validate();
  return mdp;
}

}  // namespace acgap
