#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>

#include "acgap/envs.hpp"
#include "acgap/solvers.hpp"
#include "acgap/verify.hpp"
#include "oracles.hpp"

using namespace acgap;

TEST_SUITE("envs") {
  TEST_CASE("standard four-room layout") {
    const FourRoomSpec spec = FourRoomSpec::standard();
    spec.validate();
    const TabularMdp mdp = fourroom_mdp(spec);
    CHECK(mdp.n_states == 104);
    CHECK(mdp.n_actions == 4);
    CHECK(mdp.gamma == 0.9);

    SUBCASE("rows are one-hot and sum to exactly 1") {
      for (int row = 0; row < mdp.num_pairs(); ++row) {
        CHECK(mdp.transition.row(row).sum() == 1.0);
        CHECK(mdp.transition.row(row).maxCoeff() == 1.0);
      }
    }
    SUBCASE("initial distribution is uniform over free cells") {
      CHECK(mdp.init_dist.minCoeff() == mdp.init_dist.maxCoeff());
      CHECK(mdp.init_dist.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("stepping into the goal pays 1") {
      const auto cells = fourroom_state_cells(spec);
      const auto [gr, gc] = spec.goal_cell();
      int left_of_goal = -1;
      int below_goal = -1;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == std::make_pair(gr, gc - 1)) left_of_goal = static_cast<int>(i);
        if (cells[i] == std::make_pair(gr + 1, gc)) below_goal = static_cast<int>(i);
      }
      REQUIRE(left_of_goal >= 0);
      REQUIRE(below_goal >= 0);
      CHECK(mdp.reward[mdp.pair_index(left_of_goal, 3)] == 1.0);  // right
      CHECK(mdp.reward[mdp.pair_index(below_goal, 0)] == 1.0);    // up
      CHECK(mdp.reward[mdp.pair_index(left_of_goal, 2)] == 0.0);  // left, away
    }
    SUBCASE("uniform-policy occupancy covers every pair") {
      const StationaryDistribution d = solve_stationary(mdp, SoftmaxPolicy(104, 4));
      CHECK(d.joint.minCoeff() > 0.0);
      CHECK(d.joint.sum() == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("optimal return is strictly positive") {
      CHECK(optimal_objective(mdp) > 0.1);
    }
  }

  TEST_CASE("four-room spec validation") {
    FourRoomSpec spec = FourRoomSpec::standard();
    SUBCASE("missing goal") {
      for (auto& row : spec.mask) std::replace(row.begin(), row.end(), 'G', '.');
      CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("unreachable free cell") {
      // wall off the upper-left corner completely
      spec.mask[0] = ".#" + spec.mask[0].substr(2);
      spec.mask[1] = "##" + spec.mask[1].substr(2);
      CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("ragged mask") {
      spec.mask[3] += ".";
      CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
  }

  TEST_CASE("four-room spec json round trip") {
    const FourRoomSpec spec = FourRoomSpec::standard();
    const FourRoomSpec back = fourroom_spec_from_json(fourroom_spec_to_json(spec));
    CHECK(back.mask == spec.mask);
    CHECK(back.episode_length == spec.episode_length);
    CHECK(back.gamma == spec.gamma);
  }

  TEST_CASE("random mdp generator") {
    SUBCASE("rows are stochastic with full support") {
      const TabularMdp mdp = random_mdp(5, 3, 7, 2.0, 0.8);
      mdp.validate();
      CHECK(mdp.transition.minCoeff() > 0.0);
      CHECK(mdp.reward.cwiseAbs().maxCoeff() <= 2.0);
    }
    SUBCASE("same seed reproduces bit-identically") {
      const TabularMdp a = random_mdp(4, 2, 123, 1.0, 0.9);
      const TabularMdp b = random_mdp(4, 2, 123, 1.0, 0.9);
      CHECK(a.transition == b.transition);
      CHECK(a.reward == b.reward);
      const TabularMdp c = random_mdp(4, 2, 124, 1.0, 0.9);
      CHECK(a.transition != c.transition);
    }
    SUBCASE("single-state occupancy is the action marginal of the policy") {
      const TabularMdp mdp = random_mdp(1, 3, 9, 1.0, 0.9);
      const SoftmaxPolicy policy = testing::random_policy(1, 3, 10);
      const StationaryDistribution d = solve_stationary(mdp, policy);
      CHECK((d.joint - policy.probs()).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }
}
