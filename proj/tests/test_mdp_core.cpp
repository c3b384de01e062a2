#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>

#include "acgap/critic.hpp"
#include "acgap/envs.hpp"
#include "acgap/mdp.hpp"
#include "acgap/policy.hpp"
#include "acgap/solvers.hpp"
#include "oracles.hpp"

using namespace acgap;

namespace {

TabularMdp single_state_mdp(double reward, double gamma) {
  TabularMdp mdp;
  mdp.n_states = 1;
  mdp.n_actions = 1;
  mdp.gamma = gamma;
  mdp.transition = Eigen::MatrixXd::Ones(1, 1);
  mdp.reward = Eigen::VectorXd::Constant(1, reward);
  mdp.init_dist = Eigen::VectorXd::Ones(1);
  mdp.validate();
  return mdp;
}

TabularMdp two_state_cycle(double gamma) {
  TabularMdp mdp;
  mdp.n_states = 2;
  mdp.n_actions = 1;
  mdp.gamma = gamma;
  mdp.transition = Eigen::MatrixXd::Zero(2, 2);
  mdp.transition(0, 1) = 1.0;  // s0 -> s1
  mdp.transition(1, 0) = 1.0;  // s1 -> s0
  mdp.reward = Eigen::VectorXd::Zero(2);
  mdp.init_dist = Eigen::VectorXd::Zero(2);
  mdp.init_dist[0] = 1.0;
  mdp.validate();
  return mdp;
}

}  // namespace

TEST_SUITE("mdp") {
  TEST_CASE("validation rejects malformed models") {
    TabularMdp mdp = single_state_mdp(1.0, 0.9);
    SUBCASE("bad row sum") {
      mdp.transition(0, 0) = 0.5;
      CHECK_THROWS_AS(mdp.validate(), std::invalid_argument);
    }
    SUBCASE("negative probability with compensating entry") {
      mdp = two_state_cycle(0.9);
      mdp.transition(0, 0) = -0.2;
      mdp.transition(0, 1) = 1.2;
      CHECK_THROWS_AS(mdp.validate(), std::invalid_argument);
    }
    SUBCASE("gamma at 1") {
      mdp.gamma = 1.0;
      CHECK_THROWS_AS(mdp.validate(), std::invalid_argument);
    }
    SUBCASE("init dist off by too much") {
      mdp.init_dist[0] = 1.0 + 1e-9;
      CHECK_THROWS_AS(mdp.validate(), std::invalid_argument);
    }
  }

  TEST_CASE("json round trip is exact") {
    const TabularMdp mdp = random_mdp(3, 2, 99, 1.5, 0.95);
    const TabularMdp back = mdp_from_json(mdp_to_json(mdp));
    CHECK(back.n_states == mdp.n_states);
    CHECK(back.n_actions == mdp.n_actions);
    CHECK(back.gamma == mdp.gamma);
    CHECK(back.transition == mdp.transition);
    CHECK(back.reward == mdp.reward);
    CHECK(back.init_dist == mdp.init_dist);

    const auto path = std::filesystem::temp_directory_path() / "acgap_mdp_roundtrip.json";
    save_mdp(mdp, path);
    const TabularMdp loaded = load_mdp(path);
    CHECK(loaded.transition == mdp.transition);
    std::filesystem::remove(path);
  }

  TEST_CASE("softmax policy caches are consistent") {
    const SoftmaxPolicy policy = testing::random_policy(3, 4, 7);
    for (int s = 0; s < 3; ++s) {
      double sum = 0.0;
      for (int a = 0; a < 4; ++a) {
        CHECK(policy.prob(s, a) > 0.0);
        sum += policy.prob(s, a);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    // expansion holds pi(s, .) in block s, zeros elsewhere
    for (int s = 0; s < 3; ++s)
      for (int sa = 0; sa < 12; ++sa) {
        const double expected = sa / 4 == s ? policy.probs()[sa] : 0.0;
        CHECK(policy.expansion()(s, sa) == expected);
      }
  }

  TEST_CASE("softmax jacobian matches finite differences") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      const SoftmaxPolicy policy = testing::random_policy(2, 3, seed);
      const auto probs_of = [&](const Eigen::VectorXd& logits) {
        return SoftmaxPolicy(2, 3, logits).probs();
      };
      const Eigen::MatrixXd fd =
          testing::central_diff_jacobian(probs_of, policy.logits(), 1e-6);
      CHECK(testing::rel_err(policy.jacobian(), fd) < 1e-5);
    }
  }

  TEST_CASE("solve_stationary on forced single state") {
    for (double gamma : {0.0, 0.5, 0.99}) {
      const TabularMdp mdp = single_state_mdp(1.0, gamma);
      const SoftmaxPolicy policy(1, 1);
      const StationaryDistribution d = solve_stationary(mdp, policy);
      CHECK(d.joint[0] == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(d.state_marginal[0] == doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  TEST_CASE("solve_stationary on deterministic two-state cycle") {
    const double gamma = 0.9;
    const TabularMdp mdp = two_state_cycle(gamma);
    const SoftmaxPolicy policy(2, 1);
    const StationaryDistribution d = solve_stationary(mdp, policy);
    // geometric series: [1/(1+gamma), gamma/(1+gamma)]
    CHECK(d.joint[0] == doctest::Approx(1.0 / 1.9).epsilon(1e-12));
    CHECK(d.joint[1] == doctest::Approx(0.9 / 1.9).epsilon(1e-12));
    CHECK(d.joint[0] == doctest::Approx(0.52631578947368418).epsilon(1e-10));
    CHECK(d.joint[1] == doctest::Approx(0.47368421052631576).epsilon(1e-10));
  }

  TEST_CASE("solve_stationary matches the rollout series oracle") {
    const TabularMdp mdp = random_mdp(3, 2, 2024, 1.0, 0.9);
    const SoftmaxPolicy policy = testing::random_policy(3, 2, 11);
    const StationaryDistribution d = solve_stationary(mdp, policy);
    const Eigen::VectorXd series = testing::occupancy_series(mdp, policy);
    CHECK((d.joint - series).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK(d.joint.minCoeff() >= 0.0);
    CHECK(d.joint.sum() == doctest::Approx(1.0).epsilon(1e-10));
    // state marginal is the per-state block sum by construction
    for (int s = 0; s < 3; ++s)
      CHECK(d.state_marginal[s] == d.joint.segment(s * 2, 2).sum());
  }

  TEST_CASE("solve_q_values basics and series oracle") {
    SUBCASE("geometric series in one state") {
      const TabularMdp mdp = single_state_mdp(1.0, 0.9);
      const Eigen::VectorXd q = solve_q_values(mdp, SoftmaxPolicy(1, 1));
      CHECK(q[0] == doctest::Approx(10.0).epsilon(1e-12));
    }
    SUBCASE("zero reward gives zero values") {
      TabularMdp mdp = random_mdp(4, 2, 5, 1.0, 0.8);
      mdp.reward.setZero();
      const Eigen::VectorXd q = solve_q_values(mdp, testing::random_policy(4, 2, 6));
      CHECK(q.lpNorm<Eigen::Infinity>() < 1e-14);
    }
    SUBCASE("seeded instance matches the Neumann series") {
      const TabularMdp mdp = random_mdp(3, 2, 31, 1.0, 0.9);
      const SoftmaxPolicy policy = testing::random_policy(3, 2, 32);
      const Eigen::VectorXd q = solve_q_values(mdp, policy);
      CHECK((q - testing::q_values_series(mdp, policy)).lpNorm<Eigen::Infinity>() < 1e-9);
      // Bellman residual of the solution vanishes
      const Eigen::VectorXd bellman =
          mdp.reward + mdp.gamma * (mdp.transition * (policy.expansion() * q)) - q;
      CHECK(bellman.lpNorm<Eigen::Infinity>() < 1e-10);
    }
  }

  TEST_CASE("policy_objective agrees with the rollout oracle") {
    SUBCASE("unit reward normalizes to 1") {
      for (double gamma : {0.3, 0.9, 0.99})
        CHECK(policy_objective(single_state_mdp(1.0, gamma), SoftmaxPolicy(1, 1)) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("zero reward gives zero") {
      TabularMdp mdp = random_mdp(3, 2, 8, 1.0, 0.9);
      mdp.reward.setZero();
      CHECK(policy_objective(mdp, testing::random_policy(3, 2, 9)) == doctest::Approx(0.0));
    }
    SUBCASE("seeded instance") {
      const TabularMdp mdp = random_mdp(3, 2, 77, 1.0, 0.9);
      const SoftmaxPolicy policy = testing::random_policy(3, 2, 78);
      CHECK(policy_objective(mdp, policy) ==
            doctest::Approx(testing::discounted_return_series(mdp, policy)).epsilon(1e-10));
    }
  }

  TEST_CASE("residual identities") {
    const TabularMdp mdp = random_mdp(4, 3, 41, 1.0, 0.85);
    const SoftmaxPolicy policy = testing::random_policy(4, 3, 42);
    const Eigen::VectorXd q_theta = solve_q_values(mdp, policy);
    SUBCASE("exact critic has zero residual") {
      CHECK(residual(mdp, policy, CriticTable(q_theta)).lpNorm<Eigen::Infinity>() < 1e-10);
    }
    SUBCASE("zero critic leaves the raw reward") {
      const Eigen::VectorXd delta =
          residual(mdp, policy, CriticTable(Eigen::Index(mdp.num_pairs())));
      CHECK(delta == mdp.reward);
    }
    SUBCASE("constant offset scales by 1 - gamma") {
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mdp.num_pairs());
      const Eigen::VectorXd delta =
          residual(mdp, policy, CriticTable(Eigen::VectorXd(q_theta + ones)));
      CHECK((delta + (1.0 - mdp.gamma) * ones).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }

  TEST_CASE("actor and critic objectives") {
    const TabularMdp mdp = random_mdp(3, 2, 51, 1.0, 0.9);
    const SoftmaxPolicy policy = testing::random_policy(3, 2, 52);
    const Eigen::VectorXd q_theta = solve_q_values(mdp, policy);
    SUBCASE("exact critic recovers the policy objective") {
      CHECK(actor_objective(mdp, policy, CriticTable(q_theta)) ==
            doctest::Approx(policy_objective(mdp, policy)).epsilon(1e-10));
    }
    SUBCASE("zero residual gives zero loss") {
      const Eigen::VectorXd d = solve_stationary(mdp, policy).joint;
      CHECK(critic_objective(mdp, policy, CriticTable(q_theta), d) ==
            doctest::Approx(0.0).epsilon(1e-18));
    }
    SUBCASE("gap identity with on-policy weights") {
      const CriticTable critic(testing::random_values(mdp.num_pairs(), 53));
      const Eigen::VectorXd d = solve_stationary(mdp, policy).joint;
      const double gap = policy_objective(mdp, policy) - actor_objective(mdp, policy, critic);
      CHECK(gap == doctest::Approx(d.dot(residual(mdp, policy, critic))).epsilon(1e-10));
    }
  }

  TEST_CASE("solve_res_q_values closes the critic bias") {
    const TabularMdp mdp = random_mdp(4, 2, 61, 1.0, 0.9);
    const SoftmaxPolicy policy = testing::random_policy(4, 2, 62);
    const Eigen::VectorXd q_theta = solve_q_values(mdp, policy);
    SUBCASE("zero residual reward") {
      CHECK(solve_res_q_values(mdp, policy, Eigen::VectorXd::Zero(mdp.num_pairs()))
                .lpNorm<Eigen::Infinity>() < 1e-14);
    }
    SUBCASE("raw reward recovers policy values") {
      CHECK((solve_res_q_values(mdp, policy, mdp.reward) - q_theta).lpNorm<Eigen::Infinity>() <
            1e-12);
    }
    SUBCASE("arbitrary critic plus its residual value is exact") {
      const CriticTable critic(testing::random_values(mdp.num_pairs(), 63));
      const Eigen::VectorXd w = solve_res_q_values(mdp, policy, residual(mdp, policy, critic));
      CHECK((critic.values + w - q_theta).lpNorm<Eigen::Infinity>() < 1e-9);
    }
  }

  TEST_CASE("duality and residual closure across 100 seeded instances") {
    for (int i = 0; i < 100; ++i) {
      const int n_s = 2 + i % 5;
      const int n_a = 1 + i % 3;
      const double gamma = (i % 3 == 0) ? 0.5 : (i % 3 == 1 ? 0.9 : 0.99);
      const TabularMdp mdp =
          random_mdp(n_s, n_a, 1000 + static_cast<std::uint64_t>(i), 1.0, gamma);
      const SoftmaxPolicy policy =
          testing::random_policy(n_s, n_a, 2000 + static_cast<std::uint64_t>(i));
      ExactEvaluator ev(mdp, policy);
      const double primal =
          (1.0 - gamma) * mdp.init_dist.dot(policy.expansion() * ev.q_values());
      const double dual = ev.occupancy().dot(mdp.reward);
      CHECK(std::abs(primal - dual) < 1e-10);

      const Eigen::VectorXd critic =
          testing::random_values(mdp.num_pairs(), 3000 + static_cast<std::uint64_t>(i));
      const Eigen::VectorXd closure =
          critic + ev.solve_psi(ev.bellman_residual(critic)) - ev.q_values();
      CHECK(closure.lpNorm<Eigen::Infinity>() < 1e-9);

      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mdp.num_pairs());
      CHECK((ev.psi() * ones - (1.0 - gamma) * ones).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }
}
