#include <doctest.h>

#include <string>

#include "space_helpers.hpp"
#include "uapp/config.hpp"
#include "uapp/errors.hpp"
#include "uapp/metrics.hpp"
#include "uapp/planner.hpp"

using namespace uapp;
using testing::make_space;

namespace {

ScenarioConfig preset(const std::string& name) { return load_config(std::string(UAPP_SOURCE_DIR) + "/configs/" + name); }

InteractionTrace run(const ScenarioConfig& cfg, const RewardWeights& w) {
  return simulate(cfg.setup(), *cfg.initial, FixedPolicy{w}, FollowerPolicy{}, cfg.max_steps);
}

}  // namespace

TEST_CASE("a dominating ego candidate wins under egoism") {
  const auto sp = make_space({{1, 2, 0}, {5, 6, 4}, {2, 1, 3}}, {{0, 1, 2}, {2, 0, 1}, {1, 1, 1}}, {0, 0, 0});
  CHECK(argmax(social_rewards(social_terms(sp, 1.0), RewardWeights::egoism_only())) == 1);
}

TEST_CASE("single other candidate reduces egoism planning to the reward column") {
  const auto sp = make_space({{0.3}, {-2.0}, {4.1}, {4.0}}, {{1}, {2}, {3}, {4}}, {0});
  CHECK(argmax(social_rewards(social_terms(sp, 1.0), RewardWeights::egoism_only())) == 2);
}

TEST_CASE("follower_response examples") {
  auto sp = make_space({{0, 0, 0}}, {{1, 5, 3}}, {0, 0, 0});
  CHECK(follower_response(sp, 0).label == 1);
  sp = make_space({{0, 0}}, {{5, 5}}, {0, 0});
  CHECK(follower_response(sp, 0).label == 0);
  CHECK_THROWS_AS(follower_response(sp, 3), UnknownCandidate);
}

TEST_CASE("follower choice mirrors the swapped leader's row argmax") {
  const ReferencePath ego({{0, -50}, {0, 50}}, 10.0), other({{-50, 0}, {50, 0}}, 10.0);
  const PlanningSetup setup{Scene(ego, other), SamplerConfig{}, RewardConfig{}, 1};
  const JointState x0{{40, 6, 0}, {40, 6, 0}, 0};
  const auto a = build_joint_space(x0, setup);
  const auto b = build_joint_space({x0.other, x0.ego, 0}, setup.swapped());
  for (std::size_t i = 0; i < a.ego_count(); ++i) {
    std::vector<double> col;
    for (std::size_t j = 0; j < b.ego_count(); ++j) col.push_back(b.reward_ego(j, i));
    CHECK(follower_response(a, static_cast<int>(i)).label == argmax(col));
  }
}

TEST_CASE("Case I leader choices") {
  const auto cfg = preset("case1.json");
  const auto setup = cfg.setup();
  const int ego = plan_ego(*cfg.initial, RewardWeights::egoism_only(), setup).action.label;
  const int cour = plan_ego(*cfg.initial, RewardWeights::courtesy_only(), setup).action.label;
  const int conf = plan_ego(*cfg.initial, RewardWeights::confidence_only(), setup).action.label;
  // labels ascend with the terminal-speed fraction
  CHECK(cour >= ego);
  CHECK(conf <= ego);
}

TEST_CASE("Case I minimum distance ordering") {
  const auto cfg = preset("case1.json");
  const double e = interaction_stats(run(cfg, RewardWeights::egoism_only())).min_distance;
  const double c = interaction_stats(run(cfg, RewardWeights::courtesy_only())).min_distance;
  const double f = interaction_stats(run(cfg, RewardWeights::confidence_only())).min_distance;
  CHECK(c > e);
  CHECK(e > f);
}

TEST_CASE("Case II courteous leader brakes to yield") {
  const auto cfg = preset("case2.json");
  const auto e = run(cfg, RewardWeights::egoism_only());
  const auto c = run(cfg, RewardWeights::courtesy_only());
  const double dt = cfg.sampler.dt;
  for (int k = 0; k < static_cast<int>(1.0 / dt + 1e-9); ++k) CHECK(c.controls_ego[k].a <= e.controls_ego[k].a);
}

TEST_CASE("simulate terminates immediately past the conflict") {
  auto cfg = preset("case1.json");
  const double sc = cfg.setup().scene.conflict.s_ego;
  const auto t = simulate(cfg.setup(), {{sc + 1.0, 5, 0}, {10, 5, 0}, 0}, FixedPolicy{RewardWeights::egoism_only()},
                          FollowerPolicy{}, 50);
  CHECK(t.joint_states.size() == 1u);
  CHECK(t.terminated);
  CHECK(ait(t) == 0.0);
}

TEST_CASE("simulate requires a follower") {
  const auto cfg = preset("case1.json");
  CHECK_THROWS_AS(simulate(cfg.setup(), *cfg.initial, FixedPolicy{RewardWeights::egoism_only()},
                           FixedPolicy{RewardWeights::egoism_only()}, 10),
                  InvalidArgument);
}

TEST_CASE("traces replay exactly, never reverse and are deterministic") {
  auto cfg = preset("case3.json");
  const auto t = run(cfg, RewardWeights::confidence_only());
  REQUIRE(t.terminated);
  CHECK(t.controls_ego.size() + 1 == t.joint_states.size());
  CHECK(t.lambda_ego.size() == t.steps());
  for (std::size_t k = 0; k < t.steps(); ++k) {
    const auto& x = t.joint_states[k];
    const auto& y = t.joint_states[k + 1];
    CHECK(step_dynamics(x.ego, t.controls_ego[k], t.dt) == y.ego);
    CHECK(step_dynamics(x.other, t.controls_other[k], t.dt) == y.other);
    CHECK(y.ego.s >= x.ego.s);
    CHECK(y.other.s >= x.other.s);
  }
  cfg.threads = 3;
  const auto u = run(cfg, RewardWeights::confidence_only());
  REQUIRE(u.joint_states.size() == t.joint_states.size());
  for (std::size_t k = 0; k < t.joint_states.size(); ++k) {
    CHECK(u.joint_states[k].ego == t.joint_states[k].ego);
    CHECK(u.joint_states[k].other == t.joint_states[k].other);
  }
}

TEST_CASE("max_steps leaves the trace unterminated") {
  const auto cfg = preset("case1.json");
  const auto t = simulate(cfg.setup(), *cfg.initial, FixedPolicy{RewardWeights::egoism_only()}, FollowerPolicy{}, 3);
  CHECK_FALSE(t.terminated);
  CHECK(t.steps() == 3u);
  CHECK_THROWS_AS(ait(t), NonTerminating);
}

TEST_CASE("switching policy weights") {
  const PolicySpec p = SwitchingPolicy{RewardWeights::egoism_only(), RewardWeights::confidence_only(), 5};
  CHECK(policy_weights(p, 4) == RewardWeights::egoism_only());
  CHECK(policy_weights(p, 5) == RewardWeights::confidence_only());
  CHECK(policy_weights(FollowerPolicy{}, 0) == RewardWeights::egoism_only());
}
