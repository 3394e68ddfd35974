#include <doctest.h>

#include <cmath>

#include "uapp/errors.hpp"
#include "uapp/joint_space.hpp"
#include "uapp/trajectory.hpp"

using namespace uapp;

namespace {

ReferencePath straight(double limit = 10.0) { return ReferencePath({{0, 0}, {200, 0}}, limit); }

PlanningSetup crossing_setup() {
  const ReferencePath ego({{0, -50}, {0, 50}}, 10.0), other({{-50, 0}, {50, 0}}, 10.0);
  SamplerConfig sc;
  return PlanningSetup{Scene(ego, other), sc, RewardConfig{}, 1};
}

}  // namespace

TEST_CASE("sample_sequences examples") {
  SamplerConfig cfg;
  cfg.terminal_speed_fractions = {1.0};
  cfg.horizon_steps = 4;
  auto seqs = sample_sequences({0, 10, 0}, straight(), cfg);
  REQUIRE(seqs.size() == 1);
  for (const auto& c : seqs[0].controls) CHECK(c.a == 0.0);

  cfg.terminal_speed_fractions = {0.0, 0.5, 1.0};
  cfg.horizon_steps = 10;
  cfg.dt = 0.3;
  cfg.accel_max = 10.0;
  seqs = sample_sequences({0, 0, 0}, straight(), cfg);
  REQUIRE(seqs.size() == 3);
  const double expected[] = {0.0, 5.0 / 3.0, 10.0 / 3.0};
  for (int i = 0; i < 3; ++i) {
    CHECK(seqs[i].label == i);
    CHECK(seqs[i].controls.size() == 10u);
    CHECK(seqs[i].controls[0].a == doctest::Approx(expected[i]));
    // the rollout reaches the terminal speed
    const auto t = rollout({0, 0, 0}, seqs[i], cfg.dt);
    CHECK(t.states.back().v == doctest::Approx(10.0 * 0.5 * i));
  }

  seqs = sample_sequences({0, 5, 0}, straight(), SamplerConfig{});
  CHECK(seqs.size() == 6u);
}

TEST_CASE("clamped candidates are deduplicated") {
  SamplerConfig cfg;
  cfg.terminal_speed_fractions = {0.0, 0.05};
  cfg.horizon_steps = 2;
  cfg.dt = 0.1;
  // both targets need far more braking than accel_min allows
  const auto seqs = sample_sequences({0, 20, 0}, straight(), cfg);
  CHECK(seqs.size() == 1u);
  CHECK(seqs[0].controls[0].a == cfg.accel_min);

  cfg.allow_singleton = false;
  CHECK_THROWS_AS(sample_sequences({0, 20, 0}, straight(), cfg), EmptyCandidateSet);
}

TEST_CASE("sampler config validation") {
  SamplerConfig cfg;
  cfg.terminal_speed_fractions.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SamplerConfig{};
  cfg.horizon_steps = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SamplerConfig{};
  cfg.dt = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("rollout examples") {
  ActionSequence zero{{{0.0}, {0.0}, {0.0}}, 0};
  auto t = rollout({0, 10, 0}, zero, 0.5);
  REQUIRE(t.states.size() == 4u);
  const double s1[] = {0, 5, 10, 15};
  for (int k = 0; k < 4; ++k) CHECK(t.states[k].s == doctest::Approx(s1[k]));

  ActionSequence accel{{{2.0}, {2.0}}, 0};
  t = rollout({0, 0, 0}, accel, 1.0);
  const double s2[] = {0, 1, 4}, v2[] = {0, 2, 4};
  for (int k = 0; k < 3; ++k) {
    CHECK(t.states[k].s == doctest::Approx(s2[k]));
    CHECK(t.states[k].v == doctest::Approx(v2[k]));
  }

  // braking to a stop mid-horizon, checked against fine integration
  ActionSequence brake{std::vector<Control>(6, Control{-4.0}), 0};
  t = rollout({0, 6, 0}, brake, 0.5);
  const double stop_s = 6.0 * 6.0 / (2.0 * 4.0);
  for (int k = 3; k <= 6; ++k) {
    CHECK(t.states[k].v == 0.0);
    CHECK(t.states[k].s == doctest::Approx(stop_s));
  }
}

TEST_CASE("joint space shape, finiteness and determinism") {
  const auto setup = crossing_setup();
  const JointState x0{{30, 6, 0}, {35, 7, 0}, 0};
  const auto a = build_joint_space(x0, setup);
  CHECK(a.ego_count() == 6u);
  CHECK(a.other_count() == 6u);
  CHECK(a.reward_ego.rows() * a.reward_ego.cols() == 36u);
  CHECK(a.reward_other.rows() * a.reward_other.cols() == 36u);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(std::isfinite(a.reward_ego(i, j)));
      CHECK(std::isfinite(a.reward_other(i, j)));
    }

  auto threaded = setup;
  threaded.threads = 4;
  const auto b = build_joint_space(x0, threaded);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a.ego_candidates[i].actions.label == b.ego_candidates[i].actions.label);
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(a.reward_ego(i, j) == b.reward_ego(i, j));
      CHECK(a.reward_other(i, j) == b.reward_other(i, j));
    }
  }
}

TEST_CASE("joint space trajectories obey the dynamics and cached rewards") {
  const auto setup = crossing_setup();
  const JointState x0{{20, 9, 0}, {25, 3, 0}, 0};
  const auto sp = build_joint_space(x0, setup);
  for (const auto& c : sp.ego_candidates) {
    const auto& t = c.trajectory;
    for (std::size_t k = 0; k + 1 < t.states.size(); ++k)
      CHECK(step_dynamics(t.states[k], c.actions.controls[k], t.dt) == t.states[k + 1]);
  }
  for (std::size_t i = 0; i < sp.ego_count(); ++i)
    for (std::size_t j = 0; j < sp.other_count(); ++j) {
      const auto& te = sp.ego_candidates[i].trajectory;
      const auto& to = sp.other_candidates[j].trajectory;
      CHECK(std::abs(sp.reward_ego(i, j) - pair_reward_ego(te, to, setup)) <= 1e-12);
      CHECK(std::abs(sp.reward_other(i, j) - pair_reward_other(te, to, setup)) <= 1e-12);
    }
}

TEST_CASE("role swap transposes the reward matrices") {
  // mirrored paths around the diagonal, identical states and weights
  const ReferencePath ego({{0, -50}, {0, 50}}, 10.0), other({{-50, 0}, {50, 0}}, 10.0);
  const PlanningSetup setup{Scene(ego, other), SamplerConfig{}, RewardConfig{}, 1};
  const JointState x0{{38, 6, 0}, {38, 6, 0}, 0};
  const auto a = build_joint_space(x0, setup);
  const auto b = build_joint_space({x0.other, x0.ego, 0}, setup.swapped());
  for (std::size_t i = 0; i < a.ego_count(); ++i)
    for (std::size_t j = 0; j < a.other_count(); ++j)
      CHECK(std::abs(a.reward_other(i, j) - b.reward_ego(j, i)) <= 1e-9);
}
