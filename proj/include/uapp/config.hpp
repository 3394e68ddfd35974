#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uapp/inference.hpp"
#include "uapp/io.hpp"
#include "uapp/planner.hpp"

namespace uapp {

inline constexpr int kSchemaVersion = 1;

struct NamedPolicy {
  std::string name;
  PolicySpec policy;
};

/// How make_fixture drives the leader. With `after` set the weights switch
/// at `switch_step`, or at the midpoint of the unswitched run when
/// switch_step is negative.
struct FixtureSpec {
  RewardWeights lambda = RewardWeights::egoism_only();
  std::optional<RewardWeights> after;
  int switch_step = -1;
  double jitter_s = 0.0;  // uniform half-width on both initial arclengths [m]
  double jitter_v = 0.0;  // uniform half-width on both initial speeds [m/s]
};

struct ScenarioConfig {
  ScenarioConfig(ReferencePath ego, ReferencePath other)
      : path_ego(std::move(ego)), path_other(std::move(other)) {}

  std::filesystem::path base_dir;  // relative file references resolve here
  ReferencePath path_ego;
  ReferencePath path_other;
  std::optional<JointState> initial;  // required by sim and fixture
  SamplerConfig sampler;
  RewardConfig reward;
  InferenceConfig inference;
  int max_steps = 200;
  int threads = 1;
  std::uint64_t seed = 0;
  std::vector<NamedPolicy> policies;  // leader policies for `sim`
  FixtureSpec fixture;
  std::optional<std::filesystem::path> tracks;
  double conflict_window = 5.0;  // seconds
  std::vector<double> regen_horizons{0.3, 0.5, 1.0};

  PlanningSetup setup() const;
};

/// Parses and validates a config document. Throws ConfigError.
ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
/// Throws IoError when the file cannot be read.
ScenarioConfig load_config(const std::filesystem::path& file);

struct Fixture {
  InteractionTrace trace;
  JointState initial;
  int switch_step = -1;
  std::vector<Track> tracks;  // ego = track 1, other = track 2
};

inline constexpr int kFixtureEgoTrack = 1;
inline constexpr int kFixtureOtherTrack = 2;

/// Simulates the configured scene from a seeded perturbation of the initial
/// state and exports both cars as tracks, one frame per planner step.
Fixture make_fixture(const ScenarioConfig& cfg, const FixtureSpec& spec, std::uint64_t seed);

}  // namespace uapp
