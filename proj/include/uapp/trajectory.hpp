#pragma once

#include <vector>

#include "uapp/core.hpp"

namespace uapp {

struct SamplerConfig {
  int horizon_steps = 12;
  double dt = 0.25;
  std::vector<double> terminal_speed_fractions{0.0, 0.25, 0.5, 0.75, 1.0, 1.25};
  double accel_min = -6.0;
  double accel_max = 3.0;
  bool allow_singleton = true;

  /// Throws ConfigError on an unusable configuration.
  void validate() const;
};

struct ActionSequence {
  std::vector<Control> controls;
  int label = 0;
};

/// Rolled-out states (N+1, including the initial one) together with the
/// controls that produced them.
struct Trajectory {
  std::vector<AgentState> states;
  std::vector<Control> controls;
  double dt = 0.0;

  int steps() const { return static_cast<int>(states.size()) - 1; }
};

struct Candidate {
  ActionSequence actions;
  Trajectory trajectory;
};

/// One constant-acceleration sequence per terminal-speed fraction, clamped
/// to the acceleration bounds and deduplicated. Labels follow ascending
/// target speed.
std::vector<ActionSequence> sample_sequences(const AgentState& state, const ReferencePath& path,
                                             const SamplerConfig& cfg);

Trajectory rollout(const AgentState& state, const ActionSequence& seq, double dt);

std::vector<Candidate> make_candidates(const AgentState& state, const ReferencePath& path,
                                       const SamplerConfig& cfg);

}  // namespace uapp
