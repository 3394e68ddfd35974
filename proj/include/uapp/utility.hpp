#pragma once

#include <array>

#include "uapp/core.hpp"
#include "uapp/trajectory.hpp"

namespace uapp {

/// Per-horizon accumulated penalties. All components are <= 0.
struct FeatureVector {
  double efficiency = 0.0;
  double comfort = 0.0;
  double safety = 0.0;
};

/// Weights over (efficiency, comfort, safety).
struct UtilityWeights {
  std::array<double, 3> theta{1.0, 0.5, 10.0};
};

/// Normalization constants that make every feature dimensionless.
/// The desired speed is the speed limit of the agent's own path.
struct FeatureScales {
  double lateral = 1.0;        // d0 [m]
  double accel = 3.0;          // a0 [m/s^2]
  double jerk = 5.0;           // j0 [m/s^3]
  double distance = 5.0;       // sigma_d [m]
  double conflict = 10.0;      // sigma_c [m]
};

struct RewardConfig {
  UtilityWeights theta_ego;
  UtilityWeights theta_other;
  double beta = 1.0;
  FeatureScales scales;

  void validate() const;
};

/// Everything the safety feature needs to know about the other agent.
struct OtherAgentView {
  const Trajectory& trajectory;
  const ReferencePath& path;
  double conflict_s_self;   // conflict arclength on the evaluated agent's path
  double conflict_s_other;  // conflict arclength on the other agent's path
};

/// Accumulates the features over steps k = 0..N-1, pairing control k with the
/// state it produces (states[k+1]). Without an other agent, safety is zero.
FeatureVector features(const Trajectory& self, const ReferencePath& self_path,
                       const OtherAgentView* other, const FeatureScales& scales);

double cumulative_reward(const FeatureVector& phi, const UtilityWeights& theta);

double cumulative_reward(const Trajectory& self, const ReferencePath& self_path,
                         const OtherAgentView* other, const UtilityWeights& theta,
                         const FeatureScales& scales);

}  // namespace uapp
