#include "uapp/utility.hpp"

#include <cmath>

#include "uapp/errors.hpp"

namespace uapp {

void RewardConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be positive");
  for (const auto* w : {&theta_ego, &theta_other})
    for (double t : w->theta)
      if (!std::isfinite(t)) throw ConfigError("utility weights must be finite");
  const FeatureScales& s = scales;
  for (double c : {s.lateral, s.accel, s.jerk, s.distance, s.conflict})
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("feature scales must be positive");
}

FeatureVector features(const Trajectory& self, const ReferencePath& self_path,
                       const OtherAgentView* other, const FeatureScales& scales) {
  FeatureVector phi;
  const double v_des = self_path.speed_limit();
  const double dt = self.dt;
  const int steps = self.steps();
  if (other && other->trajectory.steps() != steps)
    throw InvalidArgument("trajectories must share the horizon");

  for (int k = 0; k < steps; ++k) {
    const AgentState& x = self.states[static_cast<std::size_t>(k) + 1];
    const double a = self.controls[static_cast<std::size_t>(k)].a;
    const double jerk =
        k == 0 ? 0.0 : (a - self.controls[static_cast<std::size_t>(k) - 1].a) / dt;

    const double dv = (x.v - v_des) / v_des;
    const double dl = x.d / scales.lateral;
    phi.efficiency -= dv * dv + dl * dl;

    const double na = a / scales.accel;
    const double nj = jerk / scales.jerk;
    phi.comfort -= na * na + nj * nj;

    if (other) {
      const AgentState& y = other->trajectory.states[static_cast<std::size_t>(k) + 1];
      const double d_rel = distance(self_path.point_at(x.s, x.d), other->path.point_at(y.s, y.d));
      const double to_conflict =
          std::abs(x.s - other->conflict_s_self) + std::abs(y.s - other->conflict_s_other);
      phi.safety -= std::exp(-d_rel / scales.distance) * std::exp(-to_conflict / scales.conflict);
    }
  }
  return phi;
}

double cumulative_reward(const FeatureVector& phi, const UtilityWeights& theta) {
  return theta.theta[0] * phi.efficiency + theta.theta[1] * phi.comfort +
         theta.theta[2] * phi.safety;
}

double cumulative_reward(const Trajectory& self, const ReferencePath& self_path,
                         const OtherAgentView* other, const UtilityWeights& theta,
                         const FeatureScales& scales) {
  return cumulative_reward(features(self, self_path, other, scales), theta);
}

}  // namespace uapp
