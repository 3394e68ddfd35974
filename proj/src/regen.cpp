#include "uapp/regen.hpp"

#include <algorithm>
#include <cmath>

#include "uapp/errors.hpp"
#include "uapp/metrics.hpp"
#include "uapp/social.hpp"

namespace uapp {

RegenResult regenerate(const Trajectory& observed_ego, const Trajectory& observed_other, const PlanningSetup& setup,
                       const LambdaSeries& estimates, int window_r, const std::vector<double>& horizons,
                       bool keep_samples) {
  if (horizons.empty()) throw InvalidArgument("no regeneration horizons");
  if (observed_ego.states.size() != observed_other.states.size())
    throw InvalidArgument("observed trajectories differ in length");
  const double dt = setup.sampler.dt;
  const double h_max = *std::max_element(horizons.begin(), horizons.end());
  const int span = static_cast<int>(std::floor(h_max / dt + 1e-9));
  if (span > setup.sampler.horizon_steps) throw HorizonExceedsTrace("horizon longer than the planning horizon");

  RegenResult out;
  out.horizons = horizons;
  const char* names[] = {"egoism", "courtesy", "confidence", "estimated"};
  for (const char* n : names) out.policies.push_back({n, std::vector<double>(horizons.size(), 0.0)});

  const int len = static_cast<int>(observed_ego.states.size());
  for (int k = window_r; k + span < len; ++k) {
    const JointState x{observed_ego.states[static_cast<std::size_t>(k)],
                       observed_other.states[static_cast<std::size_t>(k)], k};
    const auto space = build_joint_space(x, setup);
    const auto terms = social_terms(space, setup.reward.beta);
    Trajectory truth;
    truth.dt = dt;
    truth.states.assign(observed_ego.states.begin() + k, observed_ego.states.begin() + k + span + 1);
    const RewardWeights lambdas[] = {RewardWeights::egoism_only(), RewardWeights::courtesy_only(),
                                     RewardWeights::confidence_only(), estimates.available_at(k, window_r)};
    for (std::size_t p = 0; p < 4; ++p) {
      const int label = argmax(social_rewards(terms, lambdas[p]));
      const auto& traj = space.ego_candidates[static_cast<std::size_t>(label)].trajectory;
      for (std::size_t h = 0; h < horizons.size(); ++h)
        out.policies[p].mse[h] += trajectory_mse(traj, truth, horizons[h], &setup.scene.path_ego);
      if (keep_samples) out.samples.push_back({k, names[p], traj});
    }
    out.frames.push_back(k);
  }
  if (out.frames.empty()) throw ShortTrack("trace too short to regenerate any frame");
  for (auto& p : out.policies)
    for (double& m : p.mse) m /= static_cast<double>(out.frames.size());
  return out;
}

}  // namespace uapp
