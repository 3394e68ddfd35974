#include "uapp/joint_space.hpp"

#include <cmath>

#include "uapp/errors.hpp"
#include "uapp/parallel.hpp"

namespace uapp {

PlanningSetup PlanningSetup::swapped() const {
  PlanningSetup out{scene.swapped(), sampler, reward, threads};
  std::swap(out.reward.theta_ego, out.reward.theta_other);
  return out;
}

double pair_reward_ego(const Trajectory& ego, const Trajectory& other, const PlanningSetup& setup) {
  const Scene& sc = setup.scene;
  const OtherAgentView view{other, sc.path_other, sc.conflict.s_ego, sc.conflict.s_other};
  return cumulative_reward(ego, sc.path_ego, &view, setup.reward.theta_ego, setup.reward.scales);
}

double pair_reward_other(const Trajectory& ego, const Trajectory& other, const PlanningSetup& setup) {
  const Scene& sc = setup.scene;
  const OtherAgentView view{ego, sc.path_ego, sc.conflict.s_other, sc.conflict.s_ego};
  return cumulative_reward(other, sc.path_other, &view, setup.reward.theta_other, setup.reward.scales);
}

double absence_reward_other(const Trajectory& other, const PlanningSetup& setup) {
  return cumulative_reward(other, setup.scene.path_other, nullptr, setup.reward.theta_other,
                           setup.reward.scales);
}

JointBehaviorSpace build_joint_space(const JointState& x0, const PlanningSetup& setup) {
  setup.reward.validate();
  JointBehaviorSpace space;
  space.ego_candidates = make_candidates(x0.ego, setup.scene.path_ego, setup.sampler);
  space.other_candidates = make_candidates(x0.other, setup.scene.path_other, setup.sampler);
  if (space.ego_candidates.empty() || space.other_candidates.empty())
    throw EmptyCandidateSet("joint behavior space needs candidates for both agents");

  const std::size_t ne = space.ego_count();
  const std::size_t no = space.other_count();
  space.reward_ego = RewardMatrix(ne, no);
  space.reward_other = RewardMatrix(ne, no);
  space.absence_reward_other.resize(no);

  parallel_for(ne * no, setup.threads, [&](std::size_t idx) {
    const std::size_t i = idx / no;
    const std::size_t j = idx % no;
    const Trajectory& te = space.ego_candidates[i].trajectory;
    const Trajectory& to = space.other_candidates[j].trajectory;
    space.reward_ego(i, j) = pair_reward_ego(te, to, setup);
    space.reward_other(i, j) = pair_reward_other(te, to, setup);
  });
  for (std::size_t j = 0; j < no; ++j)
    space.absence_reward_other[j] = absence_reward_other(space.other_candidates[j].trajectory, setup);

  for (std::size_t i = 0; i < ne; ++i)
    for (std::size_t j = 0; j < no; ++j)
      if (!std::isfinite(space.reward_ego(i, j)) || !std::isfinite(space.reward_other(i, j)))
        throw InvalidArgument("joint behavior space produced a non-finite reward");
  return space;
}

}  // namespace uapp
