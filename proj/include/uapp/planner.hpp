#pragma once

#include <variant>
#include <vector>

#include "uapp/joint_space.hpp"
#include "uapp/social.hpp"

namespace uapp {

struct FixedPolicy {
  RewardWeights lambda;
};

/// Fixed weights that change once, at the given simulation step.
struct SwitchingPolicy {
  RewardWeights before;
  RewardWeights after;
  int switch_step = 0;
};

/// Best-responds to the leader's committed action with pure egoism.
struct FollowerPolicy {};

using PolicySpec = std::variant<FixedPolicy, SwitchingPolicy, FollowerPolicy>;

/// Weights in effect at `step`; a follower reports pure egoism.
RewardWeights policy_weights(const PolicySpec& policy, int step);

struct PlanResult {
  ActionSequence action;
  JointBehaviorSpace space;
  std::vector<double> social;  // social reward per ego candidate
};

/// Leader decision: the ego candidate with the highest social reward,
/// lowest label on ties.
PlanResult plan_ego(const JointState& x0, const RewardWeights& lambda, const PlanningSetup& setup);

/// Follower decision: argmax of the reward_other row, lowest label on ties.
ActionSequence follower_response(const JointBehaviorSpace& space, int ego_label);

struct SimulationConfig {
  int max_steps = 200;
};

struct InteractionTrace {
  std::vector<JointState> joint_states;
  std::vector<Control> controls_ego;
  std::vector<Control> controls_other;
  std::vector<RewardWeights> lambda_ego;    // one per applied step
  std::vector<RewardWeights> lambda_other;
  std::vector<int> labels_ego;
  std::vector<int> labels_other;
  double dt = 0.0;
  Scene scene;
  bool terminated = false;  // false when max_steps was hit first

  std::size_t steps() const { return controls_ego.size(); }
};

/// True once either agent reached its conflict arclength.
bool interaction_over(const JointState& x, const ConflictPoint& conflict);

/// Receding-horizon closed loop: each step the ego plans as leader, the other
/// best-responds to the chosen plan, both apply their first control.
/// Throws InvalidArgument unless other_policy is a follower.
InteractionTrace simulate(const PlanningSetup& setup, const JointState& x0, const PolicySpec& ego_policy,
                          const PolicySpec& other_policy, int max_steps);

}  // namespace uapp
