#include "uapp/planner.hpp"

#include "uapp/errors.hpp"

namespace uapp {

RewardWeights policy_weights(const PolicySpec& policy, int step) {
  if (const auto* f = std::get_if<FixedPolicy>(&policy)) return f->lambda;
  if (const auto* s = std::get_if<SwitchingPolicy>(&policy)) return step < s->switch_step ? s->before : s->after;
  return RewardWeights::egoism_only();
}

PlanResult plan_ego(const JointState& x0, const RewardWeights& lambda, const PlanningSetup& setup) {
  PlanResult result{{}, build_joint_space(x0, setup), {}};
  const auto terms = social_terms(result.space, setup.reward.beta);
  result.social = social_rewards(terms, lambda);
  const int best = argmax(result.social);
  result.action = result.space.ego_candidates[static_cast<std::size_t>(best)].actions;
  return result;
}

ActionSequence follower_response(const JointBehaviorSpace& space, int ego_label) {
  if (ego_label < 0 || static_cast<std::size_t>(ego_label) >= space.ego_count())
    throw UnknownCandidate("unknown ego candidate label " + std::to_string(ego_label));
  const int best = argmax(space.reward_other.row(static_cast<std::size_t>(ego_label)));
  return space.other_candidates[static_cast<std::size_t>(best)].actions;
}

bool interaction_over(const JointState& x, const ConflictPoint& conflict) {
  return x.ego.s >= conflict.s_ego || x.other.s >= conflict.s_other;
}

InteractionTrace simulate(const PlanningSetup& setup, const JointState& x0, const PolicySpec& ego_policy,
                          const PolicySpec& other_policy, int max_steps) {
  if (!std::holds_alternative<FollowerPolicy>(other_policy))
    throw InvalidArgument("the other agent must be a follower; two-leader games are not supported");
  if (std::holds_alternative<FollowerPolicy>(ego_policy))
    throw InvalidArgument("the ego agent must lead");
  if (max_steps < 0) throw InvalidArgument("max_steps must be >= 0");

  InteractionTrace trace{{}, {}, {}, {}, {}, {}, {}, setup.sampler.dt, setup.scene, false};
  JointState x = x0;
  trace.joint_states.push_back(x);
  for (int step = 0;; ++step) {
    if (interaction_over(x, setup.scene.conflict)) {
      trace.terminated = true;
      break;
    }
    if (step >= max_steps) break;

    const RewardWeights lambda = policy_weights(ego_policy, step);
    const PlanResult plan = plan_ego(x, lambda, setup);
    const ActionSequence reply = follower_response(plan.space, plan.action.label);

    const Control ue = plan.action.controls.front();
    const Control uo = reply.controls.front();
    x.ego = step_dynamics(x.ego, ue, setup.sampler.dt);
    x.other = step_dynamics(x.other, uo, setup.sampler.dt);
    x.t += 1;

    trace.controls_ego.push_back(ue);
    trace.controls_other.push_back(uo);
    trace.lambda_ego.push_back(lambda);
    trace.lambda_other.push_back(policy_weights(other_policy, step));
    trace.labels_ego.push_back(plan.action.label);
    trace.labels_other.push_back(reply.label);
    trace.joint_states.push_back(x);
  }
  return trace;
}

}  // namespace uapp
