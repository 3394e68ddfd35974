#include "uapp/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "uapp/errors.hpp"

namespace uapp {

void SamplerConfig::validate() const {
  if (horizon_steps < 1) throw ConfigError("horizon_steps must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (terminal_speed_fractions.empty()) throw ConfigError("terminal_speed_fractions is empty");
  for (double f : terminal_speed_fractions)
    if (!std::isfinite(f) || f < 0.0) throw ConfigError("terminal speed fractions must be finite and >= 0");
  if (!(accel_min <= 0.0 && accel_max >= 0.0 && accel_min < accel_max))
    throw ConfigError("acceleration bounds must satisfy accel_min <= 0 <= accel_max");
}

std::vector<ActionSequence> sample_sequences(const AgentState& state, const ReferencePath& path,
                                             const SamplerConfig& cfg) {
  cfg.validate();
  std::vector<double> fractions = cfg.terminal_speed_fractions;
  std::sort(fractions.begin(), fractions.end());

  const double duration = cfg.horizon_steps * cfg.dt;
  std::vector<double> accels;
  for (double f : fractions) {
    const double v_target = f * path.speed_limit();
    const double a = std::clamp((v_target - state.v) / duration, cfg.accel_min, cfg.accel_max);
    const bool duplicate = std::any_of(accels.begin(), accels.end(),
                                       [a](double b) { return std::abs(a - b) <= 1e-12; });
    if (!duplicate) accels.push_back(a);
  }
  if (accels.size() == 1 && fractions.size() > 1 && !cfg.allow_singleton)
    throw EmptyCandidateSet("all sampled candidates collapsed to a single sequence");

  std::vector<ActionSequence> out;
  out.reserve(accels.size());
  for (std::size_t i = 0; i < accels.size(); ++i) {
    ActionSequence seq;
    seq.controls.assign(static_cast<std::size_t>(cfg.horizon_steps), Control{accels[i]});
    seq.label = static_cast<int>(i);
    out.push_back(std::move(seq));
  }
  return out;
}

Trajectory rollout(const AgentState& state, const ActionSequence& seq, double dt) {
  Trajectory traj;
  traj.dt = dt;
  traj.controls = seq.controls;
  traj.states.reserve(seq.controls.size() + 1);
  traj.states.push_back(state);
  for (const Control& u : seq.controls) traj.states.push_back(step_dynamics(traj.states.back(), u, dt));
  return traj;
}

std::vector<Candidate> make_candidates(const AgentState& state, const ReferencePath& path,
                                       const SamplerConfig& cfg) {
  std::vector<Candidate> out;
  for (auto& seq : sample_sequences(state, path, cfg)) {
    Trajectory traj = rollout(state, seq, cfg.dt);
    out.push_back({std::move(seq), std::move(traj)});
  }
  return out;
}

}  // namespace uapp
