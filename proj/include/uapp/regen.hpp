#pragma once

#include <string>
#include <vector>

#include "uapp/inference.hpp"
#include "uapp/planner.hpp"

namespace uapp {

struct RegenSample {
  int frame = 0;
  std::string policy;
  Trajectory trajectory;  // the chosen candidate, starting at the observed state
};

struct RegenPolicyResult {
  std::string policy;
  std::vector<double> mse;  // one entry per horizon, averaged over frames
};

struct RegenResult {
  std::vector<double> horizons;
  std::vector<int> frames;
  std::vector<RegenPolicyResult> policies;  // egoism, courtesy, confidence, estimated
  std::vector<RegenSample> samples;
};

/// Replans the leader from every observed joint state k >= window_r that
/// leaves enough future frames for the longest horizon, once per fixed basis
/// policy and once with the causal online estimate available at k, and
/// scores each chosen candidate against the observed future.
RegenResult regenerate(const Trajectory& observed_ego, const Trajectory& observed_other, const PlanningSetup& setup,
                       const LambdaSeries& estimates, int window_r, const std::vector<double>& horizons,
                       bool keep_samples = false);

}  // namespace uapp
