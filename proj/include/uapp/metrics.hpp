#pragma once

#include <array>
#include <span>
#include <string_view>

#include "uapp/planner.hpp"

namespace uapp {

enum class PolicyLabel { kEgoism = 0, kCourtesy = 1, kConfidence = 2 };

std::string_view to_string(PolicyLabel label);

/// Argmax component; ties resolve in the order egoism, courtesy, confidence.
PolicyLabel dominant(const RewardWeights& lambda);

struct InteractionStats {
  double are = 0.0;
  double ait = 0.0;
  double min_distance = 0.0;
};

/// Mean Cartesian distance between the agents over every recorded state.
double are(const InteractionTrace& trace);
/// Time at which the trace terminated. Throws NonTerminating otherwise.
double ait(const InteractionTrace& trace);
InteractionStats interaction_stats(const InteractionTrace& trace);

/// Mean squared positional error over the steps k with k*dt <= horizon,
/// starting at k = 0. With a path the error is measured in Cartesian
/// coordinates, otherwise directly in the (s, d) frame.
double trajectory_mse(const Trajectory& generated, const Trajectory& ground_truth, double horizon,
                      const ReferencePath* path = nullptr);

/// Number of frames whose dominant label differs from the previous frame.
int psf(std::span<const RewardWeights> series);
int psf(std::span<const PolicyLabel> labels);

/// Fraction of frames each label dominates, indexed by PolicyLabel.
std::array<double, 3> dop(std::span<const RewardWeights> series);
std::array<double, 3> dop(std::span<const PolicyLabel> labels);

}  // namespace uapp
