#pragma once

#include <span>
#include <vector>

#include "uapp/core.hpp"
#include "uapp/trajectory.hpp"
#include "uapp/utility.hpp"

namespace uapp {

/// Dense row-major matrix indexed by (ego candidate, other candidate).
class RewardMatrix {
 public:
  RewardMatrix() = default;
  RewardMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Static inputs of one planning problem.
struct PlanningSetup {
  Scene scene;
  SamplerConfig sampler;
  RewardConfig reward;
  int threads = 1;

  /// Roles exchanged: the other agent becomes the leader.
  PlanningSetup swapped() const;
};

/// Candidate sets of both agents with cached pairwise utilities.
/// reward_ego(i, j) is the ego utility for the pair (ego i, other j);
/// reward_other(i, j) the other agent's utility for the same pair.
/// absence_reward_other[j] is the other agent's utility with no ego present.
struct JointBehaviorSpace {
  std::vector<Candidate> ego_candidates;
  std::vector<Candidate> other_candidates;
  RewardMatrix reward_ego;
  RewardMatrix reward_other;
  std::vector<double> absence_reward_other;

  std::size_t ego_count() const { return ego_candidates.size(); }
  std::size_t other_count() const { return other_candidates.size(); }
};

/// Samples both candidate sets at x0, rolls them out and evaluates every pair.
JointBehaviorSpace build_joint_space(const JointState& x0, const PlanningSetup& setup);

/// Utility of the ego trajectory against a given other trajectory.
double pair_reward_ego(const Trajectory& ego, const Trajectory& other, const PlanningSetup& setup);
/// Utility of the other trajectory against a given ego trajectory.
double pair_reward_other(const Trajectory& ego, const Trajectory& other, const PlanningSetup& setup);
/// Utility of the other trajectory when the ego is absent.
double absence_reward_other(const Trajectory& other, const PlanningSetup& setup);

}  // namespace uapp
