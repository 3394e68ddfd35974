#pragma once

#include <array>
#include <span>
#include <variant>
#include <vector>

#include "uapp/joint_space.hpp"

namespace uapp {

/// Mixing weights over (egoism, courtesy, confidence) on the 2-simplex.
class RewardWeights {
 public:
  /// Throws InvalidArgument unless every component is >= 0 and they sum to 1
  /// within 1e-9.
  RewardWeights(double egoism, double courtesy, double confidence);
  /// Clamps negatives to zero and rescales onto the simplex.
  static RewardWeights normalized(std::array<double, 3> raw);

  static RewardWeights egoism_only() { return {1.0, 0.0, 0.0}; }
  static RewardWeights courtesy_only() { return {0.0, 1.0, 0.0}; }
  static RewardWeights confidence_only() { return {0.0, 0.0, 1.0}; }

  double egoism() const { return w_[0]; }
  double courtesy() const { return w_[1]; }
  double confidence() const { return w_[2]; }
  const std::array<double, 3>& values() const { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }

  friend bool operator==(const RewardWeights&, const RewardWeights&) = default;

 private:
  std::array<double, 3> w_;
};

struct EgoConditioned {
  int ego_label;
};
struct Absence {};

/// Boltzmann distribution over the other agent's candidates.
struct ResponseDistribution {
  std::vector<double> probs;
  std::vector<double> log_probs;
  std::variant<EgoConditioned, Absence> conditioning;
};

/// Numerically stable log-softmax of beta * rewards.
std::vector<double> log_softmax(std::span<const double> rewards, double beta = 1.0);
double log_sum_exp(std::span<const double> values);

/// KL(p || q) from log-probabilities over a common support.
double kl_divergence(std::span<const double> log_p, std::span<const double> log_q);

/// P(u_O | x0, u_E): softmax of the reward_other row of ego_label.
ResponseDistribution response_distribution(const JointBehaviorSpace& space, int ego_label, double beta);

/// P(u_O | x_O^0) from precomputed absence utilities.
ResponseDistribution absence_distribution(std::span<const double> absence_rewards, double beta);
/// P(u_O | x_O^0) recomputed from the other agent's candidates alone.
ResponseDistribution absence_distribution(const std::vector<Candidate>& other_candidates,
                                          const PlanningSetup& setup);
ResponseDistribution absence_distribution(const JointBehaviorSpace& space, double beta);

double egoism_reward(const JointBehaviorSpace& space, int ego_label, double beta);
double courtesy_reward(const JointBehaviorSpace& space, int ego_label, double beta);
/// Gap between the two most likely responses; 1 for a single candidate.
double confidence(const JointBehaviorSpace& space, int ego_label, double beta);
double confidence_reward(const JointBehaviorSpace& space, int ego_label, double beta);

/// Per-candidate reward terms with egoism min-max normalized over the ego
/// candidate set.
struct SocialTerms {
  double egoism_raw = 0.0;
  double egoism = 0.0;
  double courtesy = 0.0;
  double confidence = 0.0;  // the exponentiated confidence reward

  double mix(const RewardWeights& lambda) const {
    return lambda.egoism() * egoism + lambda.courtesy() * courtesy + lambda.confidence() * confidence;
  }
};

std::vector<SocialTerms> social_terms(const JointBehaviorSpace& space, double beta);

double social_reward(const JointBehaviorSpace& space, int ego_label, const RewardWeights& lambda,
                     double beta);
std::vector<double> social_rewards(std::span<const SocialTerms> terms, const RewardWeights& lambda);

/// Index of the largest value, lowest index on ties.
int argmax(std::span<const double> values);

}  // namespace uapp
