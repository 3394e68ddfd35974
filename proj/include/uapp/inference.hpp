#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "uapp/joint_space.hpp"
#include "uapp/social.hpp"

namespace uapp {

struct UniformPrior {};
struct DirichletPrior {
  std::array<double, 3> alpha{1.0, 1.0, 1.0};
};
/// Prior mass per dominance region, e.g. fractions measured by dop().
struct DopPrior {
  std::array<double, 3> fractions{1.0 / 3, 1.0 / 3, 1.0 / 3};
};
using Prior = std::variant<UniformPrior, DirichletPrior, DopPrior>;

enum class WindowMode {
  kSliding,  // fixed length r, advancing one step
  kGrowing,  // anchored at the first frame until it spans the planning horizon
};

struct InferenceConfig {
  int n_particles = 100;
  int window_r = 10;
  Prior prior = UniformPrior{};
  WindowMode window_mode = WindowMode::kSliding;
  bool resample = false;  // systematic resampling when the ESS drops below N/2

  void validate() const;
};

struct Particle {
  RewardWeights lambda;
  double weight = 0.0;
  double log_weight = 0.0;  // unnormalized; the maximum is kept at 0
};

struct ParticleSet {
  std::vector<Particle> particles;

  std::size_t size() const { return particles.size(); }
  double effective_sample_size() const;
};

/// Stratified draws on the 2-simplex (shifted low-discrepancy lattice) with
/// weights proportional to the prior density.
ParticleSet init_particles(const InferenceConfig& cfg, std::uint64_t seed);

struct MatchResult {
  int label = 0;
  double mse = 0.0;
};

/// Candidate whose trajectory is closest in mean squared path-frame position
/// (s, d) to the observed one, compared over their common length. Lowest
/// label wins ties. Throws EmptyCandidateSet.
MatchResult match_observed(const Trajectory& observed, std::span<const Candidate> candidates);

/// log p(observation | lambda): log-softmax of the social rewards over the
/// candidate set, evaluated at the matched candidate.
double window_log_likelihood(std::span<const SocialTerms> terms, int matched_label,
                             const RewardWeights& lambda);
double window_likelihood(int matched_label, const RewardWeights& lambda, const JointBehaviorSpace& space,
                         double beta);

/// Adds one log-likelihood per particle and renormalizes.
ParticleSet reweight(const ParticleSet& set, std::span<const double> log_likelihoods);

/// Multiplies every weight by its likelihood (in log space) and renormalizes.
/// Throws DegenerateWeights if no particle keeps positive weight.
ParticleSet update_posterior(const ParticleSet& set, std::span<const SocialTerms> terms, int matched_label);
ParticleSet update_posterior(const ParticleSet& set, int matched_label, const JointBehaviorSpace& space,
                             double beta);

/// Weighted mean of the particle weights projected back onto the simplex.
RewardWeights estimate_lambda(const ParticleSet& set);

/// Systematic resampling to uniform weights.
ParticleSet resample_systematic(const ParticleSet& set, std::uint64_t seed);

struct LambdaSeries {
  std::vector<int> frames;  // window start index, in planner steps
  std::vector<RewardWeights> estimates;
  std::vector<int> matched_labels;
  RewardWeights prior_mean{1.0 / 3, 1.0 / 3, 1.0 / 3};
  ParticleSet final_particles;

  /// Latest estimate computable from observations up to step k (causal);
  /// the prior mean before the first window closes.
  RewardWeights available_at(int k, int window_r) const;
};

/// Online estimate for the agent in the leader role of `setup`, given both
/// agents' observed path-frame trajectories sampled at the planner dt.
/// Throws ShortTrack when fewer than r+1 samples are available.
LambdaSeries infer_agent(const Trajectory& observed_self, const Trajectory& observed_other,
                         const PlanningSetup& setup, const InferenceConfig& cfg, std::uint64_t seed);

struct PairLambdaSeries {
  LambdaSeries ego;
  LambdaSeries other;
};

/// Runs infer_agent on each car separately; the other car is processed with
/// the roles swapped.
PairLambdaSeries infer_trace(const Trajectory& observed_ego, const Trajectory& observed_other,
                             const PlanningSetup& setup, const InferenceConfig& cfg, std::uint64_t seed);

}  // namespace uapp
