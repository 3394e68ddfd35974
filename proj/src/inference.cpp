#include "uapp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "uapp/errors.hpp"

namespace uapp {

void InferenceConfig::validate() const {
  if (n_particles < 2) throw ConfigError("n_particles must be >= 2");
  if (window_r < 1) throw ConfigError("window_r must be >= 1");
  if (const auto* d = std::get_if<DirichletPrior>(&prior)) {
    for (double a : d->alpha)
      if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("Dirichlet alpha must be positive");
  }
  if (const auto* d = std::get_if<DopPrior>(&prior)) {
    double total = 0.0;
    for (double f : d->fractions) {
      if (!(f >= 0.0) || !std::isfinite(f)) throw ConfigError("DOP fractions must be >= 0");
      total += f;
    }
    if (!(total > 0.0)) throw ConfigError("DOP fractions must have positive mass");
  }
}

double ParticleSet::effective_sample_size() const {
  double sum_sq = 0.0;
  for (const auto& p : particles) sum_sq += p.weight * p.weight;
  return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

namespace {

int dominant_index(const RewardWeights& l) {
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (l[static_cast<std::size_t>(i)] > l[static_cast<std::size_t>(best)]) best = i;
  return best;
}

// Sets weights from log-weights, keeping the maximum log-weight at zero.
void normalize_log_weights(std::vector<Particle>& particles) {
  double max_lw = -std::numeric_limits<double>::infinity();
  for (const auto& p : particles) {
    if (std::isnan(p.log_weight)) throw DegenerateWeights("particle log-weight is NaN");
    max_lw = std::max(max_lw, p.log_weight);
  }
  if (!std::isfinite(max_lw)) throw DegenerateWeights("all particle weights vanished");
  double total = 0.0;
  for (auto& p : particles) {
    p.log_weight -= max_lw;
    p.weight = std::exp(p.log_weight);
    total += p.weight;
  }
  for (auto& p : particles) p.weight /= total;
}

}  // namespace

ParticleSet init_particles(const InferenceConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double shift1 = unit(rng);
  const double shift2 = unit(rng);

  // Additive recurrence on the plastic number: a 2-D low-discrepancy lattice.
  constexpr double kPlastic = 1.32471795724474602596;
  constexpr double kStep1 = 1.0 / kPlastic;
  constexpr double kStep2 = 1.0 / (kPlastic * kPlastic);

  ParticleSet set;
  const auto n = static_cast<std::size_t>(cfg.n_particles);
  set.particles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u1 = std::fmod(shift1 + static_cast<double>(i + 1) * kStep1, 1.0);
    const double u2 = std::fmod(shift2 + static_cast<double>(i + 1) * kStep2, 1.0);
    // Area-preserving map from the unit square onto the simplex.
    const double r = std::sqrt(u1);
    set.particles.push_back({RewardWeights::normalized({1.0 - r, r * (1.0 - u2), r * u2}), 0.0, 0.0});
  }

  if (const auto* dir = std::get_if<DirichletPrior>(&cfg.prior)) {
    for (auto& p : set.particles) {
      double lw = 0.0;
      for (std::size_t k = 0; k < 3; ++k)
        lw += (dir->alpha[k] - 1.0) * std::log(std::max(p.lambda[k], 1e-300));
      p.log_weight = lw;
    }
  } else if (const auto* dop = std::get_if<DopPrior>(&cfg.prior)) {
    std::array<int, 3> counts{0, 0, 0};
    for (const auto& p : set.particles) ++counts[static_cast<std::size_t>(dominant_index(p.lambda))];
    for (auto& p : set.particles) {
      const auto region = static_cast<std::size_t>(dominant_index(p.lambda));
      const double mass = dop->fractions[region] / counts[region];
      p.log_weight = mass > 0.0 ? std::log(mass) : -std::numeric_limits<double>::infinity();
    }
  }
  normalize_log_weights(set.particles);
  return set;
}

MatchResult match_observed(const Trajectory& observed, std::span<const Candidate> candidates) {
  if (candidates.empty()) throw EmptyCandidateSet("no candidates to match against");
  MatchResult best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto& states = candidates[c].trajectory.states;
    const std::size_t len = std::min(states.size(), observed.states.size());
    if (len == 0) throw InvalidArgument("cannot match an empty trajectory");
    double sum = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      const double ds = states[k].s - observed.states[k].s;
      const double dd = states[k].d - observed.states[k].d;
      sum += ds * ds + dd * dd;
    }
    const double mse = sum / static_cast<double>(len);
    if (mse < best.mse) best = {candidates[c].actions.label, mse};
  }
  return best;
}

double window_log_likelihood(std::span<const SocialTerms> terms, int matched_label,
                             const RewardWeights& lambda) {
  if (matched_label < 0 || static_cast<std::size_t>(matched_label) >= terms.size())
    throw UnknownCandidate("unknown matched candidate label " + std::to_string(matched_label));
  auto rewards = social_rewards(terms, lambda);
  return rewards[static_cast<std::size_t>(matched_label)] - log_sum_exp(rewards);
}

double window_likelihood(int matched_label, const RewardWeights& lambda, const JointBehaviorSpace& space,
                         double beta) {
  const auto terms = social_terms(space, beta);
  return std::exp(window_log_likelihood(terms, matched_label, lambda));
}

ParticleSet reweight(const ParticleSet& set, std::span<const double> log_likelihoods) {
  if (set.particles.empty()) throw InvalidArgument("empty particle set");
  if (log_likelihoods.size() != set.size()) throw InvalidArgument("one log-likelihood per particle expected");
  ParticleSet out = set;
  for (std::size_t i = 0; i < out.size(); ++i) out.particles[i].log_weight += log_likelihoods[i];
  normalize_log_weights(out.particles);
  return out;
}

ParticleSet update_posterior(const ParticleSet& set, std::span<const SocialTerms> terms, int matched_label) {
  std::vector<double> ll;
  ll.reserve(set.size());
  for (const auto& p : set.particles) ll.push_back(window_log_likelihood(terms, matched_label, p.lambda));
  return reweight(set, ll);
}

ParticleSet update_posterior(const ParticleSet& set, int matched_label, const JointBehaviorSpace& space,
                             double beta) {
  const auto terms = social_terms(space, beta);
  return update_posterior(set, terms, matched_label);
}

RewardWeights estimate_lambda(const ParticleSet& set) {
  if (set.particles.empty()) throw InvalidArgument("empty particle set");
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  for (const auto& p : set.particles)
    for (std::size_t k = 0; k < 3; ++k) mean[k] += p.weight * p.lambda[k];
  return RewardWeights::normalized(mean);
}

ParticleSet resample_systematic(const ParticleSet& set, std::uint64_t seed) {
  const std::size_t n = set.size();
  std::mt19937_64 rng(seed);
  const double start = std::uniform_real_distribution<double>(0.0, 1.0 / static_cast<double>(n))(rng);
  ParticleSet out;
  out.particles.reserve(n);
  double cumulative = set.particles.front().weight;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = start + static_cast<double>(i) / static_cast<double>(n);
    while (target > cumulative && j + 1 < n) cumulative += set.particles[++j].weight;
    out.particles.push_back({set.particles[j].lambda, 1.0 / static_cast<double>(n), 0.0});
  }
  return out;
}

RewardWeights LambdaSeries::available_at(int k, int window_r) const {
  const int w = k - window_r;
  if (w < 0 || estimates.empty()) return prior_mean;
  return estimates[static_cast<std::size_t>(std::min<int>(w, static_cast<int>(estimates.size()) - 1))];
}

namespace {

Trajectory slice(const Trajectory& traj, std::size_t begin, std::size_t end) {
  Trajectory out;
  out.dt = traj.dt;
  out.states.assign(traj.states.begin() + static_cast<std::ptrdiff_t>(begin),
                    traj.states.begin() + static_cast<std::ptrdiff_t>(end) + 1);
  return out;
}

}  // namespace

LambdaSeries infer_agent(const Trajectory& observed_self, const Trajectory& observed_other,
                         const PlanningSetup& setup, const InferenceConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::size_t len = std::min(observed_self.states.size(), observed_other.states.size());
  const auto r = static_cast<std::size_t>(cfg.window_r);
  if (len < r + 1)
    throw ShortTrack("track has " + std::to_string(len) + " samples, need at least " + std::to_string(r + 1));

  LambdaSeries series;
  ParticleSet particles = init_particles(cfg, seed);
  series.prior_mean = estimate_lambda(particles);
  const auto horizon = static_cast<std::size_t>(setup.sampler.horizon_steps);

  for (std::size_t end = r; end < len; ++end) {
    std::size_t begin = end - r;
    if (cfg.window_mode == WindowMode::kGrowing) begin = end > horizon ? end - horizon : 0;

    const JointState x{observed_self.states[begin], observed_other.states[begin], static_cast<int>(begin)};
    const JointBehaviorSpace space = build_joint_space(x, setup);
    const auto terms = social_terms(space, setup.reward.beta);
    const MatchResult match = match_observed(slice(observed_self, begin, end), space.ego_candidates);

    particles = update_posterior(particles, terms, match.label);
    if (cfg.resample && particles.effective_sample_size() < 0.5 * static_cast<double>(particles.size()))
      particles = resample_systematic(particles, seed ^ (0x9e3779b97f4a7c15ULL * (end + 1)));

    series.frames.push_back(static_cast<int>(end - r));
    series.estimates.push_back(estimate_lambda(particles));
    series.matched_labels.push_back(match.label);
  }
  series.final_particles = std::move(particles);
  return series;
}

PairLambdaSeries infer_trace(const Trajectory& observed_ego, const Trajectory& observed_other,
                             const PlanningSetup& setup, const InferenceConfig& cfg, std::uint64_t seed) {
  PairLambdaSeries out;
  out.ego = infer_agent(observed_ego, observed_other, setup, cfg, seed);
  out.other = infer_agent(observed_other, observed_ego, setup.swapped(), cfg, seed + 1);
  return out;
}

}  // namespace uapp
