#include "uapp/social.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "uapp/errors.hpp"

namespace uapp {

RewardWeights::RewardWeights(double egoism, double courtesy, double confidence)
    : w_{egoism, courtesy, confidence} {
  for (double x : w_)
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("reward weights must be finite and >= 0");
  if (std::abs(w_[0] + w_[1] + w_[2] - 1.0) > 1e-9)
    throw InvalidArgument("reward weights must sum to 1");
}

RewardWeights RewardWeights::normalized(std::array<double, 3> raw) {
  double total = 0.0;
  for (double& x : raw) {
    if (!std::isfinite(x)) throw InvalidArgument("reward weights must be finite");
    x = std::max(x, 0.0);
    total += x;
  }
  if (!(total > 0.0)) throw InvalidArgument("reward weights must have positive mass");
  return {raw[0] / total, raw[1] / total, raw[2] / total};
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

std::vector<double> log_softmax(std::span<const double> rewards, double beta) {
  std::vector<double> scaled(rewards.size());
  std::transform(rewards.begin(), rewards.end(), scaled.begin(), [beta](double r) { return beta * r; });
  const double lse = log_sum_exp(scaled);
  for (double& x : scaled) x -= lse;
  return scaled;
}

double kl_divergence(std::span<const double> log_p, std::span<const double> log_q) {
  if (log_p.size() != log_q.size()) throw InvalidArgument("KL divergence over mismatched supports");
  double kl = 0.0;
  for (std::size_t i = 0; i < log_p.size(); ++i) {
    const double p = std::exp(log_p[i]);
    if (p > 0.0) kl += p * (log_p[i] - log_q[i]);
  }
  return std::max(kl, 0.0);
}

namespace {

ResponseDistribution make_distribution(std::span<const double> rewards, double beta,
                                       std::variant<EgoConditioned, Absence> cond) {
  ResponseDistribution dist;
  dist.log_probs = log_softmax(rewards, beta);
  dist.probs.resize(dist.log_probs.size());
  std::transform(dist.log_probs.begin(), dist.log_probs.end(), dist.probs.begin(),
                 [](double lp) { return std::exp(lp); });
  dist.conditioning = cond;
  return dist;
}

void check_label(const JointBehaviorSpace& space, int ego_label) {
  if (ego_label < 0 || static_cast<std::size_t>(ego_label) >= space.ego_count())
    throw UnknownCandidate("unknown ego candidate label " + std::to_string(ego_label));
}

}  // namespace

ResponseDistribution response_distribution(const JointBehaviorSpace& space, int ego_label, double beta) {
  check_label(space, ego_label);
  return make_distribution(space.reward_other.row(static_cast<std::size_t>(ego_label)), beta,
                           EgoConditioned{ego_label});
}

ResponseDistribution absence_distribution(std::span<const double> absence_rewards, double beta) {
  if (absence_rewards.empty()) throw EmptyCandidateSet("absence distribution over no candidates");
  return make_distribution(absence_rewards, beta, Absence{});
}

ResponseDistribution absence_distribution(const std::vector<Candidate>& other_candidates,
                                          const PlanningSetup& setup) {
  std::vector<double> rewards;
  rewards.reserve(other_candidates.size());
  for (const auto& c : other_candidates) rewards.push_back(absence_reward_other(c.trajectory, setup));
  return absence_distribution(rewards, setup.reward.beta);
}

ResponseDistribution absence_distribution(const JointBehaviorSpace& space, double beta) {
  return absence_distribution(space.absence_reward_other, beta);
}

double egoism_reward(const JointBehaviorSpace& space, int ego_label, double beta) {
  const auto dist = response_distribution(space, ego_label, beta);
  const auto row = space.reward_ego.row(static_cast<std::size_t>(ego_label));
  double expected = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) expected += dist.probs[j] * row[j];
  return expected;
}

double courtesy_reward(const JointBehaviorSpace& space, int ego_label, double beta) {
  const auto presence = response_distribution(space, ego_label, beta);
  const auto absence = absence_distribution(space, beta);
  // exp underflows past KL ~ 745; the reward stays strictly positive
  return std::max(std::exp(-kl_divergence(absence.log_probs, presence.log_probs)),
                  std::numeric_limits<double>::min());
}

double confidence(const JointBehaviorSpace& space, int ego_label, double beta) {
  const auto dist = response_distribution(space, ego_label, beta);
  if (dist.probs.size() < 2) return 1.0;
  std::vector<double> p = dist.probs;
  std::partial_sort(p.begin(), p.begin() + 2, p.end(), std::greater<>());
  return std::clamp(p[0] - p[1], 0.0, 1.0);
}

double confidence_reward(const JointBehaviorSpace& space, int ego_label, double beta) {
  return std::exp(confidence(space, ego_label, beta));
}

std::vector<SocialTerms> social_terms(const JointBehaviorSpace& space, double beta) {
  std::vector<SocialTerms> terms(space.ego_count());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const int label = static_cast<int>(i);
    terms[i].egoism_raw = egoism_reward(space, label, beta);
    terms[i].courtesy = courtesy_reward(space, label, beta);
    terms[i].confidence = confidence_reward(space, label, beta);
  }
  const auto [lo, hi] = std::minmax_element(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return a.egoism_raw < b.egoism_raw;
  });
  const double min = lo->egoism_raw;
  const double range = hi->egoism_raw - min;
  for (auto& t : terms) t.egoism = range > 0.0 ? (t.egoism_raw - min) / range : 1.0;
  return terms;
}

std::vector<double> social_rewards(std::span<const SocialTerms> terms, const RewardWeights& lambda) {
  std::vector<double> out(terms.size());
  std::transform(terms.begin(), terms.end(), out.begin(), [&](const SocialTerms& t) { return t.mix(lambda); });
  return out;
}

double social_reward(const JointBehaviorSpace& space, int ego_label, const RewardWeights& lambda,
                     double beta) {
  check_label(space, ego_label);
  const auto terms = social_terms(space, beta);
  return terms[static_cast<std::size_t>(ego_label)].mix(lambda);
}

int argmax(std::span<const double> values) {
  if (values.empty()) throw EmptyCandidateSet("argmax over an empty set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return static_cast<int>(best);
}

}  // namespace uapp
