#include "uapp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "uapp/errors.hpp"

namespace uapp {

namespace {

constexpr double kTimeEps = 1e-9;

std::vector<double> separations(const InteractionTrace& trace) {
  if (trace.joint_states.empty()) throw InvalidArgument("empty interaction trace");
  std::vector<double> out;
  out.reserve(trace.joint_states.size());
  for (const auto& x : trace.joint_states) {
    const Vec2 pe = trace.scene.path_ego.point_at(x.ego.s, x.ego.d);
    const Vec2 po = trace.scene.path_other.point_at(x.other.s, x.other.d);
    out.push_back(distance(pe, po));
  }
  return out;
}

std::vector<PolicyLabel> labels_of(std::span<const RewardWeights> series) {
  std::vector<PolicyLabel> labels;
  labels.reserve(series.size());
  for (const auto& w : series) labels.push_back(dominant(w));
  return labels;
}

}  // namespace

std::string_view to_string(PolicyLabel label) {
  switch (label) {
    case PolicyLabel::kEgoism: return "egoism";
    case PolicyLabel::kCourtesy: return "courtesy";
    case PolicyLabel::kConfidence: return "confidence";
  }
  return "unknown";
}

PolicyLabel dominant(const RewardWeights& lambda) {
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (lambda[i] > lambda[best]) best = i;
  return static_cast<PolicyLabel>(best);
}

double are(const InteractionTrace& trace) {
  const auto d = separations(trace);
  double sum = 0.0;
  for (double v : d) sum += v;
  return sum / static_cast<double>(d.size());
}

double ait(const InteractionTrace& trace) {
  if (!trace.terminated) throw NonTerminating("interaction did not reach the conflict point");
  return static_cast<double>(trace.steps()) * trace.dt;
}

InteractionStats interaction_stats(const InteractionTrace& trace) {
  const auto d = separations(trace);
  InteractionStats st;
  double sum = 0.0;
  for (double v : d) sum += v;
  st.are = sum / static_cast<double>(d.size());
  st.min_distance = *std::min_element(d.begin(), d.end());
  st.ait = ait(trace);
  return st;
}

double trajectory_mse(const Trajectory& generated, const Trajectory& ground_truth, double horizon,
                      const ReferencePath* path) {
  if (!(horizon >= 0.0)) throw InvalidArgument("horizon must be non-negative");
  if (generated.dt <= 0.0 || std::abs(generated.dt - ground_truth.dt) > kTimeEps)
    throw InvalidArgument("trajectories must share a positive dt");
  const double dt = generated.dt;
  const int last = static_cast<int>(std::floor(horizon / dt + kTimeEps));
  if (last > generated.steps() || last > ground_truth.steps() || generated.states.empty() ||
      ground_truth.states.empty())
    throw HorizonExceedsTrace("horizon exceeds trajectory length");
  double sum = 0.0;
  for (int k = 0; k <= last; ++k) {
    const auto& a = generated.states[static_cast<std::size_t>(k)];
    const auto& b = ground_truth.states[static_cast<std::size_t>(k)];
    double e2;
    if (path) {
      const Vec2 d = path->point_at(a.s, a.d) - path->point_at(b.s, b.d);
      e2 = dot(d, d);
    } else {
      e2 = (a.s - b.s) * (a.s - b.s) + (a.d - b.d) * (a.d - b.d);
    }
    sum += e2;
  }
  return sum / static_cast<double>(last + 1);
}

int psf(std::span<const PolicyLabel> labels) {
  if (labels.empty()) throw InvalidArgument("empty lambda series");
  int n = 0;
  for (std::size_t i = 1; i < labels.size(); ++i) n += labels[i] != labels[i - 1];
  return n;
}

int psf(std::span<const RewardWeights> series) {
  const auto labels = labels_of(series);
  return psf(std::span<const PolicyLabel>(labels));
}

std::array<double, 3> dop(std::span<const PolicyLabel> labels) {
  if (labels.empty()) throw InvalidArgument("empty lambda series");
  std::array<double, 3> f{0.0, 0.0, 0.0};
  for (auto l : labels) f[static_cast<std::size_t>(l)] += 1.0;
  for (double& v : f) v /= static_cast<double>(labels.size());
  return f;
}

std::array<double, 3> dop(std::span<const RewardWeights> series) {
  const auto labels = labels_of(series);
  return dop(std::span<const PolicyLabel>(labels));
}

}  // namespace uapp
