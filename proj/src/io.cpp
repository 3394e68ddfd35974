#include "uapp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "uapp/errors.hpp"
#include "uapp/metrics.hpp"

namespace uapp {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
T parse_number(std::string_view field, std::size_t row, const char* column) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last)
    throw ParseError(row, std::string("invalid ") + column + " '" + std::string(field) + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ParseError(row, std::string("non-finite ") + column);
  }
  return value;
}

// getline without the trailing carriage return of CRLF files
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void expect_header(std::istream& in, const char* expected) {
  std::string line;
  if (!next_line(in, line)) throw SchemaError(std::string("missing header, expected '") + expected + "'");
  if (line != expected)
    throw SchemaError("header mismatch: got '" + line + "', expected '" + expected + "'");
}

std::ifstream open_input(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  return in;
}

struct Projected {
  std::int64_t t_ms;
  std::int64_t frame;
  double s;
  double d;
  double v;
};

std::vector<Projected> project_track(const Track& track, const ReferencePath& path) {
  std::vector<Projected> out;
  out.reserve(track.records.size());
  for (const auto& r : track.records) {
    const auto p = project_to_path({r.x, r.y}, path);
    out.push_back({r.timestamp_ms, r.frame, p.s, p.d, r.speed()});
  }
  return out;
}

// Time at which the track reaches arclength sc. When the recording ends
// first, the earliest feasible crossing is used: the remaining distance at
// the larger of the last speed and the speed limit.
std::optional<double> crossing_time_ms(const std::vector<Projected>& p, double sc, double speed_limit) {
  if (p.empty() || p.front().s >= sc) return std::nullopt;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i].s >= sc) {
      const double f = (sc - p[i - 1].s) / (p[i].s - p[i - 1].s);
      return static_cast<double>(p[i - 1].t_ms) + f * static_cast<double>(p[i].t_ms - p[i - 1].t_ms);
    }
  }
  const auto& last = p.back();
  return static_cast<double>(last.t_ms) + 1000.0 * (sc - last.s) / std::max(last.v, speed_limit);
}

std::optional<std::int64_t> first_reach_ms(const std::vector<Projected>& p, double sc) {
  for (const auto& x : p)
    if (x.s >= sc) return x.t_ms;
  return std::nullopt;
}

}  // namespace

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

double TrackRecord::speed() const { return std::hypot(vx, vy); }

std::vector<Track> parse_tracks(std::istream& in) {
  expect_header(in, kTrackHeader);
  std::map<int, Track> by_id;
  std::map<int, double> period;  // ms per frame, fixed by the first two records
  std::string line;
  std::size_t row = 1;
  while (next_line(in, line)) {
    ++row;
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw ParseError(row, "empty row");
    }
    const auto f = split_fields(line);
    if (f.size() != 7) throw ParseError(row, "expected 7 fields, got " + std::to_string(f.size()));
    TrackRecord r;
    r.track_id = parse_number<int>(f[0], row, "track_id");
    r.frame = parse_number<std::int64_t>(f[1], row, "frame_id");
    r.timestamp_ms = parse_number<std::int64_t>(f[2], row, "timestamp_ms");
    r.x = parse_number<double>(f[3], row, "x");
    r.y = parse_number<double>(f[4], row, "y");
    r.vx = parse_number<double>(f[5], row, "vx");
    r.vy = parse_number<double>(f[6], row, "vy");
    auto& track = by_id[r.track_id];
    track.id = r.track_id;
    if (!track.records.empty()) {
      const auto& prev = track.records.back();
      if (r.frame <= prev.frame)
        throw ParseError(row, "frame " + std::to_string(r.frame) + " of track " + std::to_string(r.track_id) +
                                  " does not follow frame " + std::to_string(prev.frame));
      const double dt = static_cast<double>(r.timestamp_ms - prev.timestamp_ms);
      const double df = static_cast<double>(r.frame - prev.frame);
      auto it = period.find(r.track_id);
      if (it == period.end()) {
        if (dt <= 0.0) throw ParseError(row, "timestamp does not increase");
        period.emplace(r.track_id, dt / df);
      } else if (std::abs(dt - it->second * df) > 1.0 + 1e-9) {
        throw ParseError(row, "timestamp inconsistent with the frame period of track " +
                                  std::to_string(r.track_id));
      }
    }
    track.records.push_back(r);
  }
  std::vector<Track> out;
  out.reserve(by_id.size());
  for (auto& [id, t] : by_id) out.push_back(std::move(t));
  return out;
}

std::vector<Track> load_tracks(const std::filesystem::path& file) {
  auto in = open_input(file);
  return parse_tracks(in);
}

void write_tracks(std::ostream& out, std::span<const Track> tracks) {
  out << kTrackHeader << '\n';
  for (const auto& t : tracks)
    for (const auto& r : t.records)
      out << r.track_id << ',' << r.frame << ',' << r.timestamp_ms << ',' << format_fixed(r.x) << ','
          << format_fixed(r.y) << ',' << format_fixed(r.vx) << ',' << format_fixed(r.vy) << '\n';
}

std::vector<Vec2> parse_path_points(std::istream& in) {
  expect_header(in, kPathHeader);
  std::vector<Vec2> pts;
  std::string line;
  std::size_t row = 1;
  while (next_line(in, line)) {
    ++row;
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw ParseError(row, "empty row");
    }
    const auto f = split_fields(line);
    if (f.size() != 2) throw ParseError(row, "expected 2 fields, got " + std::to_string(f.size()));
    pts.push_back({parse_number<double>(f[0], row, "x"), parse_number<double>(f[1], row, "y")});
  }
  return pts;
}

std::vector<Vec2> load_path_points(const std::filesystem::path& file) {
  auto in = open_input(file);
  return parse_path_points(in);
}

void write_path_points(std::ostream& out, std::span<const Vec2> points) {
  out << kPathHeader << '\n';
  for (const auto& p : points) out << format_fixed(p.x) << ',' << format_fixed(p.y) << '\n';
}

std::vector<InteractionPair> extract_pairs(std::span<const Track> tracks,
                                           std::span<const ReferencePath> ego_paths,
                                           std::span<const ReferencePath> other_paths,
                                           double conflict_window) {
  if (ego_paths.empty() || other_paths.empty())
    throw InvalidArgument("extract_pairs needs at least one path per role");
  const double window_ms = conflict_window * 1000.0;
  std::vector<InteractionPair> pairs;
  for (std::size_t i = 0; i < ego_paths.size(); ++i) {
    for (std::size_t j = 0; j < other_paths.size(); ++j) {
      ConflictPoint cp;
      try {
        cp = find_conflict_point(ego_paths[i], other_paths[j]);
      } catch (const NoConflict&) {
        continue;
      }
      std::vector<std::vector<Projected>> on_ego, on_other;
      for (const auto& t : tracks) {
        on_ego.push_back(project_track(t, ego_paths[i]));
        on_other.push_back(project_track(t, other_paths[j]));
      }
      for (std::size_t a = 0; a < tracks.size(); ++a) {
        for (std::size_t b = 0; b < tracks.size(); ++b) {
          if (a == b || tracks[a].records.empty() || tracks[b].records.empty()) continue;
          const auto& pa = on_ego[a];
          const auto& pb = on_other[b];
          const auto ta = crossing_time_ms(pa, cp.s_ego, ego_paths[i].speed_limit());
          const auto tb = crossing_time_ms(pb, cp.s_other, other_paths[j].speed_limit());
          if (!ta || !tb || std::abs(*ta - *tb) > window_ms) continue;
          std::int64_t start = std::max(pa.front().t_ms, pb.front().t_ms);
          std::int64_t end = std::min(pa.back().t_ms, pb.back().t_ms);
          if (auto r = first_reach_ms(pa, cp.s_ego)) end = std::min(end, *r);
          if (auto r = first_reach_ms(pb, cp.s_other)) end = std::min(end, *r);
          if (end <= start) continue;
          auto on_path = [&](const std::vector<Projected>& p) {
            for (const auto& x : p)
              if (x.t_ms >= start && x.t_ms <= end && std::abs(x.d) >= kMaxLateralOffset) return false;
            return true;
          };
          if (!on_path(pa) || !on_path(pb)) continue;
          const bool seen = std::any_of(pairs.begin(), pairs.end(), [&](const InteractionPair& q) {
            return q.ego_track == tracks[a].id && q.other_track == tracks[b].id;
          });
          if (seen) continue;
          InteractionPair pair;
          pair.ego_track = tracks[a].id;
          pair.other_track = tracks[b].id;
          pair.ego_path = i;
          pair.other_path = j;
          pair.start_ms = start;
          pair.end_ms = end;
          for (const auto& x : pa) {
            if (x.t_ms <= start) pair.first_frame = x.frame;
            if (x.t_ms <= end) pair.last_frame = x.frame;
          }
          pairs.push_back(pair);
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const InteractionPair& x, const InteractionPair& y) {
    return std::pair(x.ego_track, x.other_track) < std::pair(y.ego_track, y.other_track);
  });
  return pairs;
}

Trajectory observe_on_path(const Track& track, const ReferencePath& path, std::int64_t start_ms,
                           std::int64_t end_ms, double dt) {
  if (dt <= 0.0) throw InvalidArgument("dt must be positive");
  const auto p = project_track(track, path);
  if (p.empty() || start_ms < p.front().t_ms || end_ms > p.back().t_ms || end_ms < start_ms)
    throw ShortTrack("track " + std::to_string(track.id) + " does not cover the requested interval");
  const double step_ms = dt * 1000.0;
  const auto n = static_cast<std::size_t>(std::floor(static_cast<double>(end_ms - start_ms) / step_ms + 1e-9));
  Trajectory out;
  out.dt = dt;
  std::size_t j = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(start_ms) + static_cast<double>(k) * step_ms;
    while (j + 1 < p.size() && static_cast<double>(p[j + 1].t_ms) < t) ++j;
    AgentState st;
    if (j + 1 >= p.size() || static_cast<double>(p[j].t_ms) >= t) {
      st = {p[j].s, p[j].v, p[j].d};
    } else {
      const auto& a = p[j];
      const auto& b = p[j + 1];
      const double f = (t - static_cast<double>(a.t_ms)) / static_cast<double>(b.t_ms - a.t_ms);
      st = {a.s + f * (b.s - a.s), a.v + f * (b.v - a.v), a.d + f * (b.d - a.d)};
    }
    out.states.push_back(st);
  }
  for (std::size_t k = 0; k + 1 < out.states.size(); ++k)
    out.controls.push_back({(out.states[k + 1].v - out.states[k].v) / dt});
  return out;
}

void write_trace_csv(std::ostream& out, const InteractionTrace& trace) {
  out << "t,s_ego,v_ego,s_other,v_other,a_ego,a_other,dist_conflict_ego,dist_conflict_other\n";
  const auto& cp = trace.scene.conflict;
  for (std::size_t k = 0; k < trace.joint_states.size(); ++k) {
    const auto& x = trace.joint_states[k];
    const double ae = k < trace.controls_ego.size() ? trace.controls_ego[k].a : 0.0;
    const double ao = k < trace.controls_other.size() ? trace.controls_other[k].a : 0.0;
    out << format_fixed(x.t * trace.dt) << ',' << format_fixed(x.ego.s) << ',' << format_fixed(x.ego.v) << ','
        << format_fixed(x.other.s) << ',' << format_fixed(x.other.v) << ',' << format_fixed(ae) << ','
        << format_fixed(ao) << ',' << format_fixed(cp.s_ego - x.ego.s) << ','
        << format_fixed(cp.s_other - x.other.s) << '\n';
  }
}

void write_lambda_csv(std::ostream& out, const LambdaSeries& series, int agent_id) {
  for (std::size_t i = 0; i < series.frames.size(); ++i) {
    const auto& w = series.estimates[i];
    out << series.frames[i] << ',' << agent_id << ',' << format_fixed(w.egoism()) << ','
        << format_fixed(w.courtesy()) << ',' << format_fixed(w.confidence()) << ',' << to_string(dominant(w))
        << '\n';
  }
}

void write_text_file(const std::filesystem::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + file.string());
  out << content;
  if (!out) throw IoError("failed writing " + file.string());
}

}  // namespace uapp
