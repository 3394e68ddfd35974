#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uapp/inference.hpp"
#include "uapp/planner.hpp"

namespace uapp {

/// Fixed 6-decimal rendering used by every output file. Negative zero is
/// printed as zero.
std::string format_fixed(double value);

// ---- tracks -------------------------------------------------------------

inline constexpr const char* kTrackHeader = "track_id,frame_id,timestamp_ms,x,y,vx,vy";
inline constexpr const char* kPathHeader = "x,y";
inline constexpr const char* kLambdaHeader =
    "frame,agent_id,lambda_egoism,lambda_courtesy,lambda_confidence,dominant_policy";

struct TrackRecord {
  int track_id = 0;
  std::int64_t frame = 0;
  std::int64_t timestamp_ms = 0;
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  double speed() const;
};

struct Track {
  int id = 0;
  std::vector<TrackRecord> records;  // strictly increasing frames
};

/// Tracks sorted by id. Throws SchemaError on a header mismatch and
/// ParseError (with the 1-based line number) on malformed or out-of-order rows.
std::vector<Track> parse_tracks(std::istream& in);
std::vector<Track> load_tracks(const std::filesystem::path& file);
void write_tracks(std::ostream& out, std::span<const Track> tracks);

std::vector<Vec2> parse_path_points(std::istream& in);
std::vector<Vec2> load_path_points(const std::filesystem::path& file);
void write_path_points(std::ostream& out, std::span<const Vec2> points);

// ---- pairs and observations ----------------------------------------------

inline constexpr double kMaxLateralOffset = 3.0;

struct InteractionPair {
  int ego_track = 0;
  int other_track = 0;
  std::size_t ego_path = 0;    // index into the ego-role paths
  std::size_t other_path = 0;  // index into the other-role paths
  std::int64_t first_frame = 0;
  std::int64_t last_frame = 0;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
};

/// Pairs of distinct tracks that follow an ego-role and an other-role path
/// with a common conflict point and cross it within `conflict_window`
/// seconds of each other. A track that ends before its crossing counts with
/// its earliest feasible crossing time. The overlap ends at the first frame where either
/// car reached the conflict point. Sorted by (ego_track, other_track).
std::vector<InteractionPair> extract_pairs(std::span<const Track> tracks,
                                           std::span<const ReferencePath> ego_paths,
                                           std::span<const ReferencePath> other_paths,
                                           double conflict_window);

/// Path-frame states of a track between two timestamps, linearly
/// interpolated at the planner dt. Speed is the (vx, vy) magnitude.
Trajectory observe_on_path(const Track& track, const ReferencePath& path, std::int64_t start_ms,
                           std::int64_t end_ms, double dt);

// ---- output tables --------------------------------------------------------

void write_trace_csv(std::ostream& out, const InteractionTrace& trace);
/// Rows only; callers write kLambdaHeader once per file.
void write_lambda_csv(std::ostream& out, const LambdaSeries& series, int agent_id);

void write_text_file(const std::filesystem::path& file, const std::string& content);

}  // namespace uapp
