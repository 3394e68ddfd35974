#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "uapp/config.hpp"
#include "uapp/errors.hpp"
#include "uapp/io.hpp"

using namespace uapp;

namespace {

const std::string kSource = UAPP_SOURCE_DIR;

std::vector<Track> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_tracks(in);
}

std::size_t parse_error_row(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.row();
  }
  return 0;
}

ScenarioConfig fixture_config() { return load_config(kSource + "/configs/fixture.json"); }

}  // namespace

TEST_CASE("load_tracks examples") {
  CHECK(parse(std::string(kTrackHeader) + "\n").empty());
  const auto two = load_tracks(kSource + "/tests/data/two_rows.csv");
  REQUIRE(two.size() == 1u);
  CHECK(two[0].id == 7);
  CHECK(two[0].records.size() == 2u);
  CHECK(two[0].records[0].speed() == doctest::Approx(5.0));

  const std::string h = std::string(kTrackHeader) + "\n";
  CHECK(parse_error_row(h + "1,5,500,0,0,0,0\n1,4,400,0,0,0,0\n") == 3);
  CHECK(parse_error_row(h + "1,5,500,0,0,0,0\n2,1,100,0,0,0,0\n1,5,500,0,0,0,0\n") == 4);
  CHECK(parse_error_row(h + "1,5,500,0,0,0\n") == 2);
  CHECK(parse_error_row(h + "1,5,500,abc,0,0,0\n") == 2);
  CHECK(parse_error_row(h + "1,5,500,0,0,0,0\n\n1,6,600,0,0,0,0\n") == 3);
  CHECK(parse_error_row(h + "1,5,500,nan,0,0,0\n") == 2);
  // timestamps must follow a constant frame period
  CHECK(parse_error_row(h + "1,1,100,0,0,0,0\n1,2,200,0,0,0,0\n1,3,350,0,0,0,0\n") == 4);
  CHECK_THROWS_AS(load_tracks(kSource + "/tests/data/does_not_exist.csv"), IoError);
}

TEST_CASE("tracks are grouped and sorted") {
  const auto t = parse(std::string(kTrackHeader) + "\r\n9,1,100,0,0,1,0\r\n3,1,100,5,5,0,1\r\n9,2,200,0.1,0,1,0\r\n");
  REQUIRE(t.size() == 2u);
  CHECK(t[0].id == 3);
  CHECK(t[1].records.size() == 2u);
}

TEST_CASE("mutated headers are rejected") {
  const std::string row = "\n1,0,0,0.0,0.0,0.0,0.0\n";
  const std::string corrupt[] = {
      "",
      "track_id,frame_id,timestamp_ms,x,y,vx",
      "track_id,frame_id,timestamp_ms,x,y,vx,vy,vz",
      "frame_id,track_id,timestamp_ms,x,y,vx,vy",
      "Track_id,frame_id,timestamp_ms,x,y,vx,vy",
      "track_ib,frame_id,timestamp_ms,x,y,vx,vy",
      " track_id,frame_id,timestamp_ms,x,y,vx,vy",
      "track_id,frame_id,timestamp_ms,x,y,vx,vy ",
      "track_id;frame_id;timestamp_ms;x;y;vx;vy",
      "track_id\tframe_id\ttimestamp_ms\tx\ty\tvx\tvy",
      "track_id,track_id,timestamp_ms,x,y,vx,vy",
      "track_id,frame_id,timestamp_ms,x,y,vx,vy,",
      "\"track_id\",\"frame_id\",\"timestamp_ms\",\"x\",\"y\",\"vx\",\"vy\"",
      "\xEF\xBB\xBFtrack_id,frame_id,timestamp_ms,x,y,vx,vy",
      "track_id,frame_id,timestamp,x,y,vx,vy",
      "track_id,frame_id,timestamp_ms,y,x,vx,vy",
      "1,0,0,0.0,0.0,0.0,0.0",
      "track_id,frame,timestamp_ms,x,y,vx,vy",
      "track_id, frame_id, timestamp_ms, x, y, vx, vy",
      "TRACK_ID,FRAME_ID,TIMESTAMP_MS,X,Y,VX,VY",
  };
  static_assert(std::size(corrupt) == 20);
  for (const auto& h : corrupt) CHECK_THROWS_AS(parse(h + row), SchemaError);
  CHECK_THROWS_AS(parse(""), SchemaError);
}

TEST_CASE("path csv") {
  std::istringstream in("x,y\n0,0\n3.5,-1\n");
  const auto pts = parse_path_points(in);
  REQUIRE(pts.size() == 2u);
  CHECK(pts[1].y == -1.0);
  std::istringstream bad("x,y,z\n0,0,0\n");
  CHECK_THROWS_AS(parse_path_points(bad), SchemaError);
  std::istringstream short_row("x,y\n0\n");
  CHECK_THROWS_AS(parse_path_points(short_row), ParseError);
  std::ostringstream out;
  write_path_points(out, pts);
  CHECK(out.str() == "x,y\n0.000000,0.000000\n3.500000,-1.000000\n");
}

TEST_CASE("fixed formatting") {
  CHECK(format_fixed(1.0 / 3) == "0.333333");
  CHECK(format_fixed(-0.0) == "0.000000");
  CHECK(format_fixed(-1e-9) == "0.000000");
  CHECK(format_fixed(-2.5) == "-2.500000");
}

TEST_CASE("extract_pairs on non-intersecting paths") {
  const ReferencePath a({{0, 0}, {100, 0}}, 10.0), b({{0, 10}, {100, 10}}, 10.0);
  std::vector<Track> tracks(2);
  for (int id = 1; id <= 2; ++id) {
    tracks[id - 1].id = id;
    for (int k = 0; k < 20; ++k)
      tracks[id - 1].records.push_back({id, k, 100 * k, 5.0 * k / 10, id == 1 ? 0.0 : 10.0, 5, 0});
  }
  const ReferencePath ea[] = {a}, eb[] = {b};
  CHECK(extract_pairs(tracks, ea, eb, 5.0).empty());
}

TEST_CASE("a track never pairs with itself") {
  // two nearly coincident paths that cross at a shallow angle
  const ReferencePath a({{-50, 0}, {50, 0}}, 10.0), b({{-50, 1}, {50, -1}}, 10.0);
  Track t;
  t.id = 4;
  for (int k = 0; k < 80; ++k) t.records.push_back({4, k, 100 * k, -40.0 + k, 0.0, 10, 0});
  const ReferencePath ea[] = {a}, eb[] = {b};
  CHECK(extract_pairs(std::span<const Track>(&t, 1), ea, eb, 5.0).empty());
}

TEST_CASE("fixture round trip") {
  const auto cfg = fixture_config();
  const auto fx = make_fixture(cfg, cfg.fixture, 5);
  std::ostringstream out;
  write_tracks(out, fx.tracks);
  const auto tracks = parse(out.str());
  REQUIRE(tracks.size() == 2u);
  const ReferencePath ea[] = {cfg.path_ego}, eb[] = {cfg.path_other};
  const auto pairs = extract_pairs(tracks, ea, eb, cfg.conflict_window);
  REQUIRE(pairs.size() == 1u);
  CHECK(pairs[0].ego_track == kFixtureEgoTrack);
  CHECK(pairs[0].other_track == kFixtureOtherTrack);
  const auto e = observe_on_path(tracks[0], cfg.path_ego, pairs[0].start_ms, pairs[0].end_ms, cfg.sampler.dt);
  const auto o = observe_on_path(tracks[1], cfg.path_other, pairs[0].start_ms, pairs[0].end_ms, cfg.sampler.dt);
  REQUIRE(e.states.size() == fx.trace.joint_states.size());
  for (std::size_t k = 0; k < e.states.size(); ++k) {
    const auto& x = fx.trace.joint_states[k];
    CHECK(distance(cfg.path_ego.point_at(e.states[k].s, e.states[k].d), cfg.path_ego.point_at(x.ego.s, x.ego.d)) < 1e-6);
    CHECK(distance(cfg.path_other.point_at(o.states[k].s, o.states[k].d),
                   cfg.path_other.point_at(x.other.s, x.other.d)) < 1e-6);
    CHECK(std::abs(e.states[k].v - x.ego.v) < 1e-5);
  }
}

TEST_CASE("resampling interpolates between frames") {
  const ReferencePath path({{0, 0}, {100, 0}}, 10.0);
  Track t;
  t.id = 1;
  for (int k = 0; k < 5; ++k) t.records.push_back({1, k, 100 * k, 2.0 * k, 0.0, 20.0, 0.0});
  const auto o = observe_on_path(t, path, 0, 400, 0.05);
  REQUIRE(o.states.size() == 9u);
  CHECK(o.states[3].s == doctest::Approx(3.0));
  CHECK(o.states[8].s == doctest::Approx(8.0));
  CHECK_THROWS_AS(observe_on_path(t, path, 0, 500, 0.05), ShortTrack);
}

TEST_CASE("fixtures are deterministic and need a conflict") {
  auto cfg = fixture_config();
  auto text = [&](std::uint64_t seed) {
    std::ostringstream s;
    write_tracks(s, make_fixture(cfg, cfg.fixture, seed).tracks);
    return s.str();
  };
  CHECK(text(3) == text(3));
  CHECK(text(3) != text(4));

  ScenarioConfig parallel(ReferencePath({{0, 0}, {100, 0}}, 10.0), ReferencePath({{0, 5}, {100, 5}}, 10.0));
  parallel.initial = JointState{{10, 5, 0}, {10, 5, 0}, 0};
  CHECK_THROWS_AS(make_fixture(parallel, FixtureSpec{}, 0), NoConflict);
}

TEST_CASE("trace csv layout") {
  const auto cfg = fixture_config();
  const auto fx = make_fixture(cfg, cfg.fixture, 0);
  std::ostringstream out;
  write_trace_csv(out, fx.trace);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,s_ego,v_ego,s_other,v_other,a_ego,a_other,dist_conflict_ego,dist_conflict_other");
  std::getline(in, line);
  CHECK(line.rfind("0.000000,", 0) == 0);
}

TEST_CASE("config parsing") {
  const auto cfg = fixture_config();
  CHECK(cfg.sampler.dt == 0.1);
  CHECK(cfg.sampler.horizon_steps == 30);
  CHECK(cfg.inference.n_particles == 100);
  CHECK(cfg.policies.size() == 3u);
  CHECK(cfg.initial.has_value());

  const std::string base = R"({"schema_version": 1, "paths": {"ego": {"points": [[0,-10],[0,10]], "speed_limit": 10},
                               "other": {"points": [[-10,0],[10,0]], "speed_limit": 10}})";
  CHECK_NOTHROW(parse_config(base + "}", "."));
  CHECK_THROWS_AS(parse_config(base + R"(, "bogus": 1})", "."), ConfigError);
  CHECK_THROWS_AS(parse_config(base + R"(, "sampler": {"dt": -1}})", "."), ConfigError);
  CHECK_THROWS_AS(parse_config(base + R"(, "inference": {"prior": {"type": "beta"}}})", "."), ConfigError);
  CHECK_THROWS_AS(parse_config(base + R"(, "fixture": {"lambda": [0.5, 0.5, 0.5]}})", "."), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 2})", "."), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json", "."), ConfigError);
  CHECK_THROWS_AS(load_config(kSource + "/configs/missing.json"), IoError);

  const auto p = parse_config(base + R"(, "inference": {"prior": {"type": "dop", "fractions": [0.27, 0.49, 0.23]},
                                         "window_mode": "growing"},
                                        "policies": [{"name": "sw", "lambda": [1,0,0], "after": [0,0,1], "switch_step": 4}]})",
                              ".");
  CHECK(std::holds_alternative<DopPrior>(p.inference.prior));
  CHECK(p.inference.window_mode == WindowMode::kGrowing);
  REQUIRE(p.policies.size() == 1u);
  CHECK(std::holds_alternative<SwitchingPolicy>(p.policies[0].policy));
}

TEST_CASE("config paths may come from csv files") {
  const auto dir = std::filesystem::temp_directory_path() / "uapp_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "p.csv") << "x,y\n0,-10\n0,10\n";
  const auto cfg = parse_config(R"({"schema_version": 1, "paths": {"ego": {"csv": "p.csv", "speed_limit": 8},
                                    "other": {"points": [[-10,0],[10,0]], "speed_limit": 10}}})",
                                dir);
  CHECK(cfg.path_ego.speed_limit() == 8.0);
  CHECK(cfg.path_ego.length() == doctest::Approx(20.0));
  std::filesystem::remove_all(dir);
}
