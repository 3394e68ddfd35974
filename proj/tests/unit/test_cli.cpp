#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = UAPP_CLI_PATH;
const std::string kSource = UAPP_SOURCE_DIR;

int run(const std::string& args, const fs::path& capture) {
  const std::string cmd = "\"" + kCli + "\" " + args + " > \"" + capture.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cli exit codes") {
  TempDir dir("uapp_cli_codes");
  const auto log = dir.path / "log.txt";
  CHECK(run("sim --config " + (dir.path / "none.json").string() + " --out " + dir.path.string(), log) == 2);
  CHECK(run("sim --bogus-flag", log) == 1);
  CHECK(run("--help", log) == 0);

  CHECK(run("--json-errors infer --config " + (dir.path / "none.json").string() + " --out " + dir.path.string(),
            log) == 2);
  const auto text = slurp(log);
  const auto doc = nlohmann::json::parse(text.substr(text.find('{')));
  CHECK(doc["error"]["kind"] == "IoError");
  CHECK(doc["error"]["exit_code"] == 2);
}

TEST_CASE("cli reports row of malformed tracks") {
  TempDir dir("uapp_cli_rows");
  auto cfg = nlohmann::json::parse(slurp(kSource + "/configs/case1.json"));
  cfg["tracks"] = "tracks.csv";
  std::ofstream(dir.path / "scenario.json") << cfg.dump();
  std::ofstream(dir.path / "tracks.csv") << "track_id,frame_id,timestamp_ms,x,y,vx,vy\n1,0,0,0,0,0,0\n1,x,100,0,0,0,0\n";
  const auto log = dir.path / "log.txt";
  CHECK(run("--json-errors infer --config " + (dir.path / "scenario.json").string() + " --out " +
                (dir.path / "out").string(),
            log) == 2);
  const auto text = slurp(log);
  const auto doc = nlohmann::json::parse(text.substr(text.find('{')));
  CHECK(doc["error"]["kind"] == "ParseError");
  CHECK(doc["error"]["row"] == 3);
}

TEST_CASE("cli fixture then infer recovers courtesy") {
  TempDir dir("uapp_cli_infer");
  const auto log = dir.path / "log.txt";
  const auto fx = dir.path / "fx";
  REQUIRE(run("fixture --config " + kSource + "/configs/fixture.json --out " + fx.string() +
                  " --lambda 0,1,0 --seed 1",
              log) == 0);
  REQUIRE(run("infer --config " + (fx / "scenario.json").string() + " --out " + (dir.path / "inf").string(), log) ==
          0);
  const auto doc = nlohmann::json::parse(slurp(dir.path / "inf" / "infer.json"));
  REQUIRE(doc["pairs"].size() == 1u);
  const auto& ego = doc["pairs"][0]["agents"][0];
  CHECK(ego["dominant"] == "courtesy");
  CHECK(ego["dop"]["courtesy"].get<double>() > 0.5);
}

TEST_CASE("cli sim writes traces, sidecars and orderings") {
  TempDir dir("uapp_cli_sim");
  REQUIRE(run("sim --config " + kSource + "/configs/case1.json --out " + dir.path.string(), dir.path / "log.txt") ==
          0);
  for (const char* p : {"egoism", "courtesy", "confidence"}) {
    CHECK(fs::exists(dir.path / ("trace_" + std::string(p) + ".csv")));
    const auto side = nlohmann::json::parse(slurp(dir.path / ("trace_" + std::string(p) + ".json")));
    CHECK(side["lambda_ego"].size() == side["steps"].get<std::size_t>());
  }
  const auto stats = nlohmann::json::parse(slurp(dir.path / "stats.json"));
  CHECK(stats["orderings"]["are_courtesy_egoism_confidence"] == true);
  CHECK(stats["orderings"]["ait_confidence_egoism_courtesy"] == true);
  CHECK(run("sim --config " + kSource + "/configs/case1.json --out " + dir.path.string() + " --policy nobody",
            dir.path / "log.txt") == 2);
}
