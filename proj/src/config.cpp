#include "uapp/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>

#include <json.hpp>

#include "uapp/errors.hpp"

namespace uapp {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || item.key() == k;
    if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing '" + std::string(key) + "' in " + where);
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + " must be finite");
  return x;
}

std::array<double, 3> triple(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(where + " must be an array of 3 numbers");
  return {number(v[0], where), number(v[1], where), number(v[2], where)};
}

RewardWeights weights(const json& v, const std::string& where) {
  const auto w = triple(v, where);
  try {
    return RewardWeights(w[0], w[1], w[2]);
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

ReferencePath parse_path(const json& v, const std::filesystem::path& base, const std::string& where) {
  check_keys(v, {"points", "csv", "speed_limit"}, where);
  const double limit = number(require(v, "speed_limit", where), where + ".speed_limit");
  std::vector<Vec2> pts;
  if (v.contains("points") == v.contains("csv"))
    throw ConfigError(where + " needs exactly one of 'points' or 'csv'");
  if (v.contains("points")) {
    const auto& arr = v.at("points");
    if (!arr.is_array()) throw ConfigError(where + ".points must be an array");
    for (const auto& p : arr) {
      if (!p.is_array() || p.size() != 2) throw ConfigError(where + ".points entries must be [x, y]");
      pts.push_back({number(p[0], where + ".points"), number(p[1], where + ".points")});
    }
  } else {
    if (!v.at("csv").is_string()) throw ConfigError(where + ".csv must be a string");
    pts = load_path_points(base / v.at("csv").get<std::string>());
  }
  try {
    return ReferencePath(std::move(pts), limit);
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

AgentState parse_agent(const json& v, const std::string& where) {
  check_keys(v, {"s", "v", "d"}, where);
  AgentState a;
  a.s = number(require(v, "s", where), where + ".s");
  a.v = number(require(v, "v", where), where + ".v");
  if (v.contains("d")) a.d = number(v.at("d"), where + ".d");
  if (a.v < 0.0) throw ConfigError(where + ".v must be >= 0");
  return a;
}

SamplerConfig parse_sampler(const json& v) {
  check_keys(v, {"horizon_steps", "dt", "terminal_speed_fractions", "accel_min", "accel_max", "allow_singleton"},
             "sampler");
  SamplerConfig s;
  if (v.contains("horizon_steps")) s.horizon_steps = v.at("horizon_steps").get<int>();
  if (v.contains("dt")) s.dt = number(v.at("dt"), "sampler.dt");
  if (v.contains("terminal_speed_fractions"))
    s.terminal_speed_fractions = v.at("terminal_speed_fractions").get<std::vector<double>>();
  if (v.contains("accel_min")) s.accel_min = number(v.at("accel_min"), "sampler.accel_min");
  if (v.contains("accel_max")) s.accel_max = number(v.at("accel_max"), "sampler.accel_max");
  if (v.contains("allow_singleton")) s.allow_singleton = v.at("allow_singleton").get<bool>();
  s.validate();
  return s;
}

RewardConfig parse_reward(const json& v) {
  check_keys(v, {"theta_ego", "theta_other", "beta", "scales"}, "reward");
  RewardConfig r;
  if (v.contains("theta_ego")) r.theta_ego.theta = triple(v.at("theta_ego"), "reward.theta_ego");
  if (v.contains("theta_other")) r.theta_other.theta = triple(v.at("theta_other"), "reward.theta_other");
  if (v.contains("beta")) r.beta = number(v.at("beta"), "reward.beta");
  if (v.contains("scales")) {
    const auto& s = v.at("scales");
    check_keys(s, {"lateral", "accel", "jerk", "distance", "conflict"}, "reward.scales");
    if (s.contains("lateral")) r.scales.lateral = number(s.at("lateral"), "reward.scales.lateral");
    if (s.contains("accel")) r.scales.accel = number(s.at("accel"), "reward.scales.accel");
    if (s.contains("jerk")) r.scales.jerk = number(s.at("jerk"), "reward.scales.jerk");
    if (s.contains("distance")) r.scales.distance = number(s.at("distance"), "reward.scales.distance");
    if (s.contains("conflict")) r.scales.conflict = number(s.at("conflict"), "reward.scales.conflict");
  }
  try {
    r.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("reward: ") + e.what());
  }
  return r;
}

InferenceConfig parse_inference(const json& v) {
  check_keys(v, {"n_particles", "window_r", "prior", "window_mode", "resample"}, "inference");
  InferenceConfig c;
  if (v.contains("n_particles")) c.n_particles = v.at("n_particles").get<int>();
  if (v.contains("window_r")) c.window_r = v.at("window_r").get<int>();
  if (v.contains("resample")) c.resample = v.at("resample").get<bool>();
  if (v.contains("window_mode")) {
    const auto m = v.at("window_mode").get<std::string>();
    if (m == "sliding") c.window_mode = WindowMode::kSliding;
    else if (m == "growing") c.window_mode = WindowMode::kGrowing;
    else throw ConfigError("inference.window_mode must be 'sliding' or 'growing'");
  }
  if (v.contains("prior")) {
    const auto& p = v.at("prior");
    check_keys(p, {"type", "alpha", "fractions"}, "inference.prior");
    const auto type = require(p, "type", "inference.prior").get<std::string>();
    if (type == "uniform") {
      c.prior = UniformPrior{};
    } else if (type == "dirichlet") {
      c.prior = DirichletPrior{triple(require(p, "alpha", "inference.prior"), "inference.prior.alpha")};
    } else if (type == "dop") {
      c.prior = DopPrior{triple(require(p, "fractions", "inference.prior"), "inference.prior.fractions")};
    } else {
      throw ConfigError("inference.prior.type must be uniform, dirichlet or dop");
    }
  }
  c.validate();
  return c;
}

NamedPolicy parse_policy(const json& v, std::size_t i) {
  const std::string where = "policies[" + std::to_string(i) + "]";
  check_keys(v, {"name", "lambda", "after", "switch_step"}, where);
  const auto name = require(v, "name", where).get<std::string>();
  if (name.empty()) throw ConfigError(where + ".name is empty");
  for (char ch : name)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-')
      throw ConfigError(where + ".name may only contain letters, digits, '_' and '-'");
  const auto lambda = weights(require(v, "lambda", where), where + ".lambda");
  if (v.contains("after")) {
    const int step = require(v, "switch_step", where).get<int>();
    if (step < 0) throw ConfigError(where + ".switch_step must be >= 0");
    return {name, SwitchingPolicy{lambda, weights(v.at("after"), where + ".after"), step}};
  }
  return {name, FixedPolicy{lambda}};
}

FixtureSpec parse_fixture(const json& v) {
  check_keys(v, {"lambda", "after", "switch_step", "jitter"}, "fixture");
  FixtureSpec f;
  if (v.contains("lambda")) f.lambda = weights(v.at("lambda"), "fixture.lambda");
  if (v.contains("after")) f.after = weights(v.at("after"), "fixture.after");
  if (v.contains("switch_step")) {
    const auto& s = v.at("switch_step");
    if (s.is_string() && s.get<std::string>() == "midpoint") f.switch_step = -1;
    else if (s.is_number_integer() && s.get<int>() >= 0) f.switch_step = s.get<int>();
    else throw ConfigError("fixture.switch_step must be 'midpoint' or an integer >= 0");
  }
  if (v.contains("jitter")) {
    const auto& j = v.at("jitter");
    check_keys(j, {"s", "v"}, "fixture.jitter");
    if (j.contains("s")) f.jitter_s = number(j.at("s"), "fixture.jitter.s");
    if (j.contains("v")) f.jitter_v = number(j.at("v"), "fixture.jitter.v");
    if (f.jitter_s < 0.0 || f.jitter_v < 0.0) throw ConfigError("fixture jitter must be >= 0");
  }
  return f;
}

}  // namespace

PlanningSetup ScenarioConfig::setup() const {
  return PlanningSetup{Scene(path_ego, path_other), sampler, reward, threads};
}

ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  try {
    const json doc = json::parse(text);
    check_keys(doc,
               {"schema_version", "paths", "initial_state", "sampler", "reward", "inference", "simulation",
                "threads", "seed", "policies", "fixture", "tracks", "conflict_window", "regen"},
               "config");
    const auto& version = require(doc, "schema_version", "config");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
      throw ConfigError("unsupported schema_version, expected " + std::to_string(kSchemaVersion));
    const auto& paths = require(doc, "paths", "config");
    check_keys(paths, {"ego", "other"}, "paths");
    ScenarioConfig cfg(parse_path(require(paths, "ego", "paths"), base_dir, "paths.ego"),
                       parse_path(require(paths, "other", "paths"), base_dir, "paths.other"));
    cfg.base_dir = base_dir;
    if (doc.contains("initial_state")) {
      const auto& x = doc.at("initial_state");
      check_keys(x, {"ego", "other"}, "initial_state");
      cfg.initial = JointState{parse_agent(require(x, "ego", "initial_state"), "initial_state.ego"),
                               parse_agent(require(x, "other", "initial_state"), "initial_state.other"), 0};
    }
    if (doc.contains("sampler")) cfg.sampler = parse_sampler(doc.at("sampler"));
    if (doc.contains("reward")) cfg.reward = parse_reward(doc.at("reward"));
    if (doc.contains("inference")) cfg.inference = parse_inference(doc.at("inference"));
    if (doc.contains("simulation")) {
      const auto& s = doc.at("simulation");
      check_keys(s, {"max_steps"}, "simulation");
      if (s.contains("max_steps")) cfg.max_steps = s.at("max_steps").get<int>();
      if (cfg.max_steps < 1) throw ConfigError("simulation.max_steps must be >= 1");
    }
    if (doc.contains("threads")) cfg.threads = doc.at("threads").get<int>();
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("policies")) {
      const auto& arr = doc.at("policies");
      if (!arr.is_array() || arr.empty()) throw ConfigError("policies must be a non-empty array");
      for (std::size_t i = 0; i < arr.size(); ++i) cfg.policies.push_back(parse_policy(arr[i], i));
    } else {
      cfg.policies = {{"egoism", FixedPolicy{RewardWeights::egoism_only()}},
                      {"courtesy", FixedPolicy{RewardWeights::courtesy_only()}},
                      {"confidence", FixedPolicy{RewardWeights::confidence_only()}}};
    }
    if (doc.contains("fixture")) cfg.fixture = parse_fixture(doc.at("fixture"));
    if (doc.contains("tracks")) cfg.tracks = base_dir / doc.at("tracks").get<std::string>();
    if (doc.contains("conflict_window")) {
      cfg.conflict_window = number(doc.at("conflict_window"), "conflict_window");
      if (cfg.conflict_window < 0.0) throw ConfigError("conflict_window must be >= 0");
    }
    if (doc.contains("regen")) {
      const auto& r = doc.at("regen");
      check_keys(r, {"horizons"}, "regen");
      if (r.contains("horizons")) cfg.regen_horizons = r.at("horizons").get<std::vector<double>>();
      if (cfg.regen_horizons.empty()) throw ConfigError("regen.horizons is empty");
      for (double h : cfg.regen_horizons)
        if (!(h > 0.0) || h > cfg.sampler.horizon_steps * cfg.sampler.dt + 1e-9)
          throw ConfigError("regen horizons must lie in (0, planning horizon]");
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ScenarioConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open config " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), file.parent_path());
}

Fixture make_fixture(const ScenarioConfig& cfg, const FixtureSpec& spec, std::uint64_t seed) {
  if (!cfg.initial) throw ConfigError("make_fixture needs an initial_state");
  const PlanningSetup setup = cfg.setup();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  JointState x0 = *cfg.initial;
  x0.ego.s += spec.jitter_s * u(rng);
  x0.ego.v += spec.jitter_v * u(rng);
  x0.other.s += spec.jitter_s * u(rng);
  x0.other.v += spec.jitter_v * u(rng);
  x0.ego.s = std::max(0.0, x0.ego.s);
  x0.other.s = std::max(0.0, x0.other.s);
  x0.ego.v = std::max(0.0, x0.ego.v);
  x0.other.v = std::max(0.0, x0.other.v);

  PolicySpec policy = FixedPolicy{spec.lambda};
  int switch_step = -1;
  if (spec.after) {
    switch_step = spec.switch_step;
    if (switch_step < 0) {
      const auto base = simulate(setup, x0, FixedPolicy{spec.lambda}, FollowerPolicy{}, cfg.max_steps);
      switch_step = static_cast<int>(base.steps()) / 2;
    }
    policy = SwitchingPolicy{spec.lambda, *spec.after, switch_step};
  }
  Fixture fx{simulate(setup, x0, policy, FollowerPolicy{}, cfg.max_steps), x0, switch_step, {}};

  auto export_track = [&](int id, const ReferencePath& path, bool ego) {
    Track t;
    t.id = id;
    for (std::size_t k = 0; k < fx.trace.joint_states.size(); ++k) {
      const auto& st = ego ? fx.trace.joint_states[k].ego : fx.trace.joint_states[k].other;
      const Vec2 p = path.point_at(st.s, st.d);
      const Vec2 tan = path.tangent_at(st.s);
      TrackRecord r;
      r.track_id = id;
      r.frame = static_cast<std::int64_t>(k);
      r.timestamp_ms = std::llround(static_cast<double>(k) * setup.sampler.dt * 1000.0);
      r.x = p.x;
      r.y = p.y;
      r.vx = st.v * tan.x;
      r.vy = st.v * tan.y;
      t.records.push_back(r);
    }
    return t;
  };
  fx.tracks.push_back(export_track(kFixtureEgoTrack, cfg.path_ego, true));
  fx.tracks.push_back(export_track(kFixtureOtherTrack, cfg.path_other, false));
  return fx;
}

}  // namespace uapp
