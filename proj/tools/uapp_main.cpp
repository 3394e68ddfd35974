#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "json_fixed.hpp"
#include "uapp/config.hpp"
#include "uapp/errors.hpp"
#include "uapp/io.hpp"
#include "uapp/metrics.hpp"
#include "uapp/parallel.hpp"
#include "uapp/regen.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using uapp::tools::dump_fixed;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct Context {
  uapp::ScenarioConfig cfg;
  fs::path out;
  std::uint64_t seed;
};

Context open_context(const CommonOptions& o) {
  auto cfg = uapp::load_config(o.config);
  if (o.threads) {
    if (*o.threads < 1) throw uapp::ConfigError("--threads must be >= 1");
    cfg.threads = *o.threads;
  }
  const std::uint64_t seed = o.seed ? *o.seed : cfg.seed;
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw uapp::IoError("cannot create output directory " + o.out + ": " + ec.message());
  return {std::move(cfg), fs::path(o.out), seed};
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

ordered_json weights_json(const uapp::RewardWeights& w) {
  return ordered_json::array({w.egoism(), w.courtesy(), w.confidence()});
}

ordered_json state_json(const uapp::AgentState& a) { return {{"s", a.s}, {"v", a.v}, {"d", a.d}}; }

ordered_json dop_json(const std::array<double, 3>& f) {
  return {{"egoism", f[0]}, {"courtesy", f[1]}, {"confidence", f[2]}};
}

// ---- sim --------------------------------------------------------------------

int run_sim(const CommonOptions& opts, const std::vector<std::string>& only) {
  auto ctx = open_context(opts);
  if (!ctx.cfg.initial) throw uapp::ConfigError("sim needs an initial_state");
  const auto setup = ctx.cfg.setup();

  std::vector<uapp::NamedPolicy> policies;
  for (const auto& p : ctx.cfg.policies)
    if (only.empty() || std::find(only.begin(), only.end(), p.name) != only.end()) policies.push_back(p);
  for (const auto& name : only) {
    const bool known = std::any_of(policies.begin(), policies.end(), [&](const auto& p) { return p.name == name; });
    if (!known) throw uapp::ConfigError("unknown policy '" + name + "'");
  }

  std::ifstream raw(opts.config);
  const auto input = ordered_json::parse(raw, nullptr, false);

  ordered_json stats = ordered_json::array();
  std::vector<std::pair<std::string, uapp::InteractionStats>> finished;
  for (const auto& p : policies) {
    const auto trace = uapp::simulate(setup, *ctx.cfg.initial, p.policy, uapp::FollowerPolicy{}, ctx.cfg.max_steps);
    uapp::write_text_file(ctx.out / ("trace_" + p.name + ".csv"),
                          render([&](std::ostream& s) { uapp::write_trace_csv(s, trace); }));
    ordered_json lambda_ego = ordered_json::array(), lambda_other = ordered_json::array();
    for (const auto& w : trace.lambda_ego) lambda_ego.push_back(weights_json(w));
    for (const auto& w : trace.lambda_other) lambda_other.push_back(weights_json(w));
    const ordered_json sidecar{{"policy", p.name},
                               {"seed", ctx.seed},
                               {"config", input},
                               {"dt", trace.dt},
                               {"steps", trace.steps()},
                               {"terminated", trace.terminated},
                               {"labels_ego", trace.labels_ego},
                               {"labels_other", trace.labels_other},
                               {"lambda_ego", lambda_ego},
                               {"lambda_other", lambda_other}};
    uapp::write_text_file(ctx.out / ("trace_" + p.name + ".json"), dump_fixed(sidecar));
    ordered_json row{{"policy", p.name}, {"steps", trace.steps()}, {"terminated", trace.terminated}};
    if (trace.terminated) {
      const auto st = uapp::interaction_stats(trace);
      row["are"] = st.are;
      row["ait"] = st.ait;
      row["min_distance"] = st.min_distance;
      finished.emplace_back(p.name, st);
    } else {
      row["are"] = uapp::are(trace);
      row["ait"] = nullptr;
    }
    stats.push_back(row);
    std::cout << p.name << "  are " << uapp::format_fixed(row["are"].get<double>()) << " m  ait "
              << (trace.terminated ? uapp::format_fixed(row["ait"].get<double>()) + " s" : std::string("n/a"))
              << '\n';
  }

  ordered_json doc{{"conflict", {{"x", setup.scene.conflict.position.x},
                                 {"y", setup.scene.conflict.position.y},
                                 {"s_ego", setup.scene.conflict.s_ego},
                                 {"s_other", setup.scene.conflict.s_other}}},
                   {"dt", setup.sampler.dt},
                   {"policies", stats}};
  auto find = [&](const char* n) -> const uapp::InteractionStats* {
    for (const auto& [name, st] : finished)
      if (name == n) return &st;
    return nullptr;
  };
  const auto* e = find("egoism");
  const auto* c = find("courtesy");
  const auto* f = find("confidence");
  if (e && c && f) {
    doc["orderings"] = {{"are_courtesy_egoism_confidence", c->are > e->are && e->are > f->are},
                        {"ait_confidence_egoism_courtesy", f->ait > e->ait && e->ait > c->ait}};
  }
  uapp::write_text_file(ctx.out / "stats.json", dump_fixed(doc));
  return kExitOk;
}

// ---- infer / regen shared -----------------------------------------------------

struct PairData {
  uapp::InteractionPair pair;
  uapp::Trajectory ego;
  uapp::Trajectory other;
};

std::vector<PairData> load_pairs(const Context& ctx, const uapp::PlanningSetup& setup) {
  if (!ctx.cfg.tracks) throw uapp::ConfigError("config has no 'tracks' file");
  const auto tracks = uapp::load_tracks(*ctx.cfg.tracks);
  const uapp::ReferencePath ego_paths[] = {ctx.cfg.path_ego};
  const uapp::ReferencePath other_paths[] = {ctx.cfg.path_other};
  const auto pairs = uapp::extract_pairs(tracks, ego_paths, other_paths, ctx.cfg.conflict_window);
  auto track = [&](int id) -> const uapp::Track& {
    for (const auto& t : tracks)
      if (t.id == id) return t;
    throw uapp::InvalidArgument("missing track " + std::to_string(id));
  };
  std::vector<PairData> out;
  for (const auto& p : pairs) {
    out.push_back({p, uapp::observe_on_path(track(p.ego_track), ctx.cfg.path_ego, p.start_ms, p.end_ms, setup.sampler.dt),
                   uapp::observe_on_path(track(p.other_track), ctx.cfg.path_other, p.start_ms, p.end_ms,
                                         setup.sampler.dt)});
  }
  return out;
}

std::string pair_tag(const uapp::InteractionPair& p) {
  return std::to_string(p.ego_track) + "_" + std::to_string(p.other_track);
}

ordered_json pair_json(const PairData& d) {
  return {{"ego_track", d.pair.ego_track},
          {"other_track", d.pair.other_track},
          {"first_frame", d.pair.first_frame},
          {"last_frame", d.pair.last_frame},
          {"samples", d.ego.states.size()}};
}

// Many pairs fan out one per worker; a single pair keeps the threads for
// the joint-space construction instead.
template <typename Result, typename Fn>
std::vector<Result> for_pairs(const std::vector<PairData>& pairs, uapp::PlanningSetup setup, Fn&& fn) {
  std::vector<std::optional<Result>> slots(pairs.size());
  const int threads = setup.threads;
  if (pairs.size() > 1) setup.threads = 1;
  uapp::parallel_for(pairs.size(), pairs.size() > 1 ? threads : 1,
                     [&](std::size_t i) { slots[i].emplace(fn(i, pairs[i], setup)); });
  std::vector<Result> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---- infer ---------------------------------------------------------------------

int run_infer(const CommonOptions& opts) {
  auto ctx = open_context(opts);
  const auto setup = ctx.cfg.setup();
  const auto pairs = load_pairs(ctx, setup);
  const auto results = for_pairs<uapp::PairLambdaSeries>(
      pairs, setup, [&](std::size_t i, const PairData& d, const uapp::PlanningSetup& s) {
        return uapp::infer_trace(d.ego, d.other, s, ctx.cfg.inference, ctx.seed + 2 * i);
      });

  ordered_json list = ordered_json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& d = pairs[i];
    const auto& r = results[i];
    uapp::write_text_file(ctx.out / ("lambda_" + pair_tag(d.pair) + ".csv"), render([&](std::ostream& s) {
                            s << uapp::kLambdaHeader << '\n';
                            uapp::write_lambda_csv(s, r.ego, d.pair.ego_track);
                            uapp::write_lambda_csv(s, r.other, d.pair.other_track);
                          }));
    auto agent = [](int id, const uapp::LambdaSeries& series) {
      return ordered_json{{"agent_id", id},
                          {"windows", series.estimates.size()},
                          {"final", weights_json(series.estimates.back())},
                          {"dominant", uapp::to_string(uapp::dominant(series.estimates.back()))},
                          {"psf", uapp::psf(series.estimates)},
                          {"dop", dop_json(uapp::dop(series.estimates))}};
    };
    auto entry = pair_json(d);
    entry["agents"] = ordered_json::array({agent(d.pair.ego_track, r.ego), agent(d.pair.other_track, r.other)});
    list.push_back(entry);
    std::cout << "pair " << pair_tag(d.pair) << "  ego " << uapp::to_string(uapp::dominant(r.ego.estimates.back()))
              << "  other " << uapp::to_string(uapp::dominant(r.other.estimates.back())) << '\n';
  }
  uapp::write_text_file(ctx.out / "infer.json", dump_fixed({{"pairs", list}}));
  return kExitOk;
}

// ---- regen ---------------------------------------------------------------------

int run_regen(const CommonOptions& opts) {
  auto ctx = open_context(opts);
  const auto setup = ctx.cfg.setup();
  const auto pairs = load_pairs(ctx, setup);
  const int r = ctx.cfg.inference.window_r;
  const auto results = for_pairs<uapp::RegenResult>(
      pairs, setup, [&](std::size_t i, const PairData& d, const uapp::PlanningSetup& s) {
        const auto est = uapp::infer_agent(d.ego, d.other, s, ctx.cfg.inference, ctx.seed + 2 * i);
        return uapp::regenerate(d.ego, d.other, s, est, r, ctx.cfg.regen_horizons, true);
      });

  ordered_json list = ordered_json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& d = pairs[i];
    const auto& res = results[i];
    uapp::write_text_file(ctx.out / ("regen_" + pair_tag(d.pair) + ".csv"), render([&](std::ostream& s) {
                            s << "frame,policy,step,x,y\n";
                            for (const auto& smp : res.samples)
                              for (std::size_t k = 0; k < smp.trajectory.states.size(); ++k) {
                                const auto& st = smp.trajectory.states[k];
                                const auto p = setup.scene.path_ego.point_at(st.s, st.d);
                                s << smp.frame << ',' << smp.policy << ',' << k << ',' << uapp::format_fixed(p.x)
                                  << ',' << uapp::format_fixed(p.y) << '\n';
                              }
                          }));
    auto entry = pair_json(d);
    entry["frames"] = res.frames.size();
    ordered_json mse = ordered_json::object();
    for (const auto& p : res.policies) mse[p.policy] = p.mse;
    entry["mse"] = mse;
    list.push_back(entry);
  }
  ordered_json mean = ordered_json::object();
  if (!results.empty()) {
    for (std::size_t p = 0; p < results.front().policies.size(); ++p) {
      std::vector<double> m(ctx.cfg.regen_horizons.size(), 0.0);
      for (const auto& res : results)
        for (std::size_t h = 0; h < m.size(); ++h) m[h] += res.policies[p].mse[h] / static_cast<double>(results.size());
      mean[results.front().policies[p].policy] = m;
    }
  }
  uapp::write_text_file(ctx.out / "regen.json",
                        dump_fixed({{"horizons", ctx.cfg.regen_horizons}, {"mean_mse", mean}, {"pairs", list}}));
  for (const auto& item : mean.items()) {
    std::cout << item.key();
    for (const auto& v : item.value()) std::cout << "  " << uapp::format_fixed(v.get<double>());
    std::cout << '\n';
  }
  return kExitOk;
}

// ---- fixture -------------------------------------------------------------------

uapp::RewardWeights weights_arg(const std::vector<double>& v, const char* flag) {
  try {
    return uapp::RewardWeights(v.at(0), v.at(1), v.at(2));
  } catch (const std::exception& e) {
    throw uapp::ConfigError(std::string(flag) + ": " + e.what());
  }
}

int run_fixture(const CommonOptions& opts, const std::vector<double>& lambda, const std::vector<double>& after,
                std::optional<int> switch_step) {
  auto ctx = open_context(opts);
  auto spec = ctx.cfg.fixture;
  if (!lambda.empty()) spec.lambda = weights_arg(lambda, "--lambda");
  if (!after.empty()) spec.after = weights_arg(after, "--switch-to");
  if (switch_step) spec.switch_step = *switch_step;
  const auto fx = uapp::make_fixture(ctx.cfg, spec, ctx.seed);

  uapp::write_text_file(ctx.out / "tracks.csv", render([&](std::ostream& s) { uapp::write_tracks(s, fx.tracks); }));
  uapp::write_text_file(ctx.out / "path_ego.csv", render([&](std::ostream& s) {
                          uapp::write_path_points(s, ctx.cfg.path_ego.points());
                        }));
  uapp::write_text_file(ctx.out / "path_other.csv", render([&](std::ostream& s) {
                          uapp::write_path_points(s, ctx.cfg.path_other.points());
                        }));
  uapp::write_text_file(ctx.out / "trace.csv", render([&](std::ostream& s) { uapp::write_trace_csv(s, fx.trace); }));

  // The scenario for infer/regen: the input config with file-backed paths.
  std::ifstream in(opts.config, std::ios::binary);
  auto scenario = ordered_json::parse(in);
  scenario["paths"]["ego"] = {{"csv", "path_ego.csv"}, {"speed_limit", ctx.cfg.path_ego.speed_limit()}};
  scenario["paths"]["other"] = {{"csv", "path_other.csv"}, {"speed_limit", ctx.cfg.path_other.speed_limit()}};
  scenario["tracks"] = "tracks.csv";
  scenario["seed"] = ctx.seed;
  uapp::write_text_file(ctx.out / "scenario.json", dump_fixed(scenario));

  ordered_json lambdas = ordered_json::array();
  for (const auto& w : fx.trace.lambda_ego) lambdas.push_back(weights_json(w));
  ordered_json truth{{"seed", ctx.seed},
                     {"initial_state", {{"ego", state_json(fx.initial.ego)}, {"other", state_json(fx.initial.other)}}},
                     {"dt", fx.trace.dt},
                     {"steps", fx.trace.steps()},
                     {"terminated", fx.trace.terminated},
                     {"switch_step", fx.switch_step},
                     {"ego_track", uapp::kFixtureEgoTrack},
                     {"other_track", uapp::kFixtureOtherTrack},
                     {"lambda_ego", lambdas}};
  uapp::write_text_file(ctx.out / "truth.json", dump_fixed(truth));
  std::cout << "fixture with " << fx.trace.joint_states.size() << " frames written to " << ctx.out.string() << '\n';
  return kExitOk;
}

void report_error(bool as_json, const char* kind, const std::string& message, int code,
                  std::optional<std::size_t> row = std::nullopt) {
  if (as_json) {
    ordered_json e{{"kind", kind}, {"message", message}, {"exit_code", code}};
    if (row) e["row"] = *row;
    std::cerr << ordered_json{{"error", e}}.dump() << '\n';
  } else {
    std::cerr << "error: " << message << '\n';
  }
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Scenario config (JSON)")->required();
  cmd->add_option("--out", o.out, "Output directory")->required();
  cmd->add_option("--seed", o.seed, "Seed, overrides the config");
  cmd->add_option("--threads", o.threads, "Worker threads, overrides the config");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Socially-aware interaction planning and reward-weight inference"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json_errors = false;
  app.add_flag("--json-errors", json_errors, "Report errors as JSON on stderr");

  CommonOptions common;
  std::vector<std::string> only;
  std::vector<double> lambda, after;
  std::optional<int> switch_step;

  auto* sim = app.add_subcommand("sim", "Closed-loop simulation per leader policy");
  add_common(sim, common);
  sim->add_option("--policy", only, "Restrict to the named policies (repeatable)");
  auto* infer = app.add_subcommand("infer", "Online reward-weight inference on recorded pairs");
  add_common(infer, common);
  auto* regen = app.add_subcommand("regen", "Trajectory regeneration and MSE per policy");
  add_common(regen, common);
  auto* fixture = app.add_subcommand("fixture", "Synthetic recorded interaction");
  add_common(fixture, common);
  fixture->add_option("--lambda", lambda, "Leader weights e,c,f")->expected(3)->delimiter(',');
  fixture->add_option("--switch-to", after, "Weights after the switch e,c,f")->expected(3)->delimiter(',');
  fixture->add_option("--switch-step", switch_step, "Switch step, midpoint by default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error(json_errors, "UsageError", e.what(), kExitUsage);
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return run_sim(common, only);
    if (infer->parsed()) return run_infer(common);
    if (regen->parsed()) return run_regen(common);
    return run_fixture(common, lambda, after, switch_step);
  } catch (const uapp::ParseError& e) {
    report_error(json_errors, e.kind(), e.what(), kExitData, e.row());
  } catch (const uapp::Error& e) {
    report_error(json_errors, e.kind(), e.what(), kExitData);
  } catch (const std::exception& e) {
    report_error(json_errors, "Error", e.what(), kExitData);
  }
  return kExitData;
}
