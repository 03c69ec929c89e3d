#include "lob/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lob/config.hpp"
#include "lob/csv.hpp"
#include "lob/fixed_point.hpp"
#include "lob/fluid.hpp"
#include "lob/markov.hpp"
#include "lob/scaling.hpp"
#include "lob/version.hpp"

namespace lob::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Invocation {
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& contents) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + (dir_ / name).string() + " for writing");
    out << contents;
    if (!out) throw std::runtime_error("failed writing " + (dir_ / name).string());
    files_.push_back(name);
  }

  const std::vector<std::string>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

json fluid_to_json(const FluidState& v) { return json{{"x", v.x}, {"y", v.y}}; }

std::vector<std::string> state_header(std::string first, std::size_t levels) {
  std::vector<std::string> header{std::move(first)};
  for (std::size_t i = 1; i <= levels; ++i) header.push_back("x_" + std::to_string(i));
  for (std::size_t i = 1; i <= levels; ++i) header.push_back("y_" + std::to_string(i));
  return header;
}

std::string trajectory_csv(std::span<const double> times, std::span<const FluidState> states,
                           std::size_t levels) {
  std::ostringstream os;
  CsvWriter csv(os, state_header("tau", levels));
  for (std::size_t k = 0; k < times.size(); ++k) {
    csv.cell(times[k]);
    for (double x : states[k].x) csv.cell(x);
    for (double y : states[k].y) csv.cell(y);
    csv.end_row();
  }
  return os.str();
}

FixedPointResult solve(const RunConfig& rc) {
  return solve_fixed_point(rc.params, FixedPointOptions{.tol = rc.tol,
                                                        .max_iter = rc.max_iter,
                                                        .tie_tol = rc.tie_tol,
                                                        .record_history = false});
}

json cmd_fixed_point(const RunConfig& rc, OutputSet& out) {
  const FixedPointResult fp = solve(rc);
  std::ostringstream os;
  CsvWriter csv(os, {"level", "x_star", "y_star"});
  for (std::size_t i = 0; i < rc.params.levels; ++i) {
    csv.cell(static_cast<std::int64_t>(i + 1)).cell(fp.point.x[i]).cell(fp.point.y[i]);
    csv.end_row();
  }
  out.write("fixed_point.csv", os.str());
  return json{{"regime", fp.regime.to_string()},
              {"residual", fp.residual},
              {"iterations", fp.iterations}};
}

FluidState explicit_or_fixed_point(const RunConfig& rc, const char* command) {
  if (const auto* start = std::get_if<FluidState>(&rc.init)) return *start;
  if (std::holds_alternative<FixedPointInit>(rc.init)) return solve(rc).point;
  throw Error(ErrorCode::InvalidArgument,
              std::string(command) + " needs init = fixed_point or an explicit vector", "init");
}

json cmd_integrate(const RunConfig& rc, OutputSet& out) {
  const FluidState v0 = explicit_or_fixed_point(rc, "integrate");
  const FixedPointResult fp = solve(rc);
  const OdeSolution sol = integrate(v0, rc.params, rc.horizon, rc.dtau, &fp.point, rc.ode_tol);
  out.write("trajectory.csv", trajectory_csv(sol.times, sol.states, rc.params.levels));
  return json{{"steps", sol.times.size() - 1},
              {"final_state", fluid_to_json(sol.final_state())},
              {"fixed_point", fluid_to_json(fp.point)},
              {"final_distance_to_fp", sol.final_distance_to_fp.value_or(0.0)},
              {"converged", sol.converged}};
}

json totals_to_json(const StepTotals& t) {
  return json{{"steps", t.steps},
              {"trades", t.trades},
              {"buyer_quits", t.buyer_quits},
              {"buyer_moves", t.buyer_moves},
              {"seller_quits", t.seller_quits},
              {"seller_moves", t.seller_moves},
              {"buyer_arrivals", t.buyer_arrivals},
              {"seller_arrivals", t.seller_arrivals},
              {"buyer_exits_top", t.buyer_exits_top},
              {"seller_exits_bottom", t.seller_exits_bottom}};
}

json cmd_simulate(const RunConfig& rc, OutputSet& out) {
  validate_params(rc.params, rc.scaling);
  RngStream rng(rc.seed, 0);
  LatticeState u0;
  std::int64_t burn = 0;
  if (std::holds_alternative<EquilibriumInit>(rc.init)) {
    u0 = LatticeState(rc.params.levels);
    burn = burn_in_steps(rc.init, rc.scaling);
    if (burn > 0) u0 = simulate(u0, rescale_params(rc.params, rc.scaling), burn, rng, burn).states.back();
  } else {
    u0 = lattice_from_fluid(explicit_or_fixed_point(rc, "simulate"), rc.scaling.scale);
  }
  const FluidTrajectory traj =
      rescaled_trajectory(rc.params, rc.scaling, u0, rc.horizon, rc.sample_dtau, rng);
  out.write("sim_trajectory.csv", trajectory_csv(traj.times, traj.states, rc.params.levels));

  const json totals = totals_to_json(traj.totals);
  std::ostringstream os;
  CsvWriter csv(os, {"quantity", "value"});
  for (const auto& [key, value] : totals.items()) {
    csv.cell(key).cell(value.get<std::int64_t>());
    csv.end_row();
  }
  out.write("breakdown_totals.csv", os.str());
  return json{{"rng_seed", rng.seed()}, {"burn_in_steps", burn}, {"totals", totals}};
}

json cmd_scaling_study(const RunConfig& rc, OutputSet& out) {
  StudyConfig config;
  config.params = rc.params;
  config.scales = rc.scales;
  config.replicas = rc.replicas;
  config.horizon = rc.horizon;
  config.sample_dtau = rc.sample_dtau;
  config.delta = rc.scaling.delta;
  config.ode_dtau = rc.dtau;
  config.init = rc.init;
  config.master_seed = rc.seed;
  config.threads = rc.threads;
  const StudyResult result = scaling_study(config);

  std::ostringstream study;
  CsvWriter rows(study, {"L", "replica", "seed_used", "sup_dist"});
  for (const auto& r : result.records) {
    rows.cell(r.scale).cell(r.replica).cell(r.seed_used).cell(r.sup_dist);
    rows.end_row();
  }
  out.write("study.csv", study.str());

  std::ostringstream summary;
  CsvWriter srows(summary, {"L", "median", "p90"});
  json per_scale = json::array();
  for (const auto& s : result.summary) {
    srows.cell(s.scale).cell(s.median).cell(s.p90);
    srows.end_row();
    per_scale.push_back({{"L", s.scale}, {"median", s.median}, {"p90", s.p90}});
  }
  out.write("summary.csv", summary.str());

  json res{{"summary", per_scale}};
  res["log_log_slope"] = result.log_log_slope ? json(*result.log_log_slope) : json(nullptr);
  return res;
}

json cmd_equilibrium(const RunConfig& rc, OutputSet& out) {
  validate_params(rc.params, rc.scaling);
  RngStream rng(rc.seed, 0);
  const std::int64_t burn =
      rc.burn_in >= 0 ? rc.burn_in : static_cast<std::int64_t>(std::ceil(50.0 * rc.scaling.scale));
  const EquilibriumStats stats =
      equilibrium_study(rc.params, rc.scaling, burn, rc.n_samples, rc.sample_gap, rng);

  std::ostringstream os;
  CsvWriter csv(os, {"level", "x_mean", "y_mean", "x_se", "y_se", "x_star", "y_star"});
  for (std::size_t i = 0; i < rc.params.levels; ++i) {
    csv.cell(static_cast<std::int64_t>(i + 1))
        .cell(stats.mean.x[i])
        .cell(stats.mean.y[i])
        .cell(stats.std_error.x[i])
        .cell(stats.std_error.y[i])
        .cell(stats.fixed_point.x[i])
        .cell(stats.fixed_point.y[i]);
    csv.end_row();
  }
  out.write("equilibrium.csv", os.str());
  return json{{"burn_in_steps", burn},
              {"samples", stats.samples},
              {"distance_to_fp", stats.distance_to_fp}};
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int execute(const Invocation& inv) {
  ConfigMap config = default_config();
  RunConfig rc;
  try {
    if (!inv.config_path.empty()) {
      std::ifstream in(inv.config_path, std::ios::binary);
      if (!in) {
        std::cerr << "error: cannot read config file '" << inv.config_path << "'\n";
        return kInvalidConfig;
      }
      std::ostringstream text;
      text << in.rdbuf();
      config = parse_config_text(text.str(), std::move(config));
    }
    for (const auto& o : inv.overrides) apply_override(config, o);
    if (!inv.out_dir.empty()) config["out_dir"] = inv.out_dir;
    if (inv.seed) config["seed"] = std::to_string(*inv.seed);
    rc = resolve_config(config);
  } catch (const Error& e) {
    std::cerr << "error: invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  }

  const auto started = std::chrono::steady_clock::now();
  json manifest{{"command", inv.command},
                {"version", kVersion},
                {"rng", "mt19937_64 seeded by splitmix64(splitmix64(seed) ^ stream)"},
                {"seed", rc.seed},
                {"config", config},
                {"started_utc", utc_now()}};
  int code = kSuccess;
  try {
    OutputSet out(rc.out_dir);
    try {
      json results;
      if (inv.command == "fixed-point") {
        results = cmd_fixed_point(rc, out);
      } else if (inv.command == "integrate") {
        results = cmd_integrate(rc, out);
      } else if (inv.command == "simulate") {
        results = cmd_simulate(rc, out);
      } else if (inv.command == "scaling-study") {
        results = cmd_scaling_study(rc, out);
      } else {
        results = cmd_equilibrium(rc, out);
      }
      manifest["status"] = "ok";
      manifest["results"] = std::move(results);
    } catch (const Error& e) {
      code = e.is_numerical() ? kNumericalFailure : kInvalidConfig;
      manifest["status"] = "error";
      manifest["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
      if (!e.field().empty()) manifest["error"]["field"] = e.field();
      std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    }
    manifest["outputs"] = out.files();
    manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out.write("manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Limit-order-book Markov model and its fluid limit"};
  app.require_subcommand(1);

  Invocation inv;
  std::uint64_t seed = 0;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"fixed-point", "Solve the fixed-point system; writes fixed_point.csv"},
      {"integrate", "Integrate the fluid ODEs; writes trajectory.csv"},
      {"simulate", "Simulate the rescaled chain; writes sim_trajectory.csv"},
      {"scaling-study", "Sup-distance ensembles over L; writes study.csv and summary.csv"},
      {"equilibrium", "Time-averaged chain after burn-in; writes equilibrium.csv"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", inv.config_path, "Key-value config file");
    sub->add_option("--set", inv.overrides, "Override key=value (repeatable, later wins)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_option("--out", inv.out_dir, "Output directory");
    sub->add_option("--seed", seed, "Master seed");
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kSuccess : kInvalidConfig;
  }
  for (CLI::App* sub : subs) {
    if (sub->parsed()) {
      inv.command = sub->get_name();
      if (sub->count("--seed") > 0) inv.seed = seed;
    }
  }
  return execute(inv);
}

}  // namespace lob::cli
