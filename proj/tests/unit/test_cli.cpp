#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lob/cli.hpp"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lobfluid_test_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json manifest(const fs::path& dir) {
  return nlohmann::json::parse(slurp(dir / "manifest.json"));
}

int run(std::vector<std::string> args, const fs::path& out) {
  args.push_back("--out");
  args.push_back(out.string());
  return lob::cli::run(args);
}

const std::vector<std::string> kSingleAsym{"--set", "n=1",          "--set", "alpha_q=0.5",
                                           "--set", "alpha_m=0.5",  "--set", "lambda_b=2",
                                           "--set", "lambda_s=1"};

std::vector<std::string> with(std::string command, std::vector<std::string> extra) {
  extra.insert(extra.begin(), std::move(command));
  return extra;
}

}  // namespace

TEST_CASE("fixed-point writes the solution table") {
  const fs::path dir = fresh_dir("fp");
  REQUIRE(run(with("fixed-point", kSingleAsym), dir) == lob::cli::kSuccess);
  CHECK(slurp(dir / "fixed_point.csv") == "level,x_star,y_star\n1,1.5,0.5\n");
  const auto m = manifest(dir);
  CHECK(m["status"] == "ok");
  CHECK(m["results"]["regime"] == "AllBuyDominant");
  CHECK(m["command"] == "fixed-point");
}

TEST_CASE("config file and overrides combine, later values win") {
  const fs::path dir = fresh_dir("cfg");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# one level\nn = 1\nalpha_q = 0.5\nalpha_m = 0.5\nlambda_b = 1\nlambda_s = 5\n";
  }
  REQUIRE(run({"fixed-point", "--config", (dir / "run.cfg").string(), "--set", "lambda_s=1",
               "--set", "lambda_b=2"},
              dir) == lob::cli::kSuccess);
  CHECK(slurp(dir / "fixed_point.csv") == "level,x_star,y_star\n1,1.5,0.5\n");
}

TEST_CASE("invalid parameters exit 2 and name the field") {
  const fs::path dir = fresh_dir("bad");
  CHECK(run({"fixed-point", "--set", "gamma=-1"}, dir) == lob::cli::kInvalidConfig);
  CHECK(run({"fixed-point", "--set", "bogus=1"}, dir) == lob::cli::kInvalidConfig);
  CHECK(run({"fixed-point", "--set", "n=abc"}, dir) == lob::cli::kInvalidConfig);
  CHECK(run({"fixed-point", "--config", (dir / "missing.cfg").string()}, dir) ==
        lob::cli::kInvalidConfig);
  CHECK(run({"not-a-command"}, dir) == lob::cli::kInvalidConfig);

  REQUIRE(run({"simulate", "--set", "scale_l=0.5"}, dir) == lob::cli::kInvalidConfig);
  const auto m = manifest(dir);
  CHECK(m["status"] == "error");
  CHECK(m["error"]["field"] == "scale_l");
  CHECK(m["error"]["code"] == "ScaleTooSmall");
}

TEST_CASE("numerical failure exits 3") {
  const fs::path dir = fresh_dir("nonconv");
  CHECK(run({"fixed-point", "--set", "n=5", "--set", "max_iter=2"}, dir) ==
        lob::cli::kNumericalFailure);
  CHECK(manifest(dir)["error"]["code"] == "NoConvergence");
}

TEST_CASE("integrate writes a tau-indexed trajectory") {
  const fs::path dir = fresh_dir("ode");
  REQUIRE(run({"integrate", "--set", "horizon_t=1", "--set", "dtau=0.01", "--set", "init=1,0.5,0.5,1"},
              dir) == lob::cli::kSuccess);
  const std::string csv = slurp(dir / "trajectory.csv");
  CHECK(csv.rfind("tau,x_1,x_2,y_1,y_2\n0,1,0.5,0.5,1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 102);
}

TEST_CASE("every command reruns byte-identically") {
  const std::vector<std::vector<std::string>> commands = {
      {"fixed-point"},
      {"integrate", "--set", "horizon_t=2"},
      {"simulate", "--set", "scale_l=200", "--set", "horizon_t=2", "--seed", "5"},
      {"scaling-study", "--set", "l_list=50,100", "--set", "replicas=3", "--set", "horizon_t=1"},
      {"equilibrium", "--set", "scale_l=100", "--set", "burn_in=1000", "--set", "n_samples=50",
       "--set", "sample_gap=10"},
  };
  int index = 0;
  for (const auto& args : commands) {
    const fs::path a = fresh_dir("rerun_a" + std::to_string(index));
    const fs::path b = fresh_dir("rerun_b" + std::to_string(index));
    ++index;
    INFO(args.front());
    REQUIRE(run(args, a) == lob::cli::kSuccess);
    REQUIRE(run(args, b) == lob::cli::kSuccess);
    const auto outputs = manifest(a)["outputs"];
    CHECK(outputs.size() >= 1);
    for (const auto& name : outputs) {
      const std::string file = name.get<std::string>();
      if (file == "manifest.json") continue;
      CHECK(slurp(a / file) == slurp(b / file));
    }
  }
}

TEST_CASE("scaling-study files have the documented columns") {
  const fs::path dir = fresh_dir("study");
  REQUIRE(run({"scaling-study", "--set", "l_list=50,100", "--set", "replicas=2", "--set",
               "horizon_t=0.5"},
              dir) == lob::cli::kSuccess);
  const std::string study = slurp(dir / "study.csv");
  const std::string summary = slurp(dir / "summary.csv");
  CHECK(study.rfind("L,replica,seed_used,sup_dist\n", 0) == 0);
  CHECK(std::count(study.begin(), study.end(), '\n') == 5);
  CHECK(summary.rfind("L,median,p90\n50,", 0) == 0);
  CHECK(manifest(dir)["results"].contains("log_log_slope"));
}

TEST_CASE("different seeds change the simulation") {
  const fs::path a = fresh_dir("seed_a");
  const fs::path b = fresh_dir("seed_b");
  REQUIRE(run({"simulate", "--set", "scale_l=200", "--seed", "1"}, a) == lob::cli::kSuccess);
  REQUIRE(run({"simulate", "--set", "scale_l=200", "--seed", "2"}, b) == lob::cli::kSuccess);
  CHECK(slurp(a / "sim_trajectory.csv") != slurp(b / "sim_trajectory.csv"));
  CHECK(manifest(a)["seed"] == 1);
}

TEST_CASE("equilibrium writes means, errors and the fixed point") {
  const fs::path dir = fresh_dir("eq");
  std::vector<std::string> args = with("equilibrium", kSingleAsym);
  for (const char* s : {"scale_l=200", "burn_in=2000", "n_samples=20", "sample_gap=5"}) {
    args.push_back("--set");
    args.push_back(s);
  }
  REQUIRE(run(args, dir) == lob::cli::kSuccess);
  const std::string csv = slurp(dir / "equilibrium.csv");
  CHECK(csv.rfind("level,x_mean,y_mean,x_se,y_se,x_star,y_star\n1,", 0) == 0);
  CHECK(csv.find(",1.5,0.5\n") != std::string::npos);
}
