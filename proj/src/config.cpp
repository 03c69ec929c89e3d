#include "lob/config.hpp"

#include <charconv>
#include <cmath>

namespace lob {

const ConfigMap& default_config() {
  static const ConfigMap defaults = {
      {"n", "2"},
      {"gamma", "1"},
      {"alpha_q", "1"},
      {"alpha_m", "1"},
      {"lambda_b", "2"},
      {"lambda_s", "1"},
      {"scale_l", "1000"},
      {"delta", "1"},
      {"horizon_t", "10"},
      {"dtau", "0.001"},
      {"sample_dtau", "0.01"},
      {"tol", "1e-12"},
      {"ode_tol", "1e-9"},
      {"tie_tol", "1e-9"},
      {"max_iter", "1000000"},
      {"replicas", "50"},
      {"l_list", "100,1000,10000"},
      {"init", "fixed_point"},
      {"seed", "20240601"},
      {"out_dir", "."},
      {"burn_in", "-1"},
      {"n_samples", "1000"},
      {"sample_gap", "100"},
      {"threads", "0"},
  };
  return defaults;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value, const char* why) {
  throw Error(ErrorCode::InvalidArgument,
              "config key '" + key + "': " + why + " (got '" + std::string(value) + "')", key);
}

double to_double(const std::string& key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    bad_value(key, text, "expected a number");
  }
  return value;
}

std::int64_t to_int(const std::string& key, std::string_view text) {
  text = trim(text);
  std::int64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    bad_value(key, text, "expected an integer");
  }
  return value;
}

std::uint64_t to_uint(const std::string& key, std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    bad_value(key, text, "expected a non-negative integer");
  }
  return value;
}

std::vector<double> to_list(const std::string& key, std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(to_double(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void set_key(ConfigMap& config, std::string_view key, std::string_view value) {
  const std::string k(trim(key));
  if (!default_config().contains(k)) {
    throw Error(ErrorCode::InvalidArgument, "unknown config key '" + k + "'", k);
  }
  config[k] = std::string(trim(value));
}

}  // namespace

ConfigMap parse_config_text(std::string_view text, ConfigMap into) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidArgument,
                  "config line " + std::to_string(line_no) + " is not of the form key = value");
    }
    set_key(into, line.substr(0, eq), line.substr(eq + 1));
  }
  return into;
}

void apply_override(ConfigMap& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::InvalidArgument,
                "override '" + std::string(assignment) + "' is not of the form key=value");
  }
  set_key(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

RunConfig resolve_config(const ConfigMap& config) {
  auto get = [&](const std::string& key) -> const std::string& { return config.at(key); };
  RunConfig rc;

  const std::int64_t levels = to_int("n", get("n"));
  if (levels < 1) {
    throw Error(ErrorCode::NonPositiveParameter, "config key 'n' must be at least 1", "n");
  }
  rc.params.levels = static_cast<std::size_t>(levels);
  rc.params.gamma = to_double("gamma", get("gamma"));
  rc.params.alpha_q = to_double("alpha_q", get("alpha_q"));
  rc.params.alpha_m = to_double("alpha_m", get("alpha_m"));
  rc.params.lambda_b = to_double("lambda_b", get("lambda_b"));
  rc.params.lambda_s = to_double("lambda_s", get("lambda_s"));
  validate_params(rc.params);

  rc.scaling.scale = to_double("scale_l", get("scale_l"));
  rc.scaling.delta = to_double("delta", get("delta"));
  rc.horizon = to_double("horizon_t", get("horizon_t"));
  rc.dtau = to_double("dtau", get("dtau"));
  rc.sample_dtau = to_double("sample_dtau", get("sample_dtau"));
  rc.tol = to_double("tol", get("tol"));
  rc.ode_tol = to_double("ode_tol", get("ode_tol"));
  rc.tie_tol = to_double("tie_tol", get("tie_tol"));
  for (const char* key : {"horizon_t", "dtau", "sample_dtau", "tol", "ode_tol", "tie_tol"}) {
    const double v = to_double(key, get(key));
    if (!(v > 0.0) || !std::isfinite(v)) bad_value(key, get(key), "must be a finite positive number");
  }

  rc.max_iter = to_int("max_iter", get("max_iter"));
  rc.replicas = to_int("replicas", get("replicas"));
  rc.n_samples = to_int("n_samples", get("n_samples"));
  rc.sample_gap = to_int("sample_gap", get("sample_gap"));
  for (const char* key : {"max_iter", "replicas", "n_samples", "sample_gap"}) {
    if (to_int(key, get(key)) < 1) bad_value(key, get(key), "must be at least 1");
  }
  rc.burn_in = to_int("burn_in", get("burn_in"));
  const std::int64_t threads = to_int("threads", get("threads"));
  if (threads < 0 || threads > 1024) bad_value("threads", get("threads"), "must be in [0, 1024]");
  rc.threads = static_cast<unsigned>(threads);

  rc.scales = to_list("l_list", get("l_list"));
  rc.seed = to_uint("seed", get("seed"));
  rc.out_dir = get("out_dir");

  const std::string& init = get("init");
  if (init == "fixed_point") {
    rc.init = FixedPointInit{};
  } else if (init == "equilibrium") {
    rc.init = EquilibriumInit{rc.burn_in};
  } else {
    const std::vector<double> values = to_list("init", init);
    if (values.size() != 2 * rc.params.levels) {
      bad_value("init", init, "explicit start needs 2n comma-separated values (x then y)");
    }
    for (double v : values) {
      if (!(v > 0.0) || !std::isfinite(v)) bad_value("init", init, "start values must be positive");
    }
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(rc.params.levels);
    rc.init = FluidState(std::vector<double>(values.begin(), mid),
                         std::vector<double>(mid, values.end()));
  }
  return rc;
}

}  // namespace lob
