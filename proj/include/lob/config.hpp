#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lob/model.hpp"
#include "lob/scaling.hpp"

namespace lob {

/// Ordered key -> raw value map. Later assignments win.
using ConfigMap = std::map<std::string, std::string>;

/// Every key the CLI understands, with its default value.
const ConfigMap& default_config();

/// Parses "key = value" lines; '#' starts a comment. Throws
/// Error(InvalidArgument) on malformed lines or unknown keys.
ConfigMap parse_config_text(std::string_view text, ConfigMap into = default_config());

/// Applies a single "key=value" override.
void apply_override(ConfigMap& config, std::string_view assignment);

/// Typed view of a resolved ConfigMap.
struct RunConfig {
  ModelParams params;
  ScalingConfig scaling;
  double horizon = 10.0;
  double dtau = kDefaultOdeStep;
  double sample_dtau = kDefaultSampleDtau;
  double tol = kDefaultFixedPointTolerance;
  double ode_tol = kDefaultOdeTolerance;
  double tie_tol = kDefaultTieTolerance;
  std::int64_t max_iter = kDefaultFixedPointMaxIter;
  std::int64_t replicas = 50;
  std::vector<double> scales;
  StudyInit init = FixedPointInit{};
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::int64_t burn_in = -1;
  std::int64_t n_samples = 1000;
  std::int64_t sample_gap = 100;
  unsigned threads = 0;
};

/// Converts and range-checks every key; throws Error naming the bad key.
RunConfig resolve_config(const ConfigMap& config);

}  // namespace lob
