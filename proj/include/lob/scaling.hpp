#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "lob/fixed_point.hpp"
#include "lob/fluid.hpp"
#include "lob/markov.hpp"
#include "lob/model.hpp"
#include "lob/rng.hpp"

namespace lob {

inline constexpr double kDefaultSampleDtau = 0.01;

/// Start the chain at round(L * (x*, y*)) and compare against the constant
/// fixed point.
struct FixedPointInit {};

/// Start the chain from an empty book, discard `burn_in_steps` transitions,
/// then compare against the fixed point. A negative count means 50 * L.
struct EquilibriumInit {
  std::int64_t burn_in_steps = -1;
};

using StudyInit = std::variant<FluidState, FixedPointInit, EquilibriumInit>;

struct StudyConfig {
  ModelParams params;
  std::vector<double> scales;  // increasing L values
  std::int64_t replicas = 1;
  double horizon = 1.0;
  double sample_dtau = kDefaultSampleDtau;
  double delta = 1.0;
  double ode_dtau = kDefaultOdeStep;
  StudyInit init = FixedPointInit{};
  std::uint64_t master_seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct ScalingStudyRecord {
  double scale = 0.0;
  std::int64_t replica = 0;
  std::uint64_t seed_used = 0;
  double sup_dist = 0.0;
};

struct ScaleSummary {
  double scale = 0.0;
  double median = 0.0;
  double p90 = 0.0;
};

struct StudyResult {
  std::vector<ScalingStudyRecord> records;  // sorted by (scale index, replica)
  std::vector<ScaleSummary> summary;
  /// Least-squares slope of log(median) against log(L); needs two scales.
  std::optional<double> log_log_slope;
};

/// Stream index of run (scale_index, replica); distinct for every run.
constexpr std::uint64_t study_stream_index(std::size_t scale_index, std::int64_t replica) {
  return (static_cast<std::uint64_t>(scale_index) << 32) | static_cast<std::uint64_t>(replica);
}

/// Maximum pointwise Euclidean distance between two aligned state sequences.
double sup_distance(std::span<const FluidState> a, std::span<const FluidState> b);

/// Deterministic comparison path for `init` on `grid`: the fluid solution for
/// an explicit start, or the constant fixed point otherwise.
std::vector<FluidState> reference_path(const ModelParams& params, const StudyInit& init,
                                       std::span<const double> grid,
                                       double ode_dtau = kDefaultOdeStep);

/// Burn-in length in chain steps implied by `init` at this scale (0 unless
/// EquilibriumInit).
std::int64_t burn_in_steps(const StudyInit& init, const ScalingConfig& scaling);

/// One replica: sup over the tau grid of the distance between the rescaled
/// chain and its deterministic reference.
double sup_distance_run(const ModelParams& params, const ScalingConfig& scaling,
                        const StudyInit& init, double horizon, double sample_dtau, RngStream& rng,
                        double ode_dtau = kDefaultOdeStep);

/// Runs every (L, replica) pair, in parallel when threads allow. The output
/// depends only on the config.
StudyResult scaling_study(const StudyConfig& config);

/// Median and 90th percentile with linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

struct EquilibriumStats {
  FluidState mean;
  FluidState std_error;  // naive standard error, ignores autocorrelation
  FluidState fixed_point;
  double distance_to_fp = 0.0;
  std::int64_t samples = 0;
};

/// Time average of the rescaled chain after burn-in. The first sample is taken
/// right after burn-in, then one every `sample_gap` steps. `start` defaults to
/// the empty book.
EquilibriumStats equilibrium_study(const ModelParams& params, const ScalingConfig& scaling,
                                   std::int64_t burn_in, std::int64_t n_samples,
                                   std::int64_t sample_gap, RngStream& rng,
                                   const std::optional<LatticeState>& start = std::nullopt);

}  // namespace lob
