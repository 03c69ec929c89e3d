#include "lob/scaling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace lob {

double sup_distance(std::span<const FluidState> a, std::span<const FluidState> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "paths have different numbers of samples");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, distance(a[k], b[k]));
  return worst;
}

std::vector<FluidState> reference_path(const ModelParams& params, const StudyInit& init,
                                       std::span<const double> grid, double ode_dtau) {
  if (const auto* start = std::get_if<FluidState>(&init)) {
    return integrate_on_grid(*start, params, grid, ode_dtau).states;
  }
  const FluidState fp = solve_fixed_point(params).point;
  return std::vector<FluidState>(grid.size(), fp);
}

std::int64_t burn_in_steps(const StudyInit& init, const ScalingConfig& scaling) {
  const auto* eq = std::get_if<EquilibriumInit>(&init);
  if (eq == nullptr) return 0;
  if (eq->burn_in_steps >= 0) return eq->burn_in_steps;
  return static_cast<std::int64_t>(std::ceil(50.0 * scaling.scale));
}

namespace {

LatticeState chain_start(const ModelParams& params, const ScalingConfig& scaling,
                         const StudyInit& init, const FluidState* fixed_point) {
  if (const auto* start = std::get_if<FluidState>(&init)) {
    return lattice_from_fluid(*start, scaling.scale);
  }
  if (std::holds_alternative<FixedPointInit>(init)) {
    return lattice_from_fluid(*fixed_point, scaling.scale);
  }
  return LatticeState(params.levels);
}

double run_against(const ModelParams& params, const ScalingConfig& scaling, const StudyInit& init,
                   const std::vector<FluidState>& reference, double horizon, double sample_dtau,
                   RngStream& rng) {
  const DiscreteParams dp = rescale_params(params, scaling);
  LatticeState u0 = chain_start(params, scaling, init, &reference.front());
  if (const std::int64_t burn = burn_in_steps(init, scaling); burn > 0) {
    u0 = simulate(u0, dp, burn, rng, burn).states.back();
  }
  const FluidTrajectory path = rescaled_trajectory(params, scaling, u0, horizon, sample_dtau, rng);
  return sup_distance(path.states, reference);
}

}  // namespace

double sup_distance_run(const ModelParams& params, const ScalingConfig& scaling,
                        const StudyInit& init, double horizon, double sample_dtau, RngStream& rng,
                        double ode_dtau) {
  validate_params(params, scaling);
  const std::vector<double> grid = time_grid(horizon, sample_dtau);
  const std::vector<FluidState> reference = reference_path(params, init, grid, ode_dtau);
  return run_against(params, scaling, init, reference, horizon, sample_dtau, rng);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

StudyResult scaling_study(const StudyConfig& config) {
  validate_params(config.params);
  if (config.scales.empty() || config.replicas < 1) {
    throw Error(ErrorCode::InvalidArgument, "study needs at least one scale and one replica");
  }
  for (std::size_t k = 0; k < config.scales.size(); ++k) {
    validate_params(config.params, ScalingConfig{config.scales[k], config.delta});
    if (k > 0 && !(config.scales[k] > config.scales[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "scale list must be strictly increasing", "l_list");
    }
  }

  const std::vector<double> grid = time_grid(config.horizon, config.sample_dtau);
  const std::vector<FluidState> reference =
      reference_path(config.params, config.init, grid, config.ode_dtau);

  const auto replicas = static_cast<std::size_t>(config.replicas);
  const std::size_t total = config.scales.size() * replicas;
  StudyResult result;
  result.records.resize(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t scale_index = job / replicas;
      const auto replica = static_cast<std::int64_t>(job % replicas);
      const ScalingConfig scaling{config.scales[scale_index], config.delta};
      RngStream rng(config.master_seed, study_stream_index(scale_index, replica));
      try {
        const double d = run_against(config.params, scaling, config.init, reference,
                                     config.horizon, config.sample_dtau, rng);
        result.records[job] = {scaling.scale, replica, rng.seed(), d};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };

  unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::min<std::size_t>(total, 256)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> log_scale;
  std::vector<double> log_median;
  for (std::size_t k = 0; k < config.scales.size(); ++k) {
    std::vector<double> dists;
    dists.reserve(replicas);
    for (std::size_t r = 0; r < replicas; ++r) dists.push_back(result.records[k * replicas + r].sup_dist);
    ScaleSummary s{config.scales[k], percentile(dists, 0.5), percentile(dists, 0.9)};
    if (s.median > 0.0) {
      log_scale.push_back(std::log(s.scale));
      log_median.push_back(std::log(s.median));
    }
    result.summary.push_back(s);
  }
  if (log_scale.size() >= 2) {
    const double n = static_cast<double>(log_scale.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < log_scale.size(); ++k) {
      mx += log_scale[k];
      my += log_median[k];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < log_scale.size(); ++k) {
      sxy += (log_scale[k] - mx) * (log_median[k] - my);
      sxx += (log_scale[k] - mx) * (log_scale[k] - mx);
    }
    result.log_log_slope = sxy / sxx;
  }
  return result;
}

EquilibriumStats equilibrium_study(const ModelParams& params, const ScalingConfig& scaling,
                                   std::int64_t burn_in, std::int64_t n_samples,
                                   std::int64_t sample_gap, RngStream& rng,
                                   const std::optional<LatticeState>& start) {
  const DiscreteParams dp = rescale_params(params, scaling);
  if (burn_in < 0 || n_samples < 1 || sample_gap < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "equilibrium study needs burn_in >= 0, n_samples >= 1, sample_gap >= 1");
  }
  LatticeState state = start.value_or(LatticeState(params.levels));
  if (state.levels() != params.levels) {
    throw Error(ErrorCode::DimensionMismatch, "start state does not match the number of levels");
  }

  StepBreakdown scratch;
  auto advance = [&](std::int64_t steps) {
    for (std::int64_t t = 0; t < steps; ++t) apply_step(state.buyers, state.sellers, dp, rng, scratch);
  };
  advance(burn_in);

  const std::size_t n = params.levels;
  std::vector<double> sum(2 * n, 0.0);
  std::vector<double> sum_sq(2 * n, 0.0);
  for (std::int64_t k = 0; k < n_samples; ++k) {
    if (k > 0) advance(sample_gap);
    const FluidState v = rescale_state(state, scaling.scale);
    for (std::size_t i = 0; i < n; ++i) {
      sum[i] += v.x[i];
      sum_sq[i] += v.x[i] * v.x[i];
      sum[n + i] += v.y[i];
      sum_sq[n + i] += v.y[i] * v.y[i];
    }
  }

  EquilibriumStats stats;
  stats.samples = n_samples;
  stats.mean = FluidState(n);
  stats.std_error = FluidState(n);
  const double count = static_cast<double>(n_samples);
  for (std::size_t j = 0; j < 2 * n; ++j) {
    const double mean = sum[j] / count;
    const double var =
        n_samples > 1 ? std::max(0.0, (sum_sq[j] - count * mean * mean) / (count - 1.0)) : 0.0;
    const double se = std::sqrt(var / count);
    if (j < n) {
      stats.mean.x[j] = mean;
      stats.std_error.x[j] = se;
    } else {
      stats.mean.y[j - n] = mean;
      stats.std_error.y[j - n] = se;
    }
  }
  stats.fixed_point = solve_fixed_point(params).point;
  stats.distance_to_fp = distance(stats.mean, stats.fixed_point);
  return stats;
}

}  // namespace lob
