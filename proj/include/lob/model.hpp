#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lob/error.hpp"

namespace lob {

/// Fluid-scale rates of the order-book model and the number of price levels.
struct ModelParams {
  std::size_t levels = 1;
  double gamma = 1.0;     // trade rate
  double alpha_q = 1.0;   // quit rate
  double alpha_m = 1.0;   // move rate
  double lambda_b = 1.0;  // buyer arrival rate (level 1)
  double lambda_s = 1.0;  // seller arrival rate (level N)

  /// Total drain rate of a resting trader, alpha_q + alpha_m.
  double drain() const noexcept { return alpha_q + alpha_m; }
};

/// Scale parameter L and physical time step delta.
struct ScalingConfig {
  double scale = 100.0;
  double delta = 1.0;
};

/// Per-step probabilities and Poisson means of the unscaled chain.
struct DiscreteParams {
  double p_trade = 0.0;
  double p_quit = 0.0;
  double p_move = 0.0;
  double mean_buyers = 0.0;
  double mean_sellers = 0.0;
};

/// Buyer/seller counts per price level; one state of the Markov chain.
struct LatticeState {
  std::vector<std::int64_t> buyers;
  std::vector<std::int64_t> sellers;

  LatticeState() = default;
  explicit LatticeState(std::size_t levels) : buyers(levels, 0), sellers(levels, 0) {}
  LatticeState(std::vector<std::int64_t> b, std::vector<std::int64_t> s);

  std::size_t levels() const noexcept { return buyers.size(); }
  friend bool operator==(const LatticeState&, const LatticeState&) = default;
};

/// Buyer/seller densities per price level.
struct FluidState {
  std::vector<double> x;
  std::vector<double> y;

  FluidState() = default;
  explicit FluidState(std::size_t levels) : x(levels, 0.0), y(levels, 0.0) {}
  FluidState(std::vector<double> x_, std::vector<double> y_);

  std::size_t levels() const noexcept { return x.size(); }
  friend bool operator==(const FluidState&, const FluidState&) = default;
};

/// Throws Error(NonPositiveParameter) or Error(ScaleTooSmall).
void validate_params(const ModelParams& params);
void validate_params(const ModelParams& params, const ScalingConfig& scaling);

DiscreteParams rescale_params(const ModelParams& params, const ScalingConfig& scaling);

/// Checks the invariants of a hand-built DiscreteParams (open-interval
/// probabilities, p_quit + p_move < 1, positive means).
void validate_discrete(const DiscreteParams& dp);

FluidState rescale_state(const LatticeState& state, double scale);

/// Round-half-up of scale * v componentwise.
LatticeState lattice_from_fluid(const FluidState& v, double scale);

/// Euclidean distance in R^N x R^N.
double distance(const FluidState& a, const FluidState& b);

/// Largest componentwise absolute difference.
double max_abs_difference(const FluidState& a, const FluidState& b);

/// Sampling grid {0, spacing, 2*spacing, ..., horizon}; the horizon is always
/// the last point even when it is not a multiple of the spacing.
std::vector<double> time_grid(double horizon, double spacing);

/// Chain step index floor(tau * L / delta) for the rescaled time tau. A
/// relative slack of 1e-9 absorbs round-off in tau (e.g. 0.29 * 100).
std::int64_t step_index(double tau, const ScalingConfig& scaling);

}  // namespace lob
