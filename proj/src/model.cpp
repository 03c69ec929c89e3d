#include "lob/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lob {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::ScaleTooSmall: return "ScaleTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PositivityViolation: return "PositivityViolation";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::OrderingViolation: return "OrderingViolation";
  }
  return "Unknown";
}

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::NonPositiveParameter,
                std::string("parameter '") + name + "' must be a finite positive number, got " +
                    std::to_string(value),
                name);
  }
}

void require_probability(double value, const char* name) {
  if (!(value > 0.0 && value < 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(name) + " must lie in (0,1), got " + std::to_string(value), name);
  }
}

}  // namespace

LatticeState::LatticeState(std::vector<std::int64_t> b, std::vector<std::int64_t> s)
    : buyers(std::move(b)), sellers(std::move(s)) {
  if (buyers.size() != sellers.size()) {
    throw Error(ErrorCode::DimensionMismatch, "buyer and seller vectors differ in length");
  }
  for (std::size_t i = 0; i < buyers.size(); ++i) {
    if (buyers[i] < 0 || sellers[i] < 0) {
      throw Error(ErrorCode::InvalidArgument, "lattice counts must be non-negative");
    }
  }
}

FluidState::FluidState(std::vector<double> x_, std::vector<double> y_)
    : x(std::move(x_)), y(std::move(y_)) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "x and y vectors differ in length");
  }
}

void validate_params(const ModelParams& params) {
  if (params.levels < 1) {
    throw Error(ErrorCode::NonPositiveParameter, "number of levels must be at least 1", "n");
  }
  require_positive(params.gamma, "gamma");
  require_positive(params.alpha_q, "alpha_q");
  require_positive(params.alpha_m, "alpha_m");
  require_positive(params.lambda_b, "lambda_b");
  require_positive(params.lambda_s, "lambda_s");
}

void validate_params(const ModelParams& params, const ScalingConfig& scaling) {
  validate_params(params);
  require_positive(scaling.scale, "scale_l");
  require_positive(scaling.delta, "delta");
  // Per-step probabilities are rate * delta / L and must stay below one.
  const double gamma_step = params.gamma * scaling.delta;
  const double drain_step = params.drain() * scaling.delta;
  if (!(scaling.scale > gamma_step)) {
    throw Error(ErrorCode::ScaleTooSmall,
                "scale L=" + std::to_string(scaling.scale) + " must exceed gamma*delta=" +
                    std::to_string(gamma_step),
                "scale_l");
  }
  if (!(scaling.scale > drain_step)) {
    throw Error(ErrorCode::ScaleTooSmall,
                "scale L=" + std::to_string(scaling.scale) +
                    " must exceed (alpha_q+alpha_m)*delta=" + std::to_string(drain_step),
                "scale_l");
  }
}

DiscreteParams rescale_params(const ModelParams& params, const ScalingConfig& scaling) {
  validate_params(params, scaling);
  // One chain step spans delta / L units of fluid time. Arrivals stay O(1)
  // per step so that U / L has an O(1) inflow in fluid time.
  const double h = scaling.delta / scaling.scale;
  return DiscreteParams{
      .p_trade = params.gamma * h,
      .p_quit = params.alpha_q * h,
      .p_move = params.alpha_m * h,
      .mean_buyers = params.lambda_b * scaling.delta,
      .mean_sellers = params.lambda_s * scaling.delta,
  };
}

void validate_discrete(const DiscreteParams& dp) {
  require_probability(dp.p_trade, "p_trade");
  require_probability(dp.p_quit, "p_quit");
  require_probability(dp.p_move, "p_move");
  if (!(dp.p_quit + dp.p_move < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "p_quit + p_move must be below 1", "p_move");
  }
  require_positive(dp.mean_buyers, "mean_buyers");
  require_positive(dp.mean_sellers, "mean_sellers");
}

FluidState rescale_state(const LatticeState& state, double scale) {
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::NonPositiveParameter, "scale must be positive", "scale_l");
  }
  FluidState out(state.levels());
  for (std::size_t i = 0; i < state.levels(); ++i) {
    out.x[i] = static_cast<double>(state.buyers[i]) / scale;
    out.y[i] = static_cast<double>(state.sellers[i]) / scale;
  }
  return out;
}

LatticeState lattice_from_fluid(const FluidState& v, double scale) {
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::NonPositiveParameter, "scale must be positive", "scale_l");
  }
  auto round_half_up = [scale](double value) {
    if (!(value >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "fluid state components must be non-negative");
    }
    return static_cast<std::int64_t>(std::floor(value * scale + 0.5));
  };
  LatticeState out(v.levels());
  for (std::size_t i = 0; i < v.levels(); ++i) {
    out.buyers[i] = round_half_up(v.x[i]);
    out.sellers[i] = round_half_up(v.y[i]);
  }
  return out;
}

namespace {
void require_same_levels(const FluidState& a, const FluidState& b) {
  if (a.x.size() != b.x.size() || a.y.size() != b.y.size() || a.x.size() != a.y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "fluid states have different level counts");
  }
}
}  // namespace

double distance(const FluidState& a, const FluidState& b) {
  require_same_levels(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.levels(); ++i) {
    const double dx = a.x[i] - b.x[i];
    const double dy = a.y[i] - b.y[i];
    sum += dx * dx + dy * dy;
  }
  return std::sqrt(sum);
}

double max_abs_difference(const FluidState& a, const FluidState& b) {
  require_same_levels(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.levels(); ++i) {
    worst = std::max({worst, std::abs(a.x[i] - b.x[i]), std::abs(a.y[i] - b.y[i])});
  }
  return worst;
}

std::vector<double> time_grid(double horizon, double spacing) {
  if (!(horizon >= 0.0) || !(spacing > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "time grid needs horizon >= 0 and spacing > 0");
  }
  std::vector<double> grid;
  for (std::int64_t k = 0;; ++k) {
    const double tau = static_cast<double>(k) * spacing;
    if (tau >= horizon - 1e-9 * spacing) break;
    grid.push_back(tau);
  }
  grid.push_back(horizon);
  return grid;
}

std::int64_t step_index(double tau, const ScalingConfig& scaling) {
  const double raw = tau * scaling.scale / scaling.delta;
  return static_cast<std::int64_t>(std::floor(raw + 1e-9 * std::max(1.0, raw)));
}

}  // namespace lob
