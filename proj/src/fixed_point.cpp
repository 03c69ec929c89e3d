#include "lob/fixed_point.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace lob {

std::string Regime::to_string() const {
  switch (kind) {
    case Kind::AllBuyDominant: return "AllBuyDominant";
    case Kind::AllSellDominant: return "AllSellDominant";
    case Kind::Crossing: return "Crossing(" + std::to_string(crossing_level) + ")";
    case Kind::Degenerate: {
      std::string out = "Degenerate(";
      for (std::size_t k = 0; k < tied_levels.size(); ++k) {
        if (k > 0) out += ' ';
        out += std::to_string(tied_levels[k]);
      }
      return out + ")";
    }
  }
  return "Unknown";
}

double solve_piecewise_scalar(double a, double g, double c, double r) {
  if (!(a > 0.0) || !(g > 0.0) || !(c >= 0.0) || !(r >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "solve_piecewise_scalar needs a > 0, g > 0, c >= 0, r >= 0");
  }
  const double below = r / (a + g);
  if (below <= c) return below;
  return (r - g * c) / a;
}

FluidState initial_iterate(const ModelParams& params) {
  validate_params(params);
  const std::size_t n = params.levels;
  FluidState v(n);
  const double drain = params.drain();
  v.y[n - 1] = params.lambda_s / drain;
  for (std::size_t i = n - 1; i-- > 0;) {
    v.y[i] = params.alpha_m * v.y[i + 1] / drain;
  }
  return v;
}

FluidState recursion_step(const ModelParams& params, const std::vector<double>& y_prev) {
  const std::size_t n = params.levels;
  if (y_prev.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "y_prev does not match the number of levels");
  }
  const double drain = params.drain();
  FluidState next(n);
  next.x[0] = solve_piecewise_scalar(drain, params.gamma, y_prev[0], params.lambda_b);
  for (std::size_t i = 1; i < n; ++i) {
    next.x[i] =
        solve_piecewise_scalar(drain, params.gamma, y_prev[i], params.alpha_m * next.x[i - 1]);
  }
  next.y[n - 1] = solve_piecewise_scalar(drain, params.gamma, next.x[n - 1], params.lambda_s);
  for (std::size_t i = n - 1; i-- > 0;) {
    next.y[i] =
        solve_piecewise_scalar(drain, params.gamma, next.x[i], params.alpha_m * next.y[i + 1]);
  }
  return next;
}

double residual(const std::vector<double>& x, const std::vector<double>& y,
                const ModelParams& params) {
  const std::size_t n = params.levels;
  if (x.size() != n || y.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "candidate does not match the number of levels");
  }
  const double drain = params.drain();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double traded = params.gamma * std::min(x[i], y[i]);
    const double buyer_inflow = i == 0 ? params.lambda_b : params.alpha_m * x[i - 1];
    const double seller_inflow = i + 1 == n ? params.lambda_s : params.alpha_m * y[i + 1];
    worst = std::max(worst, std::abs(buyer_inflow - drain * x[i] - traded));
    worst = std::max(worst, std::abs(seller_inflow - drain * y[i] - traded));
  }
  return worst;
}

Regime classify_regime(const std::vector<double>& x, const std::vector<double>& y,
                       double tie_tol) {
  if (x.size() != y.size() || x.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "x and y must be non-empty and of equal length");
  }
  const std::size_t n = x.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (x[i + 1] - x[i] > tie_tol || y[i] - y[i + 1] > tie_tol) {
      throw Error(ErrorCode::OrderingViolation,
                  "fixed point breaks the level ordering between levels " + std::to_string(i + 1) +
                      " and " + std::to_string(i + 2));
    }
  }

  Regime regime;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(x[i] - y[i]) <= tie_tol) regime.tied_levels.push_back(i + 1);
  }
  if (!regime.tied_levels.empty()) {
    regime.kind = Regime::Kind::Degenerate;
    return regime;
  }

  // x - y is decreasing in the level, so buyer-dominant levels form a prefix.
  std::size_t buyer_levels = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] > y[i]) ++buyer_levels;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if ((x[i] > y[i]) != (i < buyer_levels)) {
      throw Error(ErrorCode::OrderingViolation,
                  "buyer-dominant levels do not form a prefix of the book");
    }
  }
  if (buyer_levels == n) {
    regime.kind = Regime::Kind::AllBuyDominant;
  } else if (buyer_levels == 0) {
    regime.kind = Regime::Kind::AllSellDominant;
  } else {
    regime.kind = Regime::Kind::Crossing;
    regime.crossing_level = buyer_levels;
  }
  return regime;
}

FixedPointResult solve_fixed_point(const ModelParams& params, const FixedPointOptions& options) {
  validate_params(params);
  if (!(options.tol > 0.0) || options.max_iter < 1) {
    throw Error(ErrorCode::InvalidArgument, "solver needs tol > 0 and max_iter >= 1");
  }
  FixedPointResult result;
  FluidState current = initial_iterate(params);
  if (options.record_history) result.history.push_back(current);

  for (std::int64_t k = 1; k <= options.max_iter; ++k) {
    FluidState next = recursion_step(params, current.y);
    const double change = max_abs_difference(next, current);
#ifndef NDEBUG
    const double cap = params.lambda_b / params.drain();
    assert(next.x[0] <= cap * (1.0 + 1e-12));
#endif
    current = std::move(next);
    if (options.record_history) result.history.push_back(current);
    result.iterations = k;

    if (change < options.tol) {
      const double defect = residual(current, params);
      // Keep sweeping while the iterates still move; the residual lags the
      // step change by at most a factor of gamma.
      if (defect < 10.0 * options.tol || change == 0.0) {
        result.point = std::move(current);
        result.residual = defect;
        if (!(defect < 10.0 * options.tol)) {
          throw NoConvergenceError("fixed-point iterates stalled with residual " +
                                       std::to_string(defect),
                                   std::move(result));
        }
        result.regime = classify_regime(result.point.x, result.point.y, options.tie_tol);
        return result;
      }
    }
  }
  result.residual = residual(current, params);
  result.point = std::move(current);
  throw NoConvergenceError("fixed-point recursion hit max_iter=" +
                               std::to_string(options.max_iter),
                           std::move(result));
}

}  // namespace lob
