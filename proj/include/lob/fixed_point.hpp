#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lob/model.hpp"

namespace lob {

inline constexpr double kDefaultFixedPointTolerance = 1e-12;
inline constexpr std::int64_t kDefaultFixedPointMaxIter = 1'000'000;
inline constexpr double kDefaultTieTolerance = 1e-9;

/// Which side dominates each level at the fixed point.
struct Regime {
  enum class Kind { AllBuyDominant, AllSellDominant, Crossing, Degenerate };

  Kind kind = Kind::Degenerate;
  /// Last buyer-dominant level (1-based) when kind == Crossing.
  std::size_t crossing_level = 0;
  /// Levels (1-based) with |x* - y*| <= tie tolerance when kind == Degenerate.
  std::vector<std::size_t> tied_levels;

  std::string to_string() const;
  friend bool operator==(const Regime&, const Regime&) = default;
};

struct FixedPointResult {
  FluidState point;
  double residual = 0.0;
  std::int64_t iterations = 0;
  Regime regime;
  /// (x^(k), y^(k)) for k = 0, 1, ...; only filled when requested.
  std::vector<FluidState> history;

  const std::vector<double>& x_star() const { return point.x; }
  const std::vector<double>& y_star() const { return point.y; }
};

/// Unique z >= 0 with a*z + g*min(z, c) = r, for a, g > 0 and c, r >= 0.
double solve_piecewise_scalar(double a, double g, double c, double r);

/// Starting iterate: x = 0 and y from the seller equations with the trade
/// terms switched off, i.e. a geometric profile decaying away from level N.
FluidState initial_iterate(const ModelParams& params);

/// One sweep of the monotone recursion: x forward from level 1 against the
/// previous y, then y backward from level N against the new x.
FluidState recursion_step(const ModelParams& params, const std::vector<double>& y_prev);

/// Max-norm defect of the 2N fixed-point equations at (x, y).
double residual(const std::vector<double>& x, const std::vector<double>& y,
                const ModelParams& params);
inline double residual(const FluidState& v, const ModelParams& params) {
  return residual(v.x, v.y, params);
}

/// Throws OrderingViolation when x is not decreasing or y not increasing
/// (beyond tie_tol).
Regime classify_regime(const std::vector<double>& x, const std::vector<double>& y,
                       double tie_tol = kDefaultTieTolerance);

struct FixedPointOptions {
  double tol = kDefaultFixedPointTolerance;
  std::int64_t max_iter = kDefaultFixedPointMaxIter;
  double tie_tol = kDefaultTieTolerance;
  bool record_history = false;
};

/// Iterates recursion_step from initial_iterate until the max componentwise
/// change drops below `tol`. Throws NoConvergenceError (carrying the best
/// iterate) when max_iter is reached.
FixedPointResult solve_fixed_point(const ModelParams& params, const FixedPointOptions& options = {});

class NoConvergenceError : public Error {
 public:
  NoConvergenceError(std::string message, FixedPointResult best)
      : Error(ErrorCode::NoConvergence, std::move(message)), best_(std::move(best)) {}
  const FixedPointResult& best() const noexcept { return best_; }

 private:
  FixedPointResult best_;
};

}  // namespace lob
