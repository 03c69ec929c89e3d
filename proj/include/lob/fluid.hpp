#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lob/model.hpp"

namespace lob {

inline constexpr double kDefaultOdeStep = 1e-3;
inline constexpr double kDefaultOdeTolerance = 1e-9;
inline constexpr double kDefaultOdeMaxTime = 1e4;

/// Fluid trajectory produced by the integrator.
struct OdeSolution {
  std::vector<double> times;
  std::vector<FluidState> states;
  bool converged = false;
  std::optional<double> final_distance_to_fp;

  const FluidState& final_state() const { return states.back(); }
};

/// Time derivative of the fluid system at `state`, returned as (dx, dy) in a
/// FluidState-shaped container:
///
///   dx_1 = lambda_b - (aq+am) x_1 - g min(x_1, y_1)
///   dx_i = am x_{i-1} - (aq+am) x_i - g min(x_i, y_i)          1 < i <= N
///   dy_i = am y_{i+1} - (aq+am) y_i - g min(x_i, y_i)          1 <= i < N
///   dy_N = lambda_s - (aq+am) y_N - g min(x_N, y_N)
FluidState rhs(const FluidState& state, const ModelParams& params);

/// Allocation-free variant; `out` must already have the right size.
void rhs_into(const FluidState& state, const ModelParams& params, FluidState& out);

/// Fixed-step classical RK4 from tau = 0 to `horizon`; the last step is
/// shortened to land exactly on the horizon. Every accepted step is recorded.
///
/// Negative components no larger than 1e-12 times the largest component are
/// clamped to zero; anything larger raises PositivityViolation.
///
/// When `fixed_point` is given, `final_distance_to_fp` is filled in and
/// `converged` is set when that distance is at most `convergence_tol`.
OdeSolution integrate(const FluidState& v0, const ModelParams& params, double horizon,
                      double dtau = kDefaultOdeStep, const FluidState* fixed_point = nullptr,
                      double convergence_tol = kDefaultOdeTolerance);

/// Same integrator, but only the states at the requested (increasing) grid
/// times are kept. The grid must start at 0.
OdeSolution integrate_on_grid(const FluidState& v0, const ModelParams& params,
                              std::span<const double> grid, double dtau = kDefaultOdeStep);

/// Integrates in unit-time chunks until two states one time unit apart are
/// within `tol` (Euclidean), then returns the later one. Throws NoConvergence
/// if `max_time` is exhausted first.
FluidState find_fixed_point_by_integration(const ModelParams& params, const FluidState& v0,
                                           double tol = kDefaultOdeTolerance,
                                           double dtau = kDefaultOdeStep,
                                           double max_time = kDefaultOdeMaxTime);

}  // namespace lob
