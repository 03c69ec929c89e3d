#include "lob/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lob {

void rhs_into(const FluidState& state, const ModelParams& params, FluidState& out) {
  const std::size_t n = params.levels;
  if (state.x.size() != n || state.y.size() != n || out.x.size() != n || out.y.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "state dimension does not match the number of levels");
  }
  const double drain = params.drain();
  for (std::size_t i = 0; i < n; ++i) {
    const double traded = params.gamma * std::min(state.x[i], state.y[i]);
    const double buyer_inflow = i == 0 ? params.lambda_b : params.alpha_m * state.x[i - 1];
    const double seller_inflow = i + 1 == n ? params.lambda_s : params.alpha_m * state.y[i + 1];
    out.x[i] = buyer_inflow - drain * state.x[i] - traded;
    out.y[i] = seller_inflow - drain * state.y[i] - traded;
  }
}

FluidState rhs(const FluidState& state, const ModelParams& params) {
  FluidState out(params.levels);
  rhs_into(state, params, out);
  return out;
}

namespace {

// RK4 stepper with preallocated stages.
class Rk4 {
 public:
  explicit Rk4(const ModelParams& params)
      : params_(params),
        k1_(params.levels),
        k2_(params.levels),
        k3_(params.levels),
        k4_(params.levels),
        tmp_(params.levels) {}

  void step(FluidState& v, double h) {
    rhs_into(v, params_, k1_);
    axpy(v, 0.5 * h, k1_, tmp_);
    rhs_into(tmp_, params_, k2_);
    axpy(v, 0.5 * h, k2_, tmp_);
    rhs_into(tmp_, params_, k3_);
    axpy(v, h, k3_, tmp_);
    rhs_into(tmp_, params_, k4_);
    const double w = h / 6.0;
    for (std::size_t i = 0; i < v.levels(); ++i) {
      v.x[i] += w * (k1_.x[i] + 2.0 * k2_.x[i] + 2.0 * k3_.x[i] + k4_.x[i]);
      v.y[i] += w * (k1_.y[i] + 2.0 * k2_.y[i] + 2.0 * k3_.y[i] + k4_.y[i]);
    }
    enforce_positivity(v);
  }

  // Advances v by `duration` using steps of at most `dtau`.
  void advance(FluidState& v, double duration, double dtau) {
    double remaining = duration;
    while (remaining > 0.0) {
      // Absorb a final sliver so round-off never produces a ~1e-17 step.
      const double h = remaining <= dtau * (1.0 + 1e-9) ? remaining : dtau;
      step(v, h);
      remaining = h == remaining ? 0.0 : remaining - h;
    }
  }

 private:
  static void axpy(const FluidState& v, double a, const FluidState& k, FluidState& out) {
    for (std::size_t i = 0; i < v.levels(); ++i) {
      out.x[i] = v.x[i] + a * k.x[i];
      out.y[i] = v.y[i] + a * k.y[i];
    }
  }

  static void enforce_positivity(FluidState& v) {
    double largest = 0.0;
    for (std::size_t i = 0; i < v.levels(); ++i) largest = std::max({largest, v.x[i], v.y[i]});
    const double slack = 1e-12 * largest;
    auto fix = [slack](double& c) {
      if (c >= 0.0) return;
      if (-c <= slack) {
        c = 0.0;
        return;
      }
      throw Error(ErrorCode::PositivityViolation,
                  "integration produced a negative component (" + std::to_string(c) +
                      "); reduce the step size");
    };
    for (std::size_t i = 0; i < v.levels(); ++i) {
      fix(v.x[i]);
      fix(v.y[i]);
    }
  }

  const ModelParams& params_;
  FluidState k1_, k2_, k3_, k4_, tmp_;
};

void check_initial(const FluidState& v0, const ModelParams& params) {
  validate_params(params);
  if (v0.x.size() != params.levels || v0.y.size() != params.levels) {
    throw Error(ErrorCode::DimensionMismatch, "initial state does not match the number of levels");
  }
  for (std::size_t i = 0; i < params.levels; ++i) {
    if (!(v0.x[i] > 0.0) || !(v0.y[i] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "initial fluid state must be strictly positive");
    }
  }
}

}  // namespace

OdeSolution integrate(const FluidState& v0, const ModelParams& params, double horizon,
                      double dtau, const FluidState* fixed_point, double convergence_tol) {
  check_initial(v0, params);
  if (!(horizon > 0.0) || !(dtau > 0.0) || !(dtau < horizon)) {
    throw Error(ErrorCode::InvalidArgument, "integrate needs 0 < dtau < horizon");
  }
  OdeSolution sol;
  const auto full_steps = static_cast<std::int64_t>(std::floor(horizon / dtau));
  sol.times.reserve(static_cast<std::size_t>(full_steps) + 2);
  sol.states.reserve(static_cast<std::size_t>(full_steps) + 2);
  sol.times.push_back(0.0);
  sol.states.push_back(v0);

  Rk4 stepper(params);
  FluidState v = v0;
  for (std::int64_t k = 1;; ++k) {
    const double t_prev = sol.times.back();
    double t_next = static_cast<double>(k) * dtau;
    if (t_next > horizon - 1e-9 * dtau) t_next = horizon;
    stepper.step(v, t_next - t_prev);
    sol.times.push_back(t_next);
    sol.states.push_back(v);
    if (t_next == horizon) break;
  }

  if (fixed_point != nullptr) {
    const double d = distance(v, *fixed_point);
    sol.final_distance_to_fp = d;
    sol.converged = d <= convergence_tol;
  }
  return sol;
}

OdeSolution integrate_on_grid(const FluidState& v0, const ModelParams& params,
                              std::span<const double> grid, double dtau) {
  check_initial(v0, params);
  if (grid.empty() || grid.front() != 0.0 || !(dtau > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "grid must start at 0 and dtau must be positive");
  }
  OdeSolution sol;
  sol.times.assign(grid.begin(), grid.end());
  sol.states.reserve(grid.size());
  sol.states.push_back(v0);

  Rk4 stepper(params);
  FluidState v = v0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double span = grid[k] - grid[k - 1];
    if (!(span > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "grid times must be strictly increasing");
    }
    stepper.advance(v, span, dtau);
    sol.states.push_back(v);
  }
  return sol;
}

FluidState find_fixed_point_by_integration(const ModelParams& params, const FluidState& v0,
                                           double tol, double dtau, double max_time) {
  check_initial(v0, params);
  if (!(tol > 0.0) || !(dtau > 0.0) || !(max_time > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tol, dtau and max_time must be positive");
  }
  Rk4 stepper(params);
  FluidState previous = v0;
  FluidState current = v0;
  double change = 0.0;
  for (double elapsed = 0.0; elapsed < max_time; elapsed += 1.0) {
    stepper.advance(current, 1.0, dtau);
    change = distance(current, previous);
    if (change < tol) return current;
    previous = current;
  }
  throw Error(ErrorCode::NoConvergence,
              "fluid trajectory did not settle within max_time=" + std::to_string(max_time) +
                  "; last unit-time change " + std::to_string(change));
}

}  // namespace lob
