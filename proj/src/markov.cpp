#include "lob/markov.hpp"

#include <numeric>

namespace lob {

void StepTotals::add(const StepBreakdown& s) {
  auto sum = [](const std::vector<std::int64_t>& v) {
    return std::accumulate(v.begin(), v.end(), std::int64_t{0});
  };
  ++steps;
  trades += sum(s.trades);
  buyer_quits += sum(s.buyer_quits);
  buyer_moves += sum(s.buyer_moves);
  seller_quits += sum(s.seller_quits);
  seller_moves += sum(s.seller_moves);
  buyer_arrivals += s.buyer_arrivals;
  seller_arrivals += s.seller_arrivals;
  if (!s.buyer_moves.empty()) {
    buyer_exits_top += s.buyer_moves.back();
    seller_exits_bottom += s.seller_moves.front();
  }
}

std::pair<LatticeState, StepBreakdown> step(const LatticeState& state, const DiscreteParams& dp,
                                            RngStream& rng) {
  LatticeState next = state;
  StepBreakdown breakdown;
  apply_step(next.buyers, next.sellers, dp, rng, breakdown);
  return {std::move(next), std::move(breakdown)};
}

LatticeTrajectory simulate(const LatticeState& state0, const DiscreteParams& dp,
                           std::int64_t steps, RngStream& rng, std::int64_t sample_every,
                           const StepObserver& observer) {
  if (steps < 0 || sample_every < 1) {
    throw Error(ErrorCode::InvalidArgument, "simulate needs steps >= 0 and sample_every >= 1");
  }
  if (state0.levels() == 0 || state0.sellers.size() != state0.levels()) {
    throw Error(ErrorCode::DimensionMismatch, "initial state has no levels");
  }
  LatticeTrajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(state0);

  LatticeState current = state0;
  LatticeState before;
  StepBreakdown breakdown;
  for (std::int64_t t = 1; t <= steps; ++t) {
    if (observer) before = current;
    apply_step(current.buyers, current.sellers, dp, rng, breakdown);
    traj.totals.add(breakdown);
    if (observer) observer(before, breakdown, current);
    if (t % sample_every == 0 || t == steps) {
      traj.times.push_back(static_cast<double>(t));
      traj.states.push_back(current);
    }
  }
  return traj;
}

FluidTrajectory rescaled_trajectory(const ModelParams& params, const ScalingConfig& scaling,
                                    const LatticeState& u0, double horizon, double sample_dtau,
                                    RngStream& rng) {
  const DiscreteParams dp = rescale_params(params, scaling);
  if (u0.levels() != params.levels) {
    throw Error(ErrorCode::DimensionMismatch, "initial state does not match the number of levels");
  }
  const std::vector<double> grid = time_grid(horizon, sample_dtau);

  FluidTrajectory traj;
  traj.times.reserve(grid.size());
  traj.states.reserve(grid.size());

  LatticeState current = u0;
  StepBreakdown breakdown;
  std::int64_t t = 0;
  for (double tau : grid) {
    const std::int64_t target = step_index(tau, scaling);
    for (; t < target; ++t) {
      apply_step(current.buyers, current.sellers, dp, rng, breakdown);
      traj.totals.add(breakdown);
    }
    traj.times.push_back(tau);
    traj.states.push_back(rescale_state(current, scaling.scale));
  }
  return traj;
}

FluidTrajectory rescaled_trajectory(const ModelParams& params, const ScalingConfig& scaling,
                                    const FluidState& v0, double horizon, double sample_dtau,
                                    RngStream& rng) {
  if (v0.levels() != params.levels) {
    throw Error(ErrorCode::DimensionMismatch, "initial state does not match the number of levels");
  }
  return rescaled_trajectory(params, scaling, lattice_from_fluid(v0, scaling.scale), horizon,
                             sample_dtau, rng);
}

}  // namespace lob
