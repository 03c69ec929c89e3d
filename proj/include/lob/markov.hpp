#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <vector>

#include "lob/model.hpp"
#include "lob/rng.hpp"

namespace lob {

/// Everything that happened at each level during one step of the chain.
template <class Count>
struct BasicStepBreakdown {
  std::vector<Count> trades;
  std::vector<Count> buyer_quits;
  std::vector<Count> buyer_moves;
  std::vector<Count> seller_quits;
  std::vector<Count> seller_moves;
  Count buyer_arrivals{};
  Count seller_arrivals{};

  void resize(std::size_t levels) {
    for (auto* v : {&trades, &buyer_quits, &buyer_moves, &seller_quits, &seller_moves}) {
      v->assign(levels, Count{});
    }
    buyer_arrivals = Count{};
    seller_arrivals = Count{};
  }
};

using StepBreakdown = BasicStepBreakdown<std::int64_t>;

/// Aggregate event counts over a run.
struct StepTotals {
  std::int64_t steps = 0;
  std::int64_t trades = 0;
  std::int64_t buyer_quits = 0;
  std::int64_t buyer_moves = 0;
  std::int64_t seller_quits = 0;
  std::int64_t seller_moves = 0;
  std::int64_t buyer_arrivals = 0;
  std::int64_t seller_arrivals = 0;
  // Boundary movers: buyers moving up from level N, sellers moving down from level 1.
  std::int64_t buyer_exits_top = 0;
  std::int64_t seller_exits_bottom = 0;

  void add(const StepBreakdown& step);
};

template <class Sampler, class Count>
concept VariateSource = requires(Sampler& s, Count n, double p) {
  { s.binomial(n, p) } -> std::convertible_to<Count>;
  { s.poisson(p) } -> std::convertible_to<Count>;
};

/// One transition of the chain applied in place to (buyers, sellers).
///
/// Draw order, fixed so that runs are reproducible: for each level ascending,
/// the trade count, then the seller quit/move split, then the buyer quit/move
/// split; after all levels, buyer arrivals and then seller arrivals. A quit/move
/// split is Binomial(survivors, p_quit) quitters followed by
/// Binomial(survivors - quitters, p_move / (1 - p_quit)) movers, which is the
/// Multinomial(survivors; p_quit, p_move, rest) law.
///
/// Buyers move up a level and sellers move down; movers off either end of the
/// book leave the market.
template <class Count, class Sampler>
  requires VariateSource<Sampler, Count>
void apply_step(std::vector<Count>& buyers, std::vector<Count>& sellers, const DiscreteParams& dp,
                Sampler& sampler, BasicStepBreakdown<Count>& out) {
  const std::size_t n = buyers.size();
  out.resize(n);
  const double p_move_given_stay = dp.p_move / (1.0 - dp.p_quit);

  for (std::size_t i = 0; i < n; ++i) {
    const Count matched = sampler.binomial(std::min(buyers[i], sellers[i]), dp.p_trade);
    out.trades[i] = matched;

    const Count seller_rest = sellers[i] - matched;
    out.seller_quits[i] = sampler.binomial(seller_rest, dp.p_quit);
    out.seller_moves[i] = sampler.binomial(seller_rest - out.seller_quits[i], p_move_given_stay);

    const Count buyer_rest = buyers[i] - matched;
    out.buyer_quits[i] = sampler.binomial(buyer_rest, dp.p_quit);
    out.buyer_moves[i] = sampler.binomial(buyer_rest - out.buyer_quits[i], p_move_given_stay);
  }
  out.buyer_arrivals = sampler.poisson(dp.mean_buyers);
  out.seller_arrivals = sampler.poisson(dp.mean_sellers);

  for (std::size_t i = 0; i < n; ++i) {
    buyers[i] -= out.trades[i] + out.buyer_quits[i] + out.buyer_moves[i];
    sellers[i] -= out.trades[i] + out.seller_quits[i] + out.seller_moves[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    buyers[i + 1] += out.buyer_moves[i];
    sellers[i] += out.seller_moves[i + 1];
  }
  buyers.front() += out.buyer_arrivals;
  sellers.back() += out.seller_arrivals;
}

/// Raw chain states sampled at integer step times.
struct LatticeTrajectory {
  std::vector<double> times;
  std::vector<LatticeState> states;
  StepTotals totals;
};

/// Rescaled states V(tau) = U(floor(tau L / delta)) / L on a tau grid.
struct FluidTrajectory {
  std::vector<double> times;
  std::vector<FluidState> states;
  StepTotals totals;
};

using StepObserver =
    std::function<void(const LatticeState& before, const StepBreakdown&, const LatticeState& after)>;

std::pair<LatticeState, StepBreakdown> step(const LatticeState& state, const DiscreteParams& dp,
                                            RngStream& rng);

/// Runs `steps` transitions, recording t = 0, every `sample_every` steps, and
/// the final state. The observer, if set, sees every transition.
LatticeTrajectory simulate(const LatticeState& state0, const DiscreteParams& dp,
                           std::int64_t steps, RngStream& rng, std::int64_t sample_every = 1,
                           const StepObserver& observer = {});

/// Rescaled chain started from round-half-up(L * v0), sampled on
/// time_grid(horizon, sample_dtau).
FluidTrajectory rescaled_trajectory(const ModelParams& params, const ScalingConfig& scaling,
                                    const FluidState& v0, double horizon, double sample_dtau,
                                    RngStream& rng);

/// Same, starting from an explicit lattice state.
FluidTrajectory rescaled_trajectory(const ModelParams& params, const ScalingConfig& scaling,
                                    const LatticeState& u0, double horizon, double sample_dtau,
                                    RngStream& rng);

}  // namespace lob
