#include <doctest.h>

#include <cmath>

#include "lob/scaling.hpp"

using namespace lob;

namespace {

const ModelParams kAsymmetricSingle{.levels = 1,
                                    .gamma = 1.0,
                                    .alpha_q = 0.5,
                                    .alpha_m = 0.5,
                                    .lambda_b = 2.0,
                                    .lambda_s = 1.0};

const ModelParams kAsymmetricPair{.levels = 2,
                                  .gamma = 1.0,
                                  .alpha_q = 1.0,
                                  .alpha_m = 1.0,
                                  .lambda_b = 2.0,
                                  .lambda_s = 1.0};

// Replaces every draw by its mean, so the chain follows its expected update.
struct MeanSampler {
  double binomial(double n, double p) const { return n * p; }
  double poisson(double mean) const { return mean; }
};

}  // namespace

TEST_CASE("percentile interpolates between order statistics") {
  CHECK(percentile({3.0}, 0.5) == 3.0);
  CHECK(percentile({4.0, 1.0, 3.0, 2.0}, 0.5) == 2.5);
  CHECK(percentile({1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0}, 0.9) ==
        doctest::Approx(10.0));
  CHECK_THROWS_AS(percentile({}, 0.5), Error);
}

TEST_CASE("sup distance of a path against itself is zero") {
  RngStream rng(1, 0);
  const FluidTrajectory t = rescaled_trajectory(kAsymmetricPair, ScalingConfig{500.0, 1.0},
                                                FluidState({1.0, 0.2}, {0.3, 0.9}), 2.0, 0.01, rng);
  CHECK(sup_distance(t.states, t.states) == 0.0);
}

TEST_CASE("refining the grid can only raise the sup distance") {
  RngStream rng(2, 0);
  const ScalingConfig scaling{300.0, 1.0};
  const FluidState fp = solve_fixed_point(kAsymmetricPair).point;
  const FluidTrajectory fine = rescaled_trajectory(kAsymmetricPair, scaling, fp, 5.0, 0.005, rng);
  std::vector<FluidState> coarse;
  for (std::size_t k = 0; k < fine.states.size(); k += 2) coarse.push_back(fine.states[k]);
  const std::vector<FluidState> ref_fine(fine.states.size(), fp);
  const std::vector<FluidState> ref_coarse(coarse.size(), fp);
  CHECK(sup_distance(fine.states, ref_fine) >= sup_distance(coarse, ref_coarse));
}

TEST_CASE("mean dynamics track the fluid solution to O(1/L)") {
  // With every draw replaced by its mean the chain is an explicit scheme with
  // step 1/L for the fluid equations, so the gap must shrink like 1/L.
  const FluidState v0({1.2, 0.4}, {0.3, 0.9});
  const std::vector<double> grid = time_grid(5.0, 0.01);
  const std::vector<FluidState> reference =
      integrate_on_grid(v0, kAsymmetricPair, grid, 1e-3).states;

  auto mean_path_gap = [&](double L) {
    const ScalingConfig scaling{L, 1.0};
    const DiscreteParams dp = rescale_params(kAsymmetricPair, scaling);
    std::vector<double> b{v0.x[0] * L, v0.x[1] * L};
    std::vector<double> s{v0.y[0] * L, v0.y[1] * L};
    MeanSampler sampler;
    BasicStepBreakdown<double> scratch;
    std::vector<FluidState> path;
    std::int64_t t = 0;
    for (double tau : grid) {
      for (const std::int64_t target = step_index(tau, scaling); t < target; ++t) {
        apply_step(b, s, dp, sampler, scratch);
      }
      path.emplace_back(std::vector<double>{b[0] / L, b[1] / L},
                        std::vector<double>{s[0] / L, s[1] / L});
    }
    return sup_distance(path, reference);
  };

  const double coarse = mean_path_gap(1e3);
  const double fine = mean_path_gap(1e4);
  MESSAGE("mean-path gaps: L=1e3 " << coarse << ", L=1e4 " << fine);
  CHECK(coarse < 5.0 / 1e3);
  CHECK(fine < 5.0 / 1e4);
  CHECK(fine < coarse / 5.0);
}

TEST_CASE("huge L keeps the chain near the fixed point") {
  // Threshold checked against tests/calibration/pilot.txt (max over 20 replicas ~0.0036).
  RngStream rng(20240601, 0);
  const double d = sup_distance_run(kAsymmetricSingle, ScalingConfig{1e6, 1.0}, FixedPointInit{},
                                    1.0, 0.01, rng);
  MESSAGE("sup_dist at L=1e6: " << d);
  CHECK(d < 0.05);
}

TEST_CASE("explicit start compares against the fluid solution") {
  RngStream rng(5, 0);
  const FluidState v0({1.0, 1.0}, {1.0, 1.0});
  const double near = sup_distance_run(kAsymmetricPair, ScalingConfig{1e5, 1.0}, v0, 2.0, 0.01, rng);
  CHECK(near < 0.05);
}

TEST_CASE("single-record study summarizes to that record") {
  StudyConfig cfg;
  cfg.params = kAsymmetricPair;
  cfg.scales = {200.0};
  cfg.replicas = 1;
  cfg.horizon = 1.0;
  cfg.master_seed = 9;
  const StudyResult r = scaling_study(cfg);
  REQUIRE(r.records.size() == 1);
  REQUIRE(r.summary.size() == 1);
  CHECK(r.summary[0].median == r.records[0].sup_dist);
  CHECK(r.summary[0].p90 == r.records[0].sup_dist);
  CHECK(!r.log_log_slope.has_value());
  CHECK(r.records[0].seed_used == RngStream::derive_seed(9, study_stream_index(0, 0)));
}

TEST_CASE("study output is independent of thread count and reproducible") {
  StudyConfig cfg;
  cfg.params = kAsymmetricPair;
  cfg.scales = {100.0, 400.0};
  cfg.replicas = 6;
  cfg.horizon = 2.0;
  cfg.master_seed = 77;
  cfg.threads = 1;
  const StudyResult a = scaling_study(cfg);
  cfg.threads = 4;
  const StudyResult b = scaling_study(cfg);
  REQUIRE(a.records.size() == 12);
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].sup_dist == b.records[k].sup_dist);
    CHECK(a.records[k].seed_used == b.records[k].seed_used);
    CHECK(a.records[k].replica == static_cast<std::int64_t>(k % 6));
  }
  CHECK(a.log_log_slope.has_value());
  CHECK(*a.log_log_slope == *b.log_log_slope);
  cfg.master_seed = 78;
  CHECK(scaling_study(cfg).records[0].sup_dist != a.records[0].sup_dist);
}

TEST_CASE("study validates every scale") {
  StudyConfig cfg;
  cfg.params = kAsymmetricPair;
  cfg.scales = {1.5, 100.0};
  CHECK_THROWS_AS(scaling_study(cfg), Error);
  cfg.scales = {100.0, 50.0};
  CHECK_THROWS_AS(scaling_study(cfg), Error);
}

TEST_CASE("equilibrium init burns in from an empty book") {
  CHECK(burn_in_steps(EquilibriumInit{}, ScalingConfig{200.0, 1.0}) == 10000);
  CHECK(burn_in_steps(EquilibriumInit{7}, ScalingConfig{200.0, 1.0}) == 7);
  CHECK(burn_in_steps(FixedPointInit{}, ScalingConfig{200.0, 1.0}) == 0);
  RngStream rng(3, 0);
  const double d = sup_distance_run(kAsymmetricSingle, ScalingConfig{1e4, 1.0}, EquilibriumInit{},
                                    1.0, 0.01, rng);
  CHECK(d < 0.1);
}

TEST_CASE("equilibrium study: a single sample is the start state") {
  const ScalingConfig scaling{1000.0, 1.0};
  const FluidState fp = solve_fixed_point(kAsymmetricSingle).point;
  const LatticeState start = lattice_from_fluid(fp, scaling.scale);
  RngStream rng(4, 0);
  const EquilibriumStats s = equilibrium_study(kAsymmetricSingle, scaling, 0, 1, 10, rng, start);
  CHECK(s.mean == rescale_state(start, scaling.scale));
  CHECK(s.samples == 1);
  CHECK(s.std_error == FluidState(1));
}

TEST_CASE("equilibrium mean approaches the fixed point") {
  const ScalingConfig scaling{1000.0, 1.0};
  RngStream rng(6, 0);
  const EquilibriumStats s = equilibrium_study(kAsymmetricSingle, scaling, 50000, 500, 200, rng);
  MESSAGE("distance to fixed point at L=1e3: " << s.distance_to_fp);
  CHECK(s.distance_to_fp < 0.05);
  CHECK(s.fixed_point.x[0] == doctest::Approx(1.5));
}

TEST_CASE("doubling the sample count shrinks standard errors by about 1/sqrt(2)") {
  const ScalingConfig scaling{500.0, 1.0};
  RngStream a(8, 0), b(8, 1);
  const EquilibriumStats small = equilibrium_study(kAsymmetricSingle, scaling, 25000, 400, 1000, a);
  const EquilibriumStats large = equilibrium_study(kAsymmetricSingle, scaling, 25000, 800, 1000, b);
  const double ratio_x = large.std_error.x[0] / small.std_error.x[0];
  const double ratio_y = large.std_error.y[0] / small.std_error.y[0];
  MESSAGE("standard-error ratios: x " << ratio_x << ", y " << ratio_y);
  CHECK(std::abs(ratio_x - 1.0 / std::sqrt(2.0)) < 0.25 / std::sqrt(2.0));
  CHECK(std::abs(ratio_y - 1.0 / std::sqrt(2.0)) < 0.25 / std::sqrt(2.0));
}
