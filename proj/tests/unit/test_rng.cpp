#include <doctest.h>

#include <cmath>
#include <vector>

#include "lob/rng.hpp"

using lob::RngStream;

namespace {

double binomial_pmf(int n, double p, int k) {
  const double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(log_c + k * std::log(p) + (n - k) * std::log1p(-p));
}

double poisson_pmf(double mean, int k) {
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

// Pearson statistic over cells with expected count >= 5; the remaining tail
// mass is pooled into one extra cell.
template <class Pmf>
std::pair<double, int> chi_square(const std::vector<std::int64_t>& draws, int max_k, Pmf pmf) {
  const double n = static_cast<double>(draws.size());
  std::vector<double> observed(static_cast<std::size_t>(max_k) + 1, 0.0);
  for (auto d : draws) {
    if (d >= 0 && d <= max_k) observed[static_cast<std::size_t>(d)] += 1.0;
  }
  double stat = 0.0;
  int cells = 0;
  double pooled_obs = n, pooled_exp = n;
  for (int k = 0; k <= max_k; ++k) {
    const double e = n * pmf(k);
    if (e < 5.0) continue;
    const double o = observed[static_cast<std::size_t>(k)];
    stat += (o - e) * (o - e) / e;
    pooled_obs -= o;
    pooled_exp -= e;
    ++cells;
  }
  if (pooled_exp >= 5.0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  return {stat, cells - 1};
}

// Chi-square upper quantile at roughly 1e-4 via Wilson-Hilferty.
double chi_square_critical(int dof) {
  const double z = 3.72;
  const double k = dof;
  const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

}  // namespace

TEST_CASE("identical keys give identical streams") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.binomial(100, 0.3) == b.binomial(100, 0.3));
    CHECK(a.poisson(2.5) == b.poisson(2.5));
    CHECK(a.uniform() == b.uniform());
  }
}

TEST_CASE("stream seeds are fixed across platforms") {
  // splitmix64(0) is the published first output for seed 0.
  CHECK(lob::splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(RngStream::derive_seed(1, 2) == lob::splitmix64(lob::splitmix64(1) ^ 2));
  RngStream r(0, 0);
  CHECK(r.seed() == RngStream::derive_seed(0, 0));
}

TEST_CASE("distinct stream indices decorrelate") {
  RngStream a(42, 0), b(42, 1);
  double sum_ab = 0.0, sum_a = 0.0, sum_b = 0.0, sum_aa = 0.0, sum_bb = 0.0;
  const int n = 100000;
  int equal = 0;
  for (int i = 0; i < n; ++i) {
    const double u = a.uniform(), v = b.uniform();
    equal += u == v;
    sum_a += u;
    sum_b += v;
    sum_ab += u * v;
    sum_aa += u * u;
    sum_bb += v * v;
  }
  const double cov = sum_ab / n - (sum_a / n) * (sum_b / n);
  const double corr = cov / std::sqrt((sum_aa / n - sum_a * sum_a / n / n) *
                                      (sum_bb / n - sum_b * sum_b / n / n));
  CHECK(equal == 0);
  CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("binomial edge cases") {
  RngStream r(1, 1);
  CHECK(r.binomial(0, 0.5) == 0);
  CHECK(r.binomial(10, 0.0) == 0);
  CHECK(r.binomial(10, 1.0) == 10);
  CHECK(r.poisson(0.0) == 0);
  for (int i = 0; i < 1000; ++i) {
    const auto k = r.binomial(5, 0.9);
    CHECK((k >= 0 && k <= 5));
  }
}

TEST_CASE("binomial draws match the exact pmf") {
  struct Case {
    int n;
    double p;
  };
  for (const Case c : {Case{3, 0.02}, Case{20, 0.3}, Case{500, 0.05}, Case{3000, 0.4},
                       Case{40, 0.93}}) {
    RngStream r(2024, static_cast<std::uint64_t>(c.n));
    std::vector<std::int64_t> draws(100000);
    for (auto& d : draws) d = r.binomial(c.n, c.p);
    const auto [stat, dof] = chi_square(draws, c.n, [&](int k) { return binomial_pmf(c.n, c.p, k); });
    INFO("n=" << c.n << " p=" << c.p << " chi2=" << stat << " dof=" << dof);
    REQUIRE(dof >= 1);
    CHECK(stat < chi_square_critical(dof));
  }
}

TEST_CASE("poisson draws match the exact pmf") {
  for (double mean : {0.03, 0.7, 4.0, 25.0, 400.0}) {
    RngStream r(99, static_cast<std::uint64_t>(mean * 100));
    std::vector<std::int64_t> draws(100000);
    for (auto& d : draws) d = r.poisson(mean);
    const int max_k = static_cast<int>(mean + 12.0 * std::sqrt(mean) + 10.0);
    const auto [stat, dof] = chi_square(draws, max_k, [&](int k) { return poisson_pmf(mean, k); });
    INFO("mean=" << mean << " chi2=" << stat << " dof=" << dof);
    REQUIRE(dof >= 1);
    CHECK(stat < chi_square_critical(dof));
  }
}

TEST_CASE("uniform lies in [0,1)") {
  RngStream r(5, 5);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(lo < 1e-3);
  CHECK(hi > 1.0 - 1e-3);
}
