#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "phasetype/distributions.hpp"
#include "phasetype/errors.hpp"
#include "phasetype/gof.hpp"

using namespace phasetype;
using namespace phasetype::gof;

namespace {

SampleBatch exp_sample(std::size_t n, double rate, std::uint64_t seed) {
  RandomStream rng(seed);
  return sample(ExpParams(rate), n, rng);
}

}  // namespace

TEST_CASE("empirical laplace") {
  const SampleBatch d{{0.3, 1.2, 5.0}, ""};
  CHECK(empirical_laplace(d, 0.0) == 1.0);
  CHECK(empirical_laplace(SampleBatch{{0.0, 0.0}, ""}, 2.5) == 1.0);
  CHECK(empirical_laplace(SampleBatch{{1.0}, ""}, 1.0) == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK_THROWS_AS(empirical_laplace(d, -1.0), DomainError);
}

TEST_CASE("identity residual vanishes on the exponential transform") {
  for (int n : {1, 2, 5}) {
    for (double w : {0.5, 2.0, 4.0}) {
      GofConfig cfg;
      cfg.n = n;
      cfg.w = w;
      const double total = integrated_residual([](double t) { return 1.0 / (1.0 + t); }, cfg);
      CHECK(total <= 1e-20);
    }
  }
  GofConfig cfg;
  CHECK(integrated_residual([](double t) { return 1.0 / ((1.0 + t / 2) * (1.0 + t / 2)); }, cfg) > 1e-4);
}

TEST_CASE("statistic is scale invariant") {
  const SampleBatch d = exp_sample(300, 1.7, 3);
  GofConfig cfg;
  const double t = gof_statistic(d, cfg).statistic;
  CHECK(t >= 0.0);
  for (double s : {0.01, 3.0, 250.0}) {
    SampleBatch scaled = d;
    for (double& x : scaled.values) x *= s;
    CHECK(gof_statistic(scaled, cfg).statistic == doctest::Approx(t).epsilon(1e-12));
  }
  CHECK(gof_statistic(d, cfg).lambda_hat == doctest::Approx(1.7).epsilon(0.2));
}

TEST_CASE("fast statistic matches the direct reference") {
  for (std::size_t n : {50ul, 4096ul, 10000ul}) {
    const SampleBatch d = exp_sample(n, 1.0, 11 + n);
    for (double w : {0.5, 2.0, 3.5}) {
      GofConfig cfg;
      cfg.w = w;
      CHECK(gof_statistic(d, cfg).statistic ==
            doctest::Approx(reference::gof_statistic(d, cfg).statistic).epsilon(1e-10));
    }
  }
}

TEST_CASE("bootstrap is deterministic and matches the serial reference") {
  GofConfig cfg;
  cfg.bootstrap_reps = 99;
  const std::vector<double> a = bootstrap_replicates(120, cfg);
  const std::vector<double> b = bootstrap_replicates(120, cfg);
  CHECK(a == b);
  const std::vector<double> r = reference::bootstrap_replicates(120, cfg);
  REQUIRE(r.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(r[i]).epsilon(1e-10));
  const SampleBatch d = exp_sample(120, 2.0, 8);
  const GofResult x = gof_test(d, cfg);
  const GofResult y = reference::gof_test(d, cfg);
  CHECK(x.p_value == y.p_value);
  CHECK(x.reject == y.reject);
  cfg.seed += 1;
  CHECK(bootstrap_replicates(120, cfg) != a);
}

TEST_CASE("p value formula") {
  const std::vector<double> reps = {0.1, 0.5, 0.9, 1.3};
  CHECK(bootstrap_p_value(0.5, reps) == doctest::Approx(4.0 / 5.0));
  CHECK(bootstrap_p_value(2.0, reps) == doctest::Approx(1.0 / 5.0));
  CHECK(bootstrap_p_value(0.0, reps) == 1.0);
  GofConfig cfg;
  cfg.bootstrap_reps = 199;
  const GofResult r = gof_test(exp_sample(100, 1.0, 4), cfg);
  CHECK(r.p_value == bootstrap_p_value(r.statistic, r.replicates));
  CHECK(r.reject == (r.p_value <= cfg.level));
}

TEST_CASE("configuration errors") {
  GofConfig cfg;
  cfg.bootstrap_reps = 0;
  CHECK_THROWS_AS(gof_test(exp_sample(50, 1.0, 1), cfg), InvalidParameter);
  cfg = {};
  cfg.w = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  cfg = {};
  cfg.level = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  CHECK_THROWS_AS(gof_statistic(SampleBatch{{1.0, 0.0}, ""}, GofConfig{}), InvalidParameter);
  CHECK_THROWS_AS(gof_statistic(SampleBatch{{}, ""}, GofConfig{}), InvalidParameter);
}

TEST_CASE("residuals shrink under the null") {
  // Max |D(t_g)| for N = 10^6 exponential draws, 100 seeds; the grid sums are
  // formed here by the power recurrence to keep the run short.
  GofConfig cfg;
  const int G = cfg.grid_points;
  const double step = kGridUpper / G;
  int small = 0;
  const int runs = 100;
  for (int s = 0; s < runs; ++s) {
    RandomStream rng(1000 + s);
    const SampleBatch d = sample(ExpParams(0.5 + s % 3), 1000000, rng);
    double mean = 0.0;
    for (double x : d.values) mean += x;
    mean /= d.size();
    std::vector<double> st(G, 0.0), swt(G, 0.0);
    for (double x : d.values) {
      const double y = x / mean;
      const double q1 = std::exp(-step * y), q2 = std::exp(-cfg.w * step * y);
      double p1 = 1.0, p2 = 1.0;
      for (int g = 0; g < G; ++g) {
        p1 *= q1;
        p2 *= q2;
        st[g] += p1;
        swt[g] += p2;
      }
    }
    double worst = 0.0;
    for (int g = 0; g < G; ++g) {
      worst = std::max(worst, std::abs(identity_residual(st[g] / d.size(), swt[g] / d.size(), cfg.n, cfg.w)));
    }
    if (worst < 5e-3) ++small;
  }
  CHECK(small >= 95);
}

TEST_CASE("residual table") {
  GofConfig cfg;
  cfg.grid_points = 10;
  const auto rows = residual_table(exp_sample(500, 1.0, 2), cfg);
  REQUIRE(rows.size() == 10);
  CHECK(rows.front().first == doctest::Approx(1.0));
  CHECK(rows.back().first == doctest::Approx(10.0));
}

TEST_CASE("power against a heavy-tailed alternative") {
  std::mt19937_64 g(17);
  std::weibull_distribution<double> weib(0.5, 1.0);
  int rejections = 0;
  for (int r = 0; r < 20; ++r) {
    std::vector<double> x(200);
    for (double& v : x) v = weib(g);
    GofConfig cfg;
    cfg.bootstrap_reps = 199;
    cfg.seed = 40 + r;
    rejections += gof_test(SampleBatch{x, "weibull"}, cfg).reject ? 1 : 0;
  }
  CHECK(rejections >= 15);
}
