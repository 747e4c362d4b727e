#include <cmath>
#include <numeric>

#include "doctest.h"
#include "phasetype/distributions.hpp"
#include "phasetype/errors.hpp"
#include "phasetype/fit.hpp"

using namespace phasetype;

namespace {

SampleBatch draw_eme(int n, double lambda, double w, std::size_t count, std::uint64_t seed) {
  RandomStream rng(seed);
  return sample(EMEParams(n, lambda, w), count, rng);
}

}  // namespace

TEST_CASE("log-likelihood is the sum of log densities") {
  const SampleBatch d = draw_eme(2, 1.0, 3.0, 10000, 1);
  const EMEParams p(2, 1.2, 2.5);
  double direct = 0.0;
  for (double x : d.values) direct += log_pdf(p, x);
  CHECK(eme_log_likelihood(p, d.values) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("fit recovers parameters") {
  const SampleBatch d = draw_eme(2, 1.0, 4.0, 100000, 2);
  const EmeFit f = fit_eme_mle(d, 2);
  CHECK(f.params.n() == 2);
  CHECK(std::abs(f.params.lambda() - 1.0) <= 0.05);
  CHECK(std::abs(f.params.w() - 4.0) <= 0.4);
  CHECK(f.log_likelihood >= f.start_log_likelihood);
  CHECK(f.iterations > 0);
  // Any nearby point is no better.
  for (double dl : {-0.01, 0.01}) {
    for (double dw : {-0.01, 0.01}) {
      const EMEParams q(2, f.params.lambda() * (1 + dl), f.params.w() * (1 + dw));
      CHECK(eme_log_likelihood(q, d.values) <= f.log_likelihood + 1e-6);
    }
  }
}

TEST_CASE("fit with w below one") {
  const SampleBatch d = draw_eme(3, 2.0, 0.25, 50000, 3);
  const EmeFit f = fit_eme_mle(d, 3);
  CHECK(std::abs(f.params.lambda() - 2.0) <= 0.1);
  CHECK(std::abs(f.params.w() - 0.25) <= 0.05);
}

TEST_CASE("search over n identifies the mean of Erlang data") {
  RandomStream rng(4);
  const SampleBatch d = sample(ErlangParams(3, 1.0), 100000, rng);
  const EmeFit f = fit_eme_mle_search(d, 5);
  const double fitted_mean = (f.params.n() + f.params.w()) / f.params.lambda();
  CHECK(std::abs(fitted_mean - 3.0) <= 0.06);
  CHECK(f.params.n() >= 1);
  CHECK(f.params.n() <= 5);
}

TEST_CASE("fit errors") {
  CHECK_THROWS_AS(fit_eme_mle(SampleBatch{std::vector<double>(50, 2.5), ""}, 2), DegenerateData);
  CHECK_THROWS_AS(fit_eme_mle(SampleBatch{{1.0, 0.0, 2.0}, ""}, 1), InvalidParameter);
  CHECK_THROWS_AS(fit_eme_mle(SampleBatch{{}, ""}, 1), InvalidParameter);
  CHECK_THROWS_AS(fit_eme_mle(draw_eme(1, 1, 2, 100, 5), 0), InvalidParameter);
  FitOptions tight;
  tight.max_iterations = 2;
  CHECK_THROWS_AS(fit_eme_mle(draw_eme(2, 1, 4, 2000, 6), 2, tight), ConvergenceError);
}
