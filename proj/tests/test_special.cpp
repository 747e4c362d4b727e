#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "phasetype/errors.hpp"
#include "phasetype/special.hpp"

using namespace phasetype;

namespace {

// Direct evaluation of exp(-t) sum_{k<n} t^k / k! in long double.
double q_direct(int n, double t) {
  long double term = 1.0L, sum = 0.0L;
  for (int k = 0; k < n; ++k) {
    sum += term;
    term *= static_cast<long double>(t) / (k + 1);
  }
  return static_cast<double>(std::exp(-static_cast<long double>(t)) * sum);
}

}  // namespace

TEST_CASE("upper gamma: small cases") {
  for (double t : {0.0, 0.3, 1.0, 7.5, -2.0}) CHECK(regularized_upper_gamma_int(1, t) == doctest::Approx(std::exp(-t)).epsilon(1e-15));
  CHECK(regularized_upper_gamma_int(2, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(regularized_upper_gamma_int(2, 1.0) == doctest::Approx(0.735759).epsilon(1e-6));
  CHECK(regularized_upper_gamma_int(3, 0.0) == 1.0);
}

TEST_CASE("upper gamma agrees with direct summation") {
  for (int n : {1, 2, 3, 5, 10, 25}) {
    for (double t : {-5.0, -1.0, 0.01, 0.5, 2.0, 10.0, 30.0}) {
      CAPTURE(n);
      CAPTURE(t);
      CHECK(regularized_upper_gamma_int(n, t) == doctest::Approx(q_direct(n, t)).epsilon(1e-13));
    }
  }
}

TEST_CASE("lower gamma complements upper gamma and stays accurate near zero") {
  for (int n : {1, 2, 4, 8}) {
    for (double t : {0.5, 3.0, 12.0, 40.0}) {
      CHECK(regularized_lower_gamma_int(n, t) + regularized_upper_gamma_int(n, t) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  // P(n, t) ~ t^n / n! for small t, where 1 - Q would lose every digit.
  CHECK(regularized_lower_gamma_int(3, 1e-6) == doctest::Approx(1e-18 / 6.0).epsilon(1e-5));
  CHECK(regularized_lower_gamma_int(2, -1e-4) == doctest::Approx(0.5e-8).epsilon(1e-3));
  CHECK(regularized_lower_gamma_int(4, 0.0) == 0.0);
}

TEST_CASE("log forms carry sign and magnitude") {
  const SignedLog q = log_regularized_upper_gamma_int(3, -4.0);
  CHECK(q.sign == 1);
  CHECK(q.value() == doctest::Approx(q_direct(3, -4.0)).epsilon(1e-13));
  // n = 2, t = -3: 1 - Q = 1 - e^3 (1 - 3) = 1 + 2 e^3 > 0.
  const SignedLog p = log_regularized_lower_gamma_int(2, -3.0);
  CHECK(p.sign == 1);
  CHECK(p.value() == doctest::Approx(1.0 + 2.0 * std::exp(3.0)).epsilon(1e-13));
  // n = 1, t = -1: 1 - e = negative.
  CHECK(log_regularized_lower_gamma_int(1, -1.0).sign == -1);
  CHECK(log_regularized_lower_gamma_int(1, 0.0).sign == 0);
}

TEST_CASE("special function errors") {
  CHECK_THROWS_AS(regularized_upper_gamma_int(0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(regularized_lower_gamma_int(-1, 1.0), InvalidParameter);
  CHECK_THROWS_AS(regularized_upper_gamma_int(2, std::nan("")), DomainError);
  CHECK_THROWS_AS(regularized_upper_gamma_int(2, -800.0), std::overflow_error);
}
