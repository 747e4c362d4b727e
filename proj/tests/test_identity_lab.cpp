#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "phasetype/errors.hpp"
#include "phasetype/identity_lab.hpp"

using namespace phasetype;
using namespace phasetype::identity;

namespace {

RationalScalar q(long a, long b = 1) { return make_rational(a, b); }

}  // namespace

TEST_CASE("rationals and binomials") {
  CHECK(q(6, -4) == q(-3, 2));
  CHECK(q(6, -4).get_den() == 2);
  CHECK_THROWS_AS(make_rational(1, 0), InvalidParameter);
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(3, 4) == 0);
  CHECK(binomial(3, -1) == 0);
  CHECK(binomial(0, 0) == 1);
  CHECK(v_from_w(q(3)) == q(3, 2));
  CHECK(v_from_w(q(1, 2)) == -1);
  CHECK_THROWS_AS(v_from_w(q(1)), InvalidParameter);
}

TEST_CASE("lemma1 residual") {
  // n=1, w=2, lambda=1, t=1: Phi_1 = 1/3, Phi_2 = 1/4.
  CHECK(lemma1_residual(1, 2.0, 1.0, 1.0).absolute <= 1e-16);
  for (int n : {1, 3, 7}) {
    for (double w : {0.3, 2.0, 6.0}) CHECK(lemma1_residual(n, w, 1.7, 0.0).relative() <= 1e-14);
  }
  CHECK_THROWS_AS(lemma1_residual(0, 2.0, 1.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(lemma1_residual(1, 1.0, 1.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(lemma1_residual(1, 2.0, 1.0, -1.0), DomainError);
}

TEST_CASE("decomposition residual") {
  CHECK(decomposition_residual(2.0, 1.0).absolute <= 1e-16);
  CHECK(decomposition_residual(3.0, 0.0).absolute == 0.0);
  CHECK_THROWS_AS(decomposition_residual(-1.0, 1.0), InvalidParameter);
}

TEST_CASE("scaled identity agrees with lemma1 form") {
  for (int n = 1; n <= 10; ++n) {
    for (double w : {0.1, 0.5, 1.5, 2.0, 5.0, 10.0}) {
      for (double t : {0.0, 0.5, 3.0, 20.0}) {
        CHECK(scaled_identity_residual(n, w, 1.0, t).relative() <= 1e-12);
        CHECK(lemma1_residual(n, w, 1.0, t).relative() <= 1e-12);
      }
    }
  }
}

TEST_CASE("functional equation residual") {
  const PsiEvaluator exp1 = [](double t) { return 1.0 + t; };
  CHECK(functional_eq_residual(2, 2.0, exp1, 1.0).absolute <= 1e-14);
  // Psi(0) = 1 always gives a zero residual at t = 0.
  const PsiEvaluator other = [](double t) { return std::cosh(t) + t * t; };
  for (int n : {1, 4}) CHECK(functional_eq_residual(n, 3.0, other, 0.0).absolute <= 1e-13);
  // Erlang(2, 1): Psi = (1 + t)^2, not exponential.
  const PsiEvaluator erlang2 = [](double t) { return (1.0 + t) * (1.0 + t); };
  CHECK(functional_eq_residual(1, 2.0, erlang2, 1.0).absolute > 0.05);
}

TEST_CASE("lemma2 (i) is zero") {
  CHECK(lemma2_i(2, 1, q(2)) == 0);
  for (long a : {-7L, 3L, 11L}) CHECK(lemma2_i(1, 1, q(a, 5)) == 0);
  CHECK(lemma2_i(5, 3, q(-3, 7)) == 0);
  CHECK_THROWS_AS(lemma2_i(0, 1, q(2)), InvalidParameter);
  CHECK_THROWS_AS(lemma2_i(2, 1, q(1)), InvalidParameter);
}

TEST_CASE("lemma2 (ii) equals its closed form") {
  CHECK(lemma2_ii(1, 2, q(2)) == 2);
  CHECK(lemma2_ii_closed_form(1, 2, q(2)) == 2);
  CHECK(lemma2_ii(2, 2, q(2)) == 6);
  CHECK(lemma2_ii_closed_form(2, 2, q(2)) == 6);
  for (int n = 1; n <= 12; ++n) {
    for (int j = 2; j <= 6; ++j) {
      for (const RationalScalar& v : {q(-5, 3), q(7, 2), q(1, 9), q(-1)}) {
        CHECK(lemma2_ii(n, j, v) == lemma2_ii_closed_form(n, j, v));
      }
    }
  }
  // v = -1, n even: v^n = 1 and the quantity vanishes.
  CHECK(lemma2_ii(4, 3, q(-1)) == 0);
  CHECK(lemma2_ii(3, 3, q(-1)) != 0);
  CHECK_THROWS_AS(lemma2_ii(2, 1, q(2)), InvalidParameter);
  CHECK_THROWS_AS(lemma2_ii(2, 2, q(0)), InvalidParameter);
}

TEST_CASE("shifted form: residual is -C(m, j)") {
  // Brute force of both sides with plain loops over the rationals.
  auto brute = [](int n, int m, int j, const RationalScalar& v) {
    RationalScalar lhs = 0, vk = 1;
    for (int k = 0; k < n; ++k) {
      lhs += v * RationalScalar(binomial(k + m, j - 1)) * vk + (v - 1) * RationalScalar(binomial(k + m, j)) * vk;
      vk *= v;
    }
    return RationalScalar(lhs - RationalScalar(binomial(n + m, j)) * vk);
  };
  CHECK(lemma2_remark(3, 2, 2, q(5, 2)) == brute(3, 2, 2, q(5, 2)));
  CHECK(lemma2_remark(3, 2, 2, q(5, 2)) == -1);
  CHECK(lemma2_remark(1, 4, 3, q(-2)) == brute(1, 4, 3, q(-2)));
  CHECK(lemma2_remark(1, 4, 3, q(-2)) == -4);
  for (int n = 1; n <= 8; ++n) {
    for (int m = 0; m <= 5; ++m) {
      for (int j = 1; j <= n + m; ++j) {
        for (const RationalScalar& v : {q(-3, 4), q(9, 5)}) {
          if (m == 0) CHECK(lemma2_remark(n, m, j, v) == lemma2_i(n, j, v));
          CHECK(lemma2_remark(n, m, j, v) == -RationalScalar(binomial(m, j)));
          CHECK(lemma2_remark_corrected(n, m, j, v) == 0);
          if (j > m) CHECK(lemma2_remark(n, m, j, v) == 0);
        }
      }
    }
  }
  CHECK_THROWS_AS(lemma2_remark(2, -1, 1, q(2)), InvalidParameter);
}

TEST_CASE("brackets") {
  const BracketPair a = brackets(2, 2, q(2));
  CHECK(a.a1_bracket == 0);
  CHECK(a.aj_bracket == -6);
  CHECK(brackets(3, 2, q(3, 2)).a1_bracket == 0);
  CHECK(brackets(2, 3, q(2)).a1_bracket == 0);
  for (int n = 2; n <= 10; ++n) {
    for (int j = 2; j <= 12; ++j) {
      for (const RationalScalar& w : {q(1, 5), q(3, 2), q(2), q(5)}) {
        const BracketPair b = brackets(n, j, v_from_w(w));
        CHECK(b.a1_bracket == 0);
        CHECK(b.aj_bracket != 0);
        CHECK(b.aj_bracket == -lemma2_ii(n, j, v_from_w(w)));
      }
    }
  }
  // w = 1/2 gives v = -1: aj_bracket vanishes for even n.
  CHECK(brackets(4, 2, v_from_w(q(1, 2))).aj_bracket == 0);
  CHECK(brackets(5, 2, v_from_w(q(1, 2))).aj_bracket != 0);
  CHECK_THROWS_AS(brackets(1, 2, q(2)), InvalidParameter);
}

TEST_CASE("psi coefficients from exponential moments") {
  for (double lambda : {0.5, 1.0, 3.0}) {
    std::vector<double> m(8);
    double mk = 1.0;
    for (int k = 1; k <= 8; ++k) {
      mk *= k / lambda;
      m[static_cast<std::size_t>(k - 1)] = mk;
    }
    const PsiSeries s = psi_coeffs_from_moments(m, 8);
    REQUIRE(s.coeffs.size() == 9);
    CHECK(s.coeffs[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(s.coeffs[1] - 1.0 / lambda) <= 1e-12);
    for (int j = 2; j <= 8; ++j) CHECK(std::abs(s.coeffs[static_cast<std::size_t>(j)]) < 1e-10);
    CHECK(s(0.7) == doctest::Approx(1.0 + 0.7 / lambda).epsilon(1e-10));
  }
  CHECK(psi_coeffs_from_moments({}, 0).coeffs == std::vector<double>{1.0});
  const std::vector<double> two = {1.0, 2.0};
  CHECK_THROWS_AS(psi_coeffs_from_moments(two, 3), std::length_error);
}

TEST_CASE("psi coefficients agree with exact long division") {
  // Erlang(2, 1): m_k = (k+1)!; the reciprocal transform is (1 + t)^2.
  const int order = 12;
  std::vector<double> m;
  std::vector<mpq_class> mq = {1};
  mpq_class fact = 1;
  for (int k = 1; k <= order; ++k) {
    fact *= (k + 1);
    m.push_back(fact.get_d());
    mq.push_back(fact);
  }
  const std::vector<mpq_class> expect = oracle::reciprocal_series(oracle::laplace_coeffs(mq), order);
  CHECK(expect[0] == 1);
  CHECK(expect[1] == 2);
  CHECK(expect[2] == 1);
  for (int j = 3; j <= order; ++j) CHECK(expect[static_cast<std::size_t>(j)] == 0);
  const PsiSeries s = psi_coeffs_from_moments(m, order);
  for (int j = 0; j <= order; ++j) {
    CHECK(std::abs(s.coeffs[static_cast<std::size_t>(j)] - expect[static_cast<std::size_t>(j)].get_d()) <= 1e-9);
  }

  // Uniform[0, 1]: m_k = 1/(k+1). Compare to exact rational division and to
  // t / (1 - exp(-t)) inside the radius of convergence 2 pi.
  const int uorder = 40;
  std::vector<double> um;
  std::vector<mpq_class> umq = {1};
  for (int k = 1; k <= uorder; ++k) {
    um.push_back(1.0 / (k + 1));
    umq.push_back(mpq_class(1, k + 1));
  }
  const std::vector<mpq_class> uexp = oracle::reciprocal_series(oracle::laplace_coeffs(umq), uorder);
  const PsiSeries us = psi_coeffs_from_moments(um, uorder);
  for (int j = 0; j <= uorder; ++j) {
    // Odd coefficients beyond a_1 vanish exactly; the rest decay like (2 pi)^-j.
    const double want = uexp[static_cast<std::size_t>(j)].get_d();
    CHECK(std::abs(us.coeffs[static_cast<std::size_t>(j)] - want) <= 1e-9 * std::pow(2.0 * M_PI, -j));
  }
  for (double t : {0.5, 2.0, 4.0}) CHECK(us(t) == doctest::Approx(t / (1.0 - std::exp(-t))).epsilon(1e-8));
}

TEST_CASE("verification sweep") {
  const VerifyReport r = run_verification(VerifySweep::quick());
  CHECK(r.total_failures() == 0);
  CHECK(r.total_checks() > 0);
  for (const FamilyReport& f : r.families) {
    CAPTURE(f.name);
    CHECK(f.failures == 0);
    if (f.name == "lemma2_remark") {
      CHECK(f.refuted > 0);
    } else {
      CHECK(f.refuted == 0);
    }
  }
  for (const RationalScalar& v : sweep_rationals(VerifySweep::quick())) {
    CHECK(v != 0);
    CHECK(v != 1);
  }
}
