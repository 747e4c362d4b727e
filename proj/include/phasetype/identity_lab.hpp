#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "phasetype/random.hpp"

namespace phasetype::identity {

/// Exact rational, always kept in lowest terms with a positive denominator.
using RationalScalar = mpq_class;

RationalScalar make_rational(long numerator, long denominator = 1);

/// C(k, m) with the convention C(k, m) = 0 for m < 0 or m > k.
mpz_class binomial(long k, long m);

/// v = w / (w - 1).
RationalScalar v_from_w(const RationalScalar& w);

// ---------------------------------------------------------------------------
// Floating-point Laplace-transform identities
//
// Each check returns the absolute residual of the identity together with the
// largest magnitude among the terms being combined. Checks whose inputs are
// plain numbers (n, w, lambda, t) are evaluated in binary128, so their
// absolute residual is far below double rounding. The functional equation
// receives Psi values already rounded to double; its terms grow like
// |v Psi|^n (up to 1e15 on ordinary sweeps) and amplify that input rounding,
// so only relative(), i.e. absolute / max(1, scale), is meaningful there.

struct Residual {
  double absolute = 0.0;
  double scale = 0.0;
  double relative() const { return absolute / (scale > 1.0 ? scale : 1.0); }
};

/// Phi_1(t) Phi_2(t)^n = Phi_1(t) - sum_{k=1}^n Phi_2(t)^k with
/// Phi(t) = lambda / (lambda + t), Phi_1(t) = (w-1) Phi(w t),
/// Phi_2(t) = ((w-1)/w) Phi(t).
Residual lemma1_residual(int n, double w, double lambda, double t);

/// (w-1) / ((1+wt)(1+t)) = w / (1+wt) - 1 / (1+t).
Residual decomposition_residual(double w, double t);

/// The identity multiplied out before normalisation:
///   (w-1)^{n+1} / w^n Phi(wt) Phi^n(t) = (w-1) Phi(wt) - sum_{k=1}^n ((w-1)/w)^k Phi^k(t).
Residual scaled_identity_residual(int n, double w, double lambda, double t);

using PsiEvaluator = std::function<double(double)>;

/// 1 = v^n Psi^n(t) - (v-1) Psi(wt) sum_{k=0}^{n-1} v^k Psi^k(t), v = w/(w-1).
/// Psi = 1/Phi; the exponential law gives Psi(t) = 1 + t/lambda and a zero
/// residual, other laws do not.
Residual functional_eq_residual(int n, double w, const PsiEvaluator& psi, double t);

// ---------------------------------------------------------------------------
// Exact combinatorial identities. Each returns LHS - RHS (or the quantity
// itself, for the inequality), computed without rounding.

/// v sum_{k<n} C(k,j-1) v^k + (v-1) sum_{k<n} C(k,j) v^k - C(n,j) v^n. Zero for
/// every n >= 1, j >= 1, v != 1.
RationalScalar lemma2_i(int n, int j, const RationalScalar& v);

/// (v/(v-1))^{j-1} v sum_{k<n} v^k + (v-1) sum_{k<n} k v^k - n v^n, j >= 2.
RationalScalar lemma2_ii(int n, int j, const RationalScalar& v);

/// [(v/(v-1))^j - v/(v-1)] (v^n - 1): what lemma2_ii reduces to. It vanishes
/// when v^n = 1 (v = -1 with n even), the one case where the strict
/// inequality does not hold.
RationalScalar lemma2_ii_closed_form(int n, int j, const RationalScalar& v);

/// Shifted form as usually stated:
///   v sum C(k+m, j-1) v^k + (v-1) sum C(k+m, j) v^k - C(n+m, j) v^n.
/// Telescoping the sums shows the left side equals C(n+m, j) v^n - C(m, j),
/// so this residual is -C(m, j): zero exactly when j > m, nonzero otherwise.
RationalScalar lemma2_remark(int n, int m, int j, const RationalScalar& v);

/// Residual of the corrected shifted form, which keeps the C(m, j) term:
///   v sum C(k+m, j-1) v^k + (v-1) sum C(k+m, j) v^k - C(n+m, j) v^n + C(m, j).
/// Zero for every n >= 1, m >= 0, j >= 1, v != 1.
RationalScalar lemma2_remark_corrected(int n, int m, int j, const RationalScalar& v);

/// Coefficients of a_1^j and a_j after differentiating the functional
/// equation j times at t = 0:
///   a1_bracket = C(n,j) v^n - v sum C(k,j-1) v^k - (v-1) sum C(k,j) v^k
///   aj_bracket = n v^n - (v/(v-1))^{j-1} v sum v^k - (v-1) sum k v^k
/// a1_bracket is identically zero; aj_bracket is nonzero unless v^n = 1.
struct BracketPair {
  RationalScalar a1_bracket;
  RationalScalar aj_bracket;
  int n;
  int j;
  RationalScalar v;
};

BracketPair brackets(int n, int j, const RationalScalar& v);

// ---------------------------------------------------------------------------
// Series of Psi = 1 / Phi

struct PsiSeries {
  std::vector<double> coeffs;  // a_0 .. a_J

  /// Truncated series sum a_j t^j (Horner).
  double operator()(double t) const;
};

/// a_0..a_J from raw moments m_1..m_J (m_0 = 1), via the formal reciprocal
/// of Phi(t) = sum_k (-1)^k m_k t^k / k!. Throws std::length_error when
/// fewer than J moments are supplied.
PsiSeries psi_coeffs_from_moments(std::span<const double> moments, int order);

// ---------------------------------------------------------------------------
// Sweeps

struct VerifySweep {
  int lemma2_max_n = 30;
  int remark_max_n = 15;
  int remark_max_m = 10;
  int random_rationals = 40;
  long max_component = 1000000;  // bound on |numerator| and denominator
  int bracket_max_n = 20;
  int bracket_max_j = 30;
  std::vector<RationalScalar> bracket_w = {make_rational(1, 5), make_rational(1, 2), make_rational(3, 2),
                                           make_rational(2), make_rational(5)};
  int float_max_n = 10;
  std::vector<double> float_w = {0.1, 0.5, 1.5, 2.0, 5.0, 10.0};
  std::vector<double> float_lambda = {0.5, 1.0, 3.0};
  int t_points = 100;
  std::uint64_t seed = kDefaultSeed;

  /// Smaller bounds for quick smoke runs.
  static VerifySweep quick();
};

struct FamilyReport {
  std::string name;
  std::string sweep;        // human-readable bounds
  long checks = 0;
  long failures = 0;
  long boundary_cases = 0;  // v^n = 1 cases where a strict inequality cannot hold
  long refuted = 0;         // stated identity false, residual equal to the corrected closed form
  bool exact = true;
  double tolerance = 0.0;       // floating families only
  double worst_residual = 0.0;  // floating families only
  bool relative_residual = false;  // worst_residual and tolerance refer to relative()
};

struct VerifyReport {
  std::vector<FamilyReport> families;
  long total_checks() const;
  long total_failures() const;
  long total_refuted() const;
};

/// The random rationals used by the exact sweeps: nonzero, != 1, numerator
/// in [-max_component, max_component], denominator in [1, max_component].
std::vector<RationalScalar> sweep_rationals(const VerifySweep& sweep);

/// Runs every identity family. Parameter points are distributed over OpenMP
/// threads; counts and worst residuals do not depend on the thread count.
VerifyReport run_verification(const VerifySweep& sweep);

}  // namespace phasetype::identity
