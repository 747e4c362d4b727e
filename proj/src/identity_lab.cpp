#include "phasetype/identity_lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "phasetype/errors.hpp"
#include "phasetype/format.hpp"

namespace phasetype::identity {

namespace {

RationalScalar power(const RationalScalar& v, long k) {
  RationalScalar r;
  mpz_pow_ui(r.get_num_mpz_t(), v.get_num_mpz_t(), static_cast<unsigned long>(k));
  mpz_pow_ui(r.get_den_mpz_t(), v.get_den_mpz_t(), static_cast<unsigned long>(k));
  return r;  // gcd(num^k, den^k) = 1 already
}

// sum_{k=0}^{n-1} coef(k) v^k by Horner.
template <class Coef>
RationalScalar poly_sum(int n, const RationalScalar& v, Coef coef) {
  RationalScalar s = 0;
  for (int k = n - 1; k >= 0; --k) {
    s *= v;
    s += coef(k);
  }
  return s;
}

void require_n_j(int n, int j, int min_j) {
  if (n < 1) throw InvalidParameter("n must be >= 1, got " + std::to_string(n));
  if (j < min_j) throw InvalidParameter("j must be >= " + std::to_string(min_j) + ", got " + std::to_string(j));
}

void require_v_not_one(const RationalScalar& v) {
  if (v == 1) throw InvalidParameter("v must differ from 1");
}

void require_v_not_zero_one(const RationalScalar& v) {
  require_v_not_one(v);
  if (v == 0) throw InvalidParameter("v must differ from 0");
}

void require_w(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw InvalidParameter("w must be positive, got " + format_double(w));
  if (w == 1.0) throw InvalidParameter("w must differ from 1");
}

void require_t(double t) {
  if (!(t >= 0.0)) throw DomainError("t must be >= 0, got " + format_double(t));
}

// Identities whose inputs are all exact doubles are evaluated in binary128,
// so the returned absolute residual reflects the identity rather than the
// rounding of terms that reach |(w-1)/w|^n.
#if defined(__SIZEOF_FLOAT128__)
using Wide = __float128;
#else
using Wide = long double;
#endif

Wide wide_abs(Wide x) { return x < 0 ? -x : x; }
double narrow_abs(Wide x) { return static_cast<double>(wide_abs(x)); }

}  // namespace

RationalScalar make_rational(long numerator, long denominator) {
  if (denominator == 0) throw InvalidParameter("rational with zero denominator");
  RationalScalar r(numerator, denominator);
  r.canonicalize();
  return r;
}

mpz_class binomial(long k, long m) {
  if (m < 0 || k < 0 || m > k) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(m));
  return r;
}

RationalScalar v_from_w(const RationalScalar& w) {
  if (w == 1) throw InvalidParameter("w must differ from 1");
  return RationalScalar(w / (w - 1));
}

// ---------------------------------------------------------------------------

Residual lemma1_residual(int n, double w, double lambda, double t) {
  if (n < 1) throw InvalidParameter("n must be >= 1");
  require_w(w);
  if (!(lambda > 0.0)) throw InvalidParameter("lambda must be positive, got " + format_double(lambda));
  require_t(t);
  const Wide W = w, L = lambda, T = t;
  const Wide phi1 = (W - 1) * L / (L + W * T);
  const Wide phi2 = (W - 1) / W * L / (L + T);
  Wide pow2 = 1, sum = 0, abs_sum = 0;
  for (int k = 1; k <= n; ++k) {
    pow2 *= phi2;
    sum += pow2;
    abs_sum += wide_abs(pow2);
  }
  const Wide lhs = phi1 * pow2;
  return {narrow_abs(lhs - phi1 + sum), static_cast<double>(std::max({wide_abs(lhs), wide_abs(phi1), abs_sum}))};
}

Residual decomposition_residual(double w, double t) {
  require_w(w);
  require_t(t);
  const Wide W = w, T = t;
  const Wide lhs = (W - 1) / ((1 + W * T) * (1 + T));
  const Wide a = W / (1 + W * T);
  const Wide b = 1 / (1 + T);
  return {narrow_abs(lhs - a + b), static_cast<double>(std::max({wide_abs(lhs), a, b}))};
}

Residual scaled_identity_residual(int n, double w, double lambda, double t) {
  if (n < 1) throw InvalidParameter("n must be >= 1");
  require_w(w);
  if (!(lambda > 0.0)) throw InvalidParameter("lambda must be positive, got " + format_double(lambda));
  require_t(t);
  const Wide W = w, L = lambda, T = t;
  const Wide phi_w = L / (L + W * T);
  const Wide phi = L / (L + T);
  const Wide r = (W - 1) / W;
  Wide term = 1, sum = 0, abs_sum = 0;
  for (int k = 1; k <= n; ++k) {
    term *= r * phi;
    sum += term;
    abs_sum += wide_abs(term);
  }
  // term = (r phi)^n, so lhs = (w-1)^{n+1}/w^n phi(wt) phi^n(t).
  const Wide lhs = (W - 1) * term * phi_w;
  const Wide first = (W - 1) * phi_w;
  return {narrow_abs(lhs - first + sum), static_cast<double>(std::max({wide_abs(lhs), wide_abs(first), abs_sum}))};
}

Residual functional_eq_residual(int n, double w, const PsiEvaluator& psi, double t) {
  if (n < 1) throw InvalidParameter("n must be >= 1");
  require_w(w);
  require_t(t);
  const double v = w / (w - 1.0);
  const double p = psi(t);
  const double pw = psi(w * t);
  double term = 1.0;  // (v Psi)^k
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += term;
    term *= v * p;
  }
  const double a = term;  // v^n Psi^n
  const double b = (v - 1.0) * pw * sum;
  return {std::abs(1.0 - a + b), std::max({1.0, std::abs(a), std::abs(b)})};
}

// ---------------------------------------------------------------------------

RationalScalar lemma2_i(int n, int j, const RationalScalar& v) {
  require_n_j(n, j, 1);
  require_v_not_one(v);
  const RationalScalar s1 = poly_sum(n, v, [j](int k) { return RationalScalar(binomial(k, j - 1)); });
  const RationalScalar s2 = poly_sum(n, v, [j](int k) { return RationalScalar(binomial(k, j)); });
  return RationalScalar(v * s1 + (v - 1) * s2 - binomial(n, j) * power(v, n));
}

RationalScalar lemma2_ii(int n, int j, const RationalScalar& v) {
  require_n_j(n, j, 2);
  require_v_not_zero_one(v);
  const RationalScalar geometric = poly_sum(n, v, [](int) { return RationalScalar(1); });
  const RationalScalar weighted = poly_sum(n, v, [](int k) { return RationalScalar(k); });
  const RationalScalar ratio = v / (v - 1);
  return RationalScalar(power(ratio, j - 1) * v * geometric + (v - 1) * weighted - n * power(v, n));
}

RationalScalar lemma2_ii_closed_form(int n, int j, const RationalScalar& v) {
  require_n_j(n, j, 2);
  require_v_not_zero_one(v);
  const RationalScalar ratio = v / (v - 1);
  return RationalScalar((power(ratio, j) - ratio) * (power(v, n) - 1));
}

RationalScalar lemma2_remark(int n, int m, int j, const RationalScalar& v) {
  require_n_j(n, j, 1);
  if (m < 0) throw InvalidParameter("m must be >= 0, got " + std::to_string(m));
  require_v_not_one(v);
  const RationalScalar s1 = poly_sum(n, v, [j, m](int k) { return RationalScalar(binomial(k + m, j - 1)); });
  const RationalScalar s2 = poly_sum(n, v, [j, m](int k) { return RationalScalar(binomial(k + m, j)); });
  return RationalScalar(v * s1 + (v - 1) * s2 - binomial(n + m, j) * power(v, n));
}

RationalScalar lemma2_remark_corrected(int n, int m, int j, const RationalScalar& v) {
  return RationalScalar(lemma2_remark(n, m, j, v) + binomial(m, j));
}

BracketPair brackets(int n, int j, const RationalScalar& v) {
  if (n < 2) throw InvalidParameter("brackets need n >= 2, got " + std::to_string(n));
  require_n_j(n, j, 2);
  require_v_not_zero_one(v);
  const RationalScalar vn = power(v, n);
  const RationalScalar s_jm1 = poly_sum(n, v, [j](int k) { return RationalScalar(binomial(k, j - 1)); });
  const RationalScalar s_j = poly_sum(n, v, [j](int k) { return RationalScalar(binomial(k, j)); });
  const RationalScalar geometric = poly_sum(n, v, [](int) { return RationalScalar(1); });
  const RationalScalar weighted = poly_sum(n, v, [](int k) { return RationalScalar(k); });
  BracketPair b{RationalScalar(binomial(n, j) * vn - v * s_jm1 - (v - 1) * s_j),
                RationalScalar(n * vn - power(RationalScalar(v / (v - 1)), j - 1) * v * geometric - (v - 1) * weighted),
                n, j, v};
  return b;
}

// ---------------------------------------------------------------------------

double PsiSeries::operator()(double t) const {
  double s = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * t + *it;
  return s;
}

PsiSeries psi_coeffs_from_moments(std::span<const double> moments, int order) {
  if (order < 0) throw InvalidParameter("series order must be >= 0");
  if (moments.size() < static_cast<std::size_t>(order)) {
    throw std::length_error("need " + std::to_string(order) + " moments, got " + std::to_string(moments.size()));
  }
  // Phi(t) = sum_k c_k t^k with c_k = (-1)^k m_k / k!.
  std::vector<double> c(static_cast<std::size_t>(order) + 1);
  c[0] = 1.0;
  double factorial = 1.0;
  for (int k = 1; k <= order; ++k) {
    factorial *= k;
    c[k] = (k % 2 ? -1.0 : 1.0) * moments[k - 1] / factorial;
  }
  PsiSeries out;
  out.coeffs.assign(c.size(), 0.0);
  out.coeffs[0] = 1.0;
  for (int j = 1; j <= order; ++j) {
    double s = 0.0;
    for (int i = 1; i <= j; ++i) s += c[i] * out.coeffs[j - i];
    out.coeffs[j] = -s;
  }
  return out;
}

// ---------------------------------------------------------------------------

VerifySweep VerifySweep::quick() {
  VerifySweep s;
  s.lemma2_max_n = 12;
  s.remark_max_n = 6;
  s.remark_max_m = 4;
  s.random_rationals = 8;
  s.bracket_max_n = 8;
  s.bracket_max_j = 10;
  s.float_max_n = 6;
  s.t_points = 25;
  return s;
}

long VerifyReport::total_checks() const {
  long c = 0;
  for (const auto& f : families) c += f.checks;
  return c;
}

long VerifyReport::total_refuted() const {
  long c = 0;
  for (const auto& f : families) c += f.refuted;
  return c;
}

long VerifyReport::total_failures() const {
  long c = 0;
  for (const auto& f : families) c += f.failures;
  return c;
}

std::vector<RationalScalar> sweep_rationals(const VerifySweep& sweep) {
  RandomStream rng(sweep.seed, {stream_key("verify-rationals")});
  auto& eng = rng.engine();
  const auto span = static_cast<std::uint64_t>(sweep.max_component);
  std::vector<RationalScalar> out;
  while (static_cast<int>(out.size()) < sweep.random_rationals) {
    const long num = static_cast<long>(eng() % (2 * span + 1)) - sweep.max_component;
    const long den = static_cast<long>(eng() % span) + 1;
    if (num == 0) continue;
    RationalScalar v = make_rational(num, den);
    if (v == 1) continue;
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

struct Tally {
  long checks = 0;
  long failures = 0;
  long boundary = 0;
  long refuted = 0;
  double worst = 0.0;

  void add(const Tally& o) {
    checks += o.checks;
    failures += o.failures;
    boundary += o.boundary;
    refuted += o.refuted;
    worst = std::max(worst, o.worst);
  }
};

// Runs body(i) for i < count in parallel and merges the tallies in index order.
template <class Body>
Tally parallel_tally(int count, Body body) {
  std::vector<Tally> parts(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) parts[static_cast<std::size_t>(i)] = body(i);
  Tally total;
  for (const auto& p : parts) total.add(p);
  return total;
}

FamilyReport to_report(std::string name, std::string sweep, const Tally& t, bool exact, double tol) {
  FamilyReport r;
  r.name = std::move(name);
  r.sweep = std::move(sweep);
  r.checks = t.checks;
  r.failures = t.failures;
  r.boundary_cases = t.boundary;
  r.refuted = t.refuted;
  r.exact = exact;
  r.tolerance = tol;
  r.worst_residual = t.worst;
  return r;
}

std::vector<double> t_grid(double hi, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = points > 1 ? hi * i / (points - 1) : 0.0;
  return g;
}

std::string describe_w(const std::vector<double>& ws) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < ws.size(); ++i) os << (i ? "," : "") << format_double(ws[i]);
  os << "}";
  return os.str();
}

}  // namespace

VerifyReport run_verification(const VerifySweep& sweep) {
  VerifyReport report;
  std::vector<RationalScalar> vs = sweep_rationals(sweep);
  // v = -1 makes v^n = 1 for even n: the boundary of the strict inequality.
  std::vector<RationalScalar> vs_ii = vs;
  vs_ii.push_back(make_rational(-1));
  const int nv = static_cast<int>(vs.size());

  {
    const Tally t = parallel_tally(nv, [&](int i) {
      Tally r;
      for (int n = 1; n <= sweep.lemma2_max_n; ++n) {
        for (int j = 1; j <= n; ++j) {
          ++r.checks;
          if (lemma2_i(n, j, vs[i]) != 0) ++r.failures;
        }
      }
      return r;
    });
    report.families.push_back(to_report(
        "lemma2_i",
        "1<=j<=n<=" + std::to_string(sweep.lemma2_max_n) + ", " + std::to_string(nv) + " random rationals v", t,
        true, 0.0));
  }

  {
    const Tally t = parallel_tally(static_cast<int>(vs_ii.size()), [&](int i) {
      Tally r;
      for (int n = 1; n <= sweep.lemma2_max_n; ++n) {
        const bool boundary = power(vs_ii[i], n) == 1;
        for (int j = 2; j <= std::max(n, 2); ++j) {
          ++r.checks;
          const RationalScalar value = lemma2_ii(n, j, vs_ii[i]);
          if (value != lemma2_ii_closed_form(n, j, vs_ii[i])) {
            ++r.failures;
          } else if (boundary) {
            ++r.boundary;
          } else if (value == 0) {
            ++r.failures;
          }
        }
      }
      return r;
    });
    report.families.push_back(to_report("lemma2_ii",
                                        "2<=j<=max(n,2), n<=" + std::to_string(sweep.lemma2_max_n) + ", " +
                                            std::to_string(nv) + " random rationals v plus v=-1",
                                        t, true, 0.0));
  }

  {
    const Tally t = parallel_tally(nv, [&](int i) {
      Tally r;
      for (int n = 1; n <= sweep.remark_max_n; ++n) {
        for (int m = 0; m <= sweep.remark_max_m; ++m) {
          for (int j = 1; j <= n + m; ++j) {
            ++r.checks;
            const RationalScalar res = lemma2_remark(n, m, j, vs[i]);
            if (res == 0) continue;
            if (res == -binomial(m, j)) {
              ++r.refuted;
            } else {
              ++r.failures;
            }
          }
        }
      }
      return r;
    });
    const Tally corrected = parallel_tally(nv, [&](int i) {
      Tally r;
      for (int n = 1; n <= sweep.remark_max_n; ++n) {
        for (int m = 0; m <= sweep.remark_max_m; ++m) {
          for (int j = 1; j <= n + m; ++j) {
            ++r.checks;
            if (lemma2_remark_corrected(n, m, j, vs[i]) != 0) ++r.failures;
          }
        }
      }
      return r;
    });
    const std::string desc = "n<=" + std::to_string(sweep.remark_max_n) + ", m<=" +
                             std::to_string(sweep.remark_max_m) + ", 1<=j<=n+m, " + std::to_string(nv) +
                             " random rationals v";
    report.families.push_back(to_report("lemma2_remark", desc, t, true, 0.0));
    report.families.push_back(to_report("lemma2_remark_corrected", desc, corrected, true, 0.0));
  }

  {
    const auto& ws = sweep.bracket_w;
    const Tally t = parallel_tally(static_cast<int>(ws.size()), [&](int i) {
      Tally r;
      const RationalScalar v = v_from_w(ws[i]);
      for (int n = 2; n <= sweep.bracket_max_n; ++n) {
        const bool boundary = power(v, n) == 1;
        for (int j = 2; j <= sweep.bracket_max_j; ++j) {
          ++r.checks;
          const BracketPair b = brackets(n, j, v);
          if (b.a1_bracket != 0) {
            ++r.failures;
          } else if (boundary) {
            ++r.boundary;
            if (b.aj_bracket != 0) ++r.failures;
          } else if (b.aj_bracket == 0) {
            ++r.failures;
          }
        }
      }
      return r;
    });
    std::ostringstream wdesc;
    for (std::size_t i = 0; i < ws.size(); ++i) wdesc << (i ? "," : "") << ws[i].get_str();
    report.families.push_back(to_report("brackets",
                                        "2<=n<=" + std::to_string(sweep.bracket_max_n) +
                                            ", 2<=j<=" + std::to_string(sweep.bracket_max_j) + ", w in {" +
                                            wdesc.str() + "}",
                                        t, true, 0.0));
  }

  // Floating families: (n, w, lambda) points, t on [0, 10 lambda].
  struct FloatPoint {
    int n;
    double w;
    double lambda;
  };
  std::vector<FloatPoint> points;
  for (int n = 1; n <= sweep.float_max_n; ++n) {
    for (double w : sweep.float_w) {
      for (double lambda : sweep.float_lambda) points.push_back({n, w, lambda});
    }
  }
  const int np = static_cast<int>(points.size());
  const std::string float_desc = "n<=" + std::to_string(sweep.float_max_n) + ", w in " + describe_w(sweep.float_w) +
                                 ", lambda in " + describe_w(sweep.float_lambda) + ", " +
                                 std::to_string(sweep.t_points) + "-point t grid on [0, 10 lambda]";

  auto float_family = [&](const std::string& name, double tol, bool relative, auto residual) {
    const Tally t = parallel_tally(np, [&](int i) {
      Tally r;
      const FloatPoint& p = points[static_cast<std::size_t>(i)];
      for (double tt : t_grid(10.0 * p.lambda, sweep.t_points)) {
        const Residual rr = residual(p, tt);
        const double res = relative ? rr.relative() : rr.absolute;
        ++r.checks;
        if (!(res <= tol)) ++r.failures;
        r.worst = std::max(r.worst, res);
      }
      return r;
    });
    report.families.push_back(to_report(name, float_desc, t, false, tol));
    report.families.back().relative_residual = relative;
  };

  float_family("lemma1", 1e-12, false,
               [](const FloatPoint& p, double t) { return lemma1_residual(p.n, p.w, p.lambda, t); });
  float_family("scaled_identity", 1e-12, false,
               [](const FloatPoint& p, double t) { return scaled_identity_residual(p.n, p.w, p.lambda, t); });
  float_family("functional_equation", 1e-10, true, [](const FloatPoint& p, double t) {
    const double lambda = p.lambda;
    return functional_eq_residual(p.n, p.w, [lambda](double s) { return 1.0 + s / lambda; }, t);
  });

  {
    const auto grid = t_grid(10.0, sweep.t_points);
    const int nw = static_cast<int>(sweep.float_w.size());
    const Tally t = parallel_tally(nw, [&](int i) {
      Tally r;
      for (double tt : grid) {
        const double res = decomposition_residual(sweep.float_w[static_cast<std::size_t>(i)], tt).absolute;
        ++r.checks;
        if (!(res <= 1e-14)) ++r.failures;
        r.worst = std::max(r.worst, res);
      }
      return r;
    });
    report.families.push_back(to_report("decomposition",
                                        "w in " + describe_w(sweep.float_w) + ", " + std::to_string(sweep.t_points) +
                                            "-point t grid on [0, 10]",
                                        t, false, 1e-14));
  }
  return report;
}

}  // namespace phasetype::identity
