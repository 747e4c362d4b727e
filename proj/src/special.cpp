#include "phasetype/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "phasetype/errors.hpp"

namespace phasetype {

namespace {

void check_order(int n, double t) {
  if (n < 1) throw InvalidParameter("incomplete gamma order must be >= 1, got " + std::to_string(n));
  if (!std::isfinite(t)) throw DomainError("incomplete gamma argument must be finite");
}

double checked_value(const SignedLog& s, const char* what) {
  const double v = s.value();
  if (!std::isfinite(v)) throw std::overflow_error(std::string(what) + ": result exceeds double range");
  return v;
}

}  // namespace

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

SignedLog log_regularized_upper_gamma_int(int n, double t) {
  check_order(n, t);
  if (t == 0.0) return {0.0, 1};
  if (t < 0.0 && -t < n + 1.0) {
    // The alternating finite sum loses about 2|t|/ln(10) digits here; the
    // lower tail series does not.
    const double q = 1.0 - regularized_lower_gamma_int(n, t);
    if (q == 0.0) return {0.0, 0};
    return {std::log(std::abs(q)), q > 0.0 ? 1 : -1};
  }

  // log|t^k / k!| built incrementally; the alternating sign for t < 0 is
  // carried separately so no term ever overflows.
  const double log_t = std::log(std::abs(t));
  double max_log = 0.0;  // k = 0 term is log 1
  double lk = 0.0;
  for (int k = 1; k < n; ++k) {
    lk += log_t - std::log(static_cast<double>(k));
    max_log = std::max(max_log, lk);
  }
  double sum = 0.0;
  lk = 0.0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) lk += log_t - std::log(static_cast<double>(k));
    const double mag = std::exp(lk - max_log);
    sum += (t < 0.0 && (k % 2 == 1)) ? -mag : mag;
  }
  if (sum == 0.0) return {0.0, 0};
  return {-t + max_log + std::log(std::abs(sum)), sum > 0.0 ? 1 : -1};
}

double regularized_upper_gamma_int(int n, double t) {
  return checked_value(log_regularized_upper_gamma_int(n, t), "regularized_upper_gamma_int");
}

SignedLog log_regularized_lower_gamma_int(int n, double t) {
  check_order(n, t);
  if (t == 0.0) return {0.0, 0};

  const double abs_t = std::abs(t);
  if (abs_t < n + 1.0) {
    // exp(-t) t^n / n! * sum_{i>=0} t^i n! / (n+i)!. With |t| < n+1 the
    // terms shrink monotonically, so the sum lies in (1 - |t|/(n+1), e^|t|].
    double term = 1.0;
    double sum = 1.0;
    for (int i = 1; i < 2000; ++i) {
      term *= t / (n + i);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    const int sign = (t < 0.0 && n % 2 == 1) ? -1 : 1;
    return {-t + n * std::log(abs_t) - std::lgamma(n + 1.0) + std::log(sum), sign};
  }

  const SignedLog q = log_regularized_upper_gamma_int(n, t);
  if (q.sign == 0) return {0.0, 1};
  if (q.log_abs > 0.0) {
    // |Q| > 1: P = -Q (1 - 1/Q), and 1 - 1/Q > 0.
    const double inv = q.sign * std::exp(-q.log_abs);
    const double corr = std::log1p(-inv);
    if (!std::isfinite(corr)) return {0.0, 0};
    return {q.log_abs + corr, -q.sign};
  }
  const double p = 1.0 - q.value();
  if (p == 0.0) return {0.0, 0};
  return {std::log(std::abs(p)), p > 0.0 ? 1 : -1};
}

double regularized_lower_gamma_int(int n, double t) {
  return checked_value(log_regularized_lower_gamma_int(n, t), "regularized_lower_gamma_int");
}

}  // namespace phasetype
