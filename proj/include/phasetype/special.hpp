#pragma once

namespace phasetype {

/// A real number stored as sign * exp(log_abs). sign is 0 for an exact zero.
struct SignedLog {
  double log_abs = 0.0;
  int sign = 0;

  double value() const;
};

/// Regularized upper incomplete gamma for integer order,
///   Q(n, t) = Gamma(n, t) / (n-1)! = exp(-t) * sum_{k<n} t^k / k!,
/// valid for every finite real t (negative t is needed by the EME density
/// when w < 1). Terms are summed in log space with sign tracking.
///
/// Throws InvalidParameter for n < 1 and std::overflow_error when the result
/// is not representable as a double.
double regularized_upper_gamma_int(int n, double t);

/// log|Q(n, t)| with sign.
SignedLog log_regularized_upper_gamma_int(int n, double t);

/// Regularized lower incomplete gamma P(n, t) = 1 - Q(n, t) for integer order
/// and any finite real t. For |t| below n + 1 the tail series
///   exp(-t) * sum_{k>=n} t^k / k!
/// is used, which avoids the cancellation in 1 - Q near the origin.
double regularized_lower_gamma_int(int n, double t);

SignedLog log_regularized_lower_gamma_int(int n, double t);

}  // namespace phasetype
