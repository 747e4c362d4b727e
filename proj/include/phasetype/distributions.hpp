#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "phasetype/random.hpp"

namespace phasetype {

/// Minimum relative gap |a-b| / max(a,b) between two rates of a RateVector.
/// Closer pairs make the partial-fraction weights cancel catastrophically.
inline constexpr double kMinRelativeRateGap = 1e-8;

/// EME parameters with |w - 1| below this are evaluated as Erlang(n+1, lambda).
inline constexpr double kErlangLimitBand = 1e-6;

class ExpParams {
 public:
  explicit ExpParams(double lambda);
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

class ErlangParams {
 public:
  ErlangParams(int n, double lambda);
  int n() const { return n_; }
  double lambda() const { return lambda_; }

 private:
  int n_;
  double lambda_;
};

/// Distinct-rate hypoexponential HypoE(rates...). The weights
///   l_j = prod_{i != j} rate_i / (rate_i - rate_j)
/// are computed once at construction; they sum to one.
class RateVector {
 public:
  explicit RateVector(std::vector<double> rates);
  std::span<const double> rates() const { return rates_; }
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> rates_;
  std::vector<double> weights_;
};

/// Exponentially modified Erlang: X_1 + ... + X_n + w X_{n+1} with X_i
/// i.i.d. Exp(lambda), i.e. HypoE(lambda, ..., lambda, lambda/w).
///
/// Derived quantities used by the density:
///   odd_rate = lambda / w           rate of the modified stage
///   beta     = lambda (w - 1) / w   scale of the incomplete-gamma argument
///   v        = w / (w - 1)          so that v^n multiplies the bracket
/// beta and v change sign with w - 1; the density formula stays valid for
/// both w < 1 and w > 1. Inside |w - 1| < kErlangLimitBand the record is
/// flagged erlang_limit() and evaluates as Erlang(n+1, lambda).
class EMEParams {
 public:
  EMEParams(int n, double lambda, double w);
  int n() const { return n_; }
  double lambda() const { return lambda_; }
  double w() const { return w_; }
  double odd_rate() const { return lambda_ / w_; }
  double beta() const { return lambda_ * (w_ - 1.0) / w_; }
  double v() const { return w_ / (w_ - 1.0); }
  bool erlang_limit() const;

 private:
  int n_;
  double lambda_;
  double w_;
};

using Distribution = std::variant<ExpParams, ErlangParams, RateVector, EMEParams>;

/// Nonnegative observations plus a free-text provenance label.
struct SampleBatch {
  std::vector<double> values;
  std::string label;

  /// Throws InvalidParameter when empty or when any value is negative or
  /// not finite.
  void validate() const;
  std::size_t size() const { return values.size(); }
};

struct Moments {
  double mean;
  double variance;
};

double pdf(const ExpParams& d, double x);
double pdf(const ErlangParams& d, double x);
double pdf(const RateVector& d, double x);
double pdf(const EMEParams& d, double x);
double pdf(const Distribution& d, double x);

/// Natural log of the density; -infinity where the density is zero.
double log_pdf(const ExpParams& d, double x);
double log_pdf(const ErlangParams& d, double x);
double log_pdf(const RateVector& d, double x);
double log_pdf(const EMEParams& d, double x);
double log_pdf(const Distribution& d, double x);

double cdf(const ExpParams& d, double x);
double cdf(const ErlangParams& d, double x);
double cdf(const RateVector& d, double x);
double cdf(const EMEParams& d, double x);
double cdf(const Distribution& d, double x);

/// Laplace transform E[exp(-t X)], t >= 0.
double laplace(const ExpParams& d, double t);
double laplace(const ErlangParams& d, double t);
double laplace(const RateVector& d, double t);
double laplace(const EMEParams& d, double t);
double laplace(const Distribution& d, double t);

Moments moments(const ExpParams& d);
Moments moments(const ErlangParams& d);
Moments moments(const RateVector& d);
Moments moments(const EMEParams& d);
Moments moments(const Distribution& d);

/// One draw, built as a sum of inverse-CDF exponential components.
double draw(const Distribution& d, RandomStream& rng);

/// count draws from rng, in order.
SampleBatch sample(const Distribution& d, std::size_t count, RandomStream& rng);

/// Family name as used in parameter files and the CLI: exp, erlang, hypo, eme.
std::string family_name(const Distribution& d);

/// Short human-readable form, e.g. "EME(n=2, lambda=1, w=3)".
std::string describe(const Distribution& d);

}  // namespace phasetype
