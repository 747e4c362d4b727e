#include "phasetype/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "phasetype/errors.hpp"
#include "phasetype/format.hpp"
#include "phasetype/special.hpp"

namespace phasetype {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_rate(double lambda, const char* what) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter(std::string(what) + " must be positive and finite, got " + format_double(lambda));
  }
}

void require_x(double x) {
  if (!(x >= 0.0)) throw DomainError("x must be >= 0, got " + format_double(x));
}

void require_t(double t) {
  if (!(t >= 0.0)) throw DomainError("t must be >= 0, got " + format_double(t));
}

double erlang_log_pdf(int n, double lambda, double x) {
  if (x == 0.0) return n == 1 ? std::log(lambda) : kNegInf;
  return n * std::log(lambda) + (n - 1) * std::log(x) - lambda * x - std::lgamma(static_cast<double>(n));
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameter records

ExpParams::ExpParams(double lambda) : lambda_(lambda) { require_rate(lambda, "lambda"); }

ErlangParams::ErlangParams(int n, double lambda) : n_(n), lambda_(lambda) {
  if (n < 1) throw InvalidParameter("Erlang shape n must be >= 1, got " + std::to_string(n));
  require_rate(lambda, "lambda");
}

RateVector::RateVector(std::vector<double> rates) : rates_(std::move(rates)) {
  if (rates_.size() < 2) throw InvalidParameter("hypoexponential needs at least two rates");
  for (double r : rates_) require_rate(r, "rate");
  const std::size_t n = rates_.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = std::abs(rates_[i] - rates_[j]) / std::max(rates_[i], rates_[j]);
      if (gap < kMinRelativeRateGap) {
        throw InvalidParameter("rates " + format_double(rates_[i]) + " and " + format_double(rates_[j]) +
                               " are closer than the minimum relative gap; use erlang or eme");
      }
    }
  }
  weights_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j) w *= rates_[i] / (rates_[i] - rates_[j]);
    }
    weights_[j] = w;
  }
}

EMEParams::EMEParams(int n, double lambda, double w) : n_(n), lambda_(lambda), w_(w) {
  if (n < 1) throw InvalidParameter("EME stage count n must be >= 1, got " + std::to_string(n));
  require_rate(lambda, "lambda");
  if (!(w > 0.0) || !std::isfinite(w)) throw InvalidParameter("w must be positive and finite, got " + format_double(w));
  if (w == 1.0) throw InvalidParameter("w must differ from 1 (w = 1 is Erlang(n+1, lambda))");
}

bool EMEParams::erlang_limit() const { return std::abs(w_ - 1.0) < kErlangLimitBand; }

void SampleBatch::validate() const {
  if (values.empty()) throw InvalidParameter("sample batch is empty");
  for (double x : values) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InvalidParameter("sample values must be finite and >= 0, got " + format_double(x));
    }
  }
}

// ---------------------------------------------------------------------------
// Densities

double pdf(const ExpParams& d, double x) {
  require_x(x);
  return d.lambda() * std::exp(-d.lambda() * x);
}

double pdf(const ErlangParams& d, double x) {
  require_x(x);
  return std::exp(erlang_log_pdf(d.n(), d.lambda(), x));
}

double pdf(const RateVector& d, double x) {
  require_x(x);
  double s = 0.0;
  for (std::size_t j = 0; j < d.rates().size(); ++j) {
    s += d.weights()[j] * d.rates()[j] * std::exp(-d.rates()[j] * x);
  }
  return std::max(s, 0.0);
}

// f(x) = mu e^{-mu x} v^n P(n, beta x), mu = lambda / w. This is the
// (lambda/w) e^{-lambda x / w} (w/(w-1))^n [1 - Q(n, (w-1) lambda x / w)] form;
// for w < 1 both v^n and P(n, beta x) carry the sign (-1)^n, so the product is
// evaluated in log space with the signs cancelled.
double log_pdf(const EMEParams& d, double x) {
  require_x(x);
  if (d.erlang_limit()) return erlang_log_pdf(d.n() + 1, d.lambda(), x);
  if (x == 0.0) return kNegInf;
  const double mu = d.odd_rate();
  const SignedLog p = log_regularized_lower_gamma_int(d.n(), d.beta() * x);
  if (p.sign == 0) return kNegInf;
  return std::log(mu) - mu * x + d.n() * std::log(std::abs(d.v())) + p.log_abs;
}

double pdf(const EMEParams& d, double x) {
  require_x(x);
  if (x == 0.0 && !d.erlang_limit()) return 0.0;
  return std::exp(log_pdf(d, x));
}

double pdf(const Distribution& d, double x) {
  return std::visit([x](const auto& p) { return pdf(p, x); }, d);
}

double log_pdf(const ExpParams& d, double x) {
  require_x(x);
  return std::log(d.lambda()) - d.lambda() * x;
}

double log_pdf(const ErlangParams& d, double x) {
  require_x(x);
  return erlang_log_pdf(d.n(), d.lambda(), x);
}

double log_pdf(const RateVector& d, double x) {
  const double f = pdf(d, x);
  return f > 0.0 ? std::log(f) : kNegInf;
}

double log_pdf(const Distribution& d, double x) {
  return std::visit([x](const auto& p) { return log_pdf(p, x); }, d);
}

// ---------------------------------------------------------------------------
// Distribution functions

double cdf(const ExpParams& d, double x) {
  require_x(x);
  return -std::expm1(-d.lambda() * x);
}

double cdf(const ErlangParams& d, double x) {
  require_x(x);
  return std::clamp(regularized_lower_gamma_int(d.n(), d.lambda() * x), 0.0, 1.0);
}

double cdf(const RateVector& d, double x) {
  require_x(x);
  double s = 0.0;
  for (std::size_t j = 0; j < d.rates().size(); ++j) s += d.weights()[j] * std::exp(-d.rates()[j] * x);
  return std::clamp(1.0 - s, 0.0, 1.0);
}

// Integrating the density term by term with
//   int_0^x y^{n-1} e^{-beta y} dy = (n-1)! P(n, beta x) / beta^n
// (an identity of the finite sum, so it holds for beta of either sign) gives
//   F(x) = P(n, lambda x) - e^{-mu x} v^n P(n, beta x) = P(n, lambda x) - f(x) / mu,
//   1 - F(x) = Q(n, lambda x) + f(x) / mu.
// The survival form adds two nonnegative terms, so it is used in the upper
// half; the lower half uses the difference form.
double cdf(const EMEParams& d, double x) {
  require_x(x);
  if (d.erlang_limit()) return cdf(ErlangParams(d.n() + 1, d.lambda()), x);
  if (x == 0.0) return 0.0;
  const double f_over_mu = pdf(d, x) / d.odd_rate();
  const double lx = d.lambda() * x;
  const double survival = regularized_upper_gamma_int(d.n(), lx) + f_over_mu;
  if (survival < 0.5) return std::clamp(1.0 - survival, 0.0, 1.0);
  return std::clamp(regularized_lower_gamma_int(d.n(), lx) - f_over_mu, 0.0, 1.0);
}

double cdf(const Distribution& d, double x) {
  return std::visit([x](const auto& p) { return cdf(p, x); }, d);
}

// ---------------------------------------------------------------------------
// Laplace transforms

double laplace(const ExpParams& d, double t) {
  require_t(t);
  return d.lambda() / (d.lambda() + t);
}

double laplace(const ErlangParams& d, double t) {
  require_t(t);
  return std::pow(d.lambda() / (d.lambda() + t), d.n());
}

double laplace(const RateVector& d, double t) {
  require_t(t);
  double p = 1.0;
  for (double r : d.rates()) p *= r / (r + t);
  return p;
}

double laplace(const EMEParams& d, double t) {
  require_t(t);
  const double mu = d.odd_rate();
  return mu / (mu + t) * std::pow(d.lambda() / (d.lambda() + t), d.n());
}

double laplace(const Distribution& d, double t) {
  return std::visit([t](const auto& p) { return laplace(p, t); }, d);
}

// ---------------------------------------------------------------------------
// Moments

Moments moments(const ExpParams& d) { return {1.0 / d.lambda(), 1.0 / (d.lambda() * d.lambda())}; }

Moments moments(const ErlangParams& d) {
  return {d.n() / d.lambda(), d.n() / (d.lambda() * d.lambda())};
}

Moments moments(const RateVector& d) {
  Moments m{0.0, 0.0};
  for (double r : d.rates()) {
    m.mean += 1.0 / r;
    m.variance += 1.0 / (r * r);
  }
  return m;
}

Moments moments(const EMEParams& d) {
  const double l2 = d.lambda() * d.lambda();
  return {(d.n() + d.w()) / d.lambda(), (d.n() + d.w() * d.w()) / l2};
}

Moments moments(const Distribution& d) {
  return std::visit([](const auto& p) { return moments(p); }, d);
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

struct Drawer {
  RandomStream& rng;

  double operator()(const ExpParams& d) const { return rng.exponential(d.lambda()); }

  double operator()(const ErlangParams& d) const {
    double s = 0.0;
    for (int k = 0; k < d.n(); ++k) s += rng.exponential(d.lambda());
    return s;
  }

  double operator()(const RateVector& d) const {
    double s = 0.0;
    for (double r : d.rates()) s += rng.exponential(r);
    return s;
  }

  double operator()(const EMEParams& d) const {
    double s = 0.0;
    for (int k = 0; k < d.n(); ++k) s += rng.exponential(d.lambda());
    return s + rng.exponential(d.odd_rate());
  }
};

}  // namespace

double draw(const Distribution& d, RandomStream& rng) { return std::visit(Drawer{rng}, d); }

SampleBatch sample(const Distribution& d, std::size_t count, RandomStream& rng) {
  if (count == 0) throw InvalidParameter("sample count must be >= 1");
  SampleBatch batch;
  batch.label = describe(d);
  batch.values.reserve(count);
  const Drawer drawer{rng};
  for (std::size_t i = 0; i < count; ++i) batch.values.push_back(std::visit(drawer, d));
  return batch;
}

std::string family_name(const Distribution& d) {
  static constexpr const char* names[] = {"exp", "erlang", "hypo", "eme"};
  return names[d.index()];
}

std::string describe(const Distribution& d) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExpParams>) {
          os << "Exp(lambda=" << format_double(p.lambda()) << ")";
        } else if constexpr (std::is_same_v<T, ErlangParams>) {
          os << "Erlang(n=" << p.n() << ", lambda=" << format_double(p.lambda()) << ")";
        } else if constexpr (std::is_same_v<T, RateVector>) {
          os << "HypoE(";
          for (std::size_t i = 0; i < p.rates().size(); ++i) os << (i ? ", " : "") << format_double(p.rates()[i]);
          os << ")";
        } else {
          os << "EME(n=" << p.n() << ", lambda=" << format_double(p.lambda()) << ", w=" << format_double(p.w())
             << ")";
        }
      },
      d);
  return os.str();
}

}  // namespace phasetype
