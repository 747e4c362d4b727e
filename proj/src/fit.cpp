#include "phasetype/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "phasetype/errors.hpp"
#include "phasetype/format.hpp"
#include "phasetype/parallel.hpp"

namespace phasetype {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Search box in log coordinates, relative to the data scale.
constexpr double kLogWBound = 13.8;  // w in [1e-6, 1e6]

struct Point {
  std::array<double, 2> theta;  // (log lambda, log w)
  double value;                 // negative log-likelihood
};

class Objective {
 public:
  Objective(std::span<const double> data, int n, double log_scale) : data_(data), n_(n), log_scale_(log_scale) {}

  std::array<double, 2> clamp(std::array<double, 2> theta) const {
    theta[0] = std::clamp(theta[0], log_scale_ - kLogWBound, log_scale_ + kLogWBound);
    theta[1] = std::clamp(theta[1], -kLogWBound, kLogWBound);
    return theta;
  }

  EMEParams params(const std::array<double, 2>& theta) const {
    double w = std::exp(theta[1]);
    // Exactly 1 is not a valid record; the band around it evaluates as the
    // Erlang limit anyway.
    if (w == 1.0) w = std::nextafter(1.0, 2.0);
    return EMEParams(n_, std::exp(theta[0]), w);
  }

  double operator()(const std::array<double, 2>& theta) const {
    const double ll = eme_log_likelihood(params(theta), data_);
    return std::isfinite(ll) ? -ll : kInf;
  }

 private:
  std::span<const double> data_;
  int n_;
  double log_scale_;
};

struct SearchResult {
  Point best;
  int iterations;
};

SearchResult nelder_mead(const Objective& f, std::array<double, 2> start, const FitOptions& opt) {
  std::array<Point, 3> s;
  const std::array<std::array<double, 2>, 3> offsets{{{0.0, 0.0}, {0.1, 0.0}, {0.0, 0.2}}};
  for (std::size_t i = 0; i < 3; ++i) {
    auto th = f.clamp({start[0] + offsets[i][0], start[1] + offsets[i][1]});
    s[i] = {th, f(th)};
  }

  auto combine = [&](const std::array<double, 2>& a, const std::array<double, 2>& b, double coef) {
    return f.clamp({a[0] + coef * (b[0] - a[0]), a[1] + coef * (b[1] - a[1])});
  };

  constexpr int kLookback = 50;
  std::vector<double> best_history;
  best_history.reserve(static_cast<std::size_t>(opt.max_iterations) + 1);

  for (int it = 0; it < opt.max_iterations; ++it) {
    std::sort(s.begin(), s.end(), [](const Point& a, const Point& b) { return a.value < b.value; });
    best_history.push_back(s[0].value);
    const double spread = s[2].value - s[0].value;
    if (std::isfinite(s[0].value) && spread <= opt.relative_tolerance * std::max(std::abs(s[0].value), 1e-300)) {
      return {s[0], it};
    }

    const std::array<double, 2> centroid{(s[0].theta[0] + s[1].theta[0]) / 2, (s[0].theta[1] + s[1].theta[1]) / 2};
    const auto xr = combine(centroid, s[2].theta, -1.0);
    const double fr = f(xr);
    if (fr < s[0].value) {
      const auto xe = combine(centroid, s[2].theta, -2.0);
      const double fe = f(xe);
      s[2] = fe < fr ? Point{xe, fe} : Point{xr, fr};
      continue;
    }
    if (fr < s[1].value) {
      s[2] = {xr, fr};
      continue;
    }
    const bool outside = fr < s[2].value;
    const auto xc = outside ? combine(centroid, xr, 0.5) : combine(centroid, s[2].theta, 0.5);
    const double fc = f(xc);
    if (fc < std::min(fr, s[2].value)) {
      s[2] = {xc, fc};
      continue;
    }
    for (std::size_t i = 1; i < 3; ++i) {
      s[i].theta = combine(s[0].theta, s[i].theta, 0.5);
      s[i].value = f(s[i].theta);
    }
  }

  std::sort(s.begin(), s.end(), [](const Point& a, const Point& b) { return a.value < b.value; });
  // Cap reached. Accept a flat tail over the last kLookback iterations (e.g.
  // drifting toward w -> 0 where the likelihood approaches its Erlang
  // limit); reject a still-improving one or a cap too small to tell.
  const std::size_t h = best_history.size();
  const double earlier = h >= kLookback ? best_history[h - kLookback] : kInf;
  const double improvement = (earlier - s[0].value) / std::max(std::abs(s[0].value), 1e-300);
  if (!std::isfinite(s[0].value) || !(improvement <= opt.relative_tolerance)) {
    throw ConvergenceError("EME likelihood search hit the iteration cap (" + std::to_string(opt.max_iterations) +
                           ") with relative improvement " + format_double(improvement));
  }
  return {s[0], opt.max_iterations};
}

// Positive roots of (1-c) w^2 - 2 c n w + (n - c n^2) = 0 where c is the
// squared coefficient of variation; falls back to the vertex or to fixed
// guesses when the moments are outside the EME range.
std::vector<double> moment_starts_for_w(double cv2, int n) {
  std::vector<double> ws;
  const double a = 1.0 - cv2;
  const double disc = n * (cv2 * (n + 1) - 1.0);
  if (std::abs(a) > 1e-12 && disc >= 0.0) {
    for (double sgn : {1.0, -1.0}) {
      const double w = (cv2 * n + sgn * std::sqrt(disc)) / a;
      if (w > 0.0 && std::isfinite(w)) ws.push_back(w);
    }
  }
  if (ws.empty() && a > 0.0) ws.push_back(cv2 * n / a);
  if (ws.empty()) ws = {0.5, 2.0};
  for (double& w : ws) {
    if (std::abs(w - 1.0) < 0.05) w = w < 1.0 ? 0.95 : 1.05;
    w = std::clamp(w, 1e-5, 1e5);
  }
  return ws;
}

}  // namespace

double eme_log_likelihood(const EMEParams& params, std::span<const double> data) {
  return parallel::chunked_sum(data.size(), [&](std::size_t i) { return log_pdf(params, data[i]); });
}

EmeFit fit_eme_mle(const SampleBatch& data, int n, const FitOptions& options) {
  data.validate();
  if (n < 1) throw InvalidParameter("EME stage count n must be >= 1, got " + std::to_string(n));
  for (double x : data.values) {
    if (!(x > 0.0)) throw InvalidParameter("EME fitting needs strictly positive values");
  }
  const auto [lo, hi] = std::minmax_element(data.values.begin(), data.values.end());
  if (*lo == *hi) throw DegenerateData("all " + std::to_string(data.size()) + " values are identical");

  const double count = static_cast<double>(data.size());
  const double mean = std::accumulate(data.values.begin(), data.values.end(), 0.0) / count;
  double ss = 0.0;
  for (double x : data.values) ss += (x - mean) * (x - mean);
  const double var = ss / count;
  const double cv2 = var / (mean * mean);

  const Objective objective(data.values, n, std::log((n + 1.0) / mean));
  std::optional<SearchResult> best;
  double start_ll = -kInf;
  for (double w0 : moment_starts_for_w(cv2, n)) {
    const std::array<double, 2> start = objective.clamp({std::log((n + w0) / mean), std::log(w0)});
    start_ll = std::max(start_ll, -objective(start));
    SearchResult r = nelder_mead(objective, start, options);
    if (!best || r.best.value < best->best.value) best = r;
  }

  return EmeFit{objective.params(best->best.theta), -best->best.value, best->iterations, start_ll};
}

EmeFit fit_eme_mle_search(const SampleBatch& data, int n_max, const FitOptions& options) {
  if (n_max < 1) throw InvalidParameter("search bound n_max must be >= 1");
  std::optional<EmeFit> best;
  std::exception_ptr last_error;
  for (int n = 1; n <= n_max; ++n) {
    try {
      EmeFit f = fit_eme_mle(data, n, options);
      if (!best || f.log_likelihood > best->log_likelihood) best = f;
    } catch (const ConvergenceError&) {
      last_error = std::current_exception();
    }
  }
  if (!best) std::rethrow_exception(last_error);
  return *best;
}

}  // namespace phasetype
