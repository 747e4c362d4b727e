#include "phasetype/gof.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "phasetype/errors.hpp"
#include "phasetype/format.hpp"
#include "phasetype/parallel.hpp"

namespace phasetype::gof {

void GofConfig::validate() const {
  if (n < 1) throw InvalidParameter("gof: n must be >= 1, got " + std::to_string(n));
  if (!(w > 0.0) || !std::isfinite(w) || w == 1.0) {
    throw InvalidParameter("gof: w must be positive and != 1, got " + format_double(w));
  }
  if (grid_points < 1) throw InvalidParameter("gof: grid_points must be >= 1");
  if (!(grid_decay > 0.0)) throw InvalidParameter("gof: grid_decay must be positive");
  if (bootstrap_reps < 99) {
    throw InvalidParameter("gof: bootstrap replicate count must be >= 99, got " + std::to_string(bootstrap_reps));
  }
  if (!(level > 0.0 && level < 1.0)) throw InvalidParameter("gof: level must lie in (0, 1)");
}

double empirical_laplace(const SampleBatch& data, double t) {
  if (data.values.empty()) throw InvalidParameter("empirical_laplace: empty data");
  if (!(t >= 0.0)) throw DomainError("empirical_laplace: t must be >= 0, got " + format_double(t));
  double s = 0.0;
  for (double x : data.values) s += std::exp(-t * x);
  return s / static_cast<double>(data.values.size());
}

double identity_residual(double phi_t, double phi_wt, int n, double w) {
  const double r = (w - 1.0) / w;
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    term *= r * phi_t;
    sum += term;
  }
  // term is now (r phi)^n, so the first product is (w-1) r^n phi(wt) phi^n.
  return (w - 1.0) * term * phi_wt - (w - 1.0) * phi_wt + sum;
}

namespace {

double grid_step(const GofConfig& cfg) { return kGridUpper / cfg.grid_points; }

// N * sum_g D(t_g)^2 exp(-c t_g) dt, given sum_i exp(-t_g y_i) and
// sum_i exp(-w t_g y_i) for g = 1..G.
double combine(const std::vector<double>& sum_t, const std::vector<double>& sum_wt, std::size_t count,
               const GofConfig& cfg) {
  const double step = grid_step(cfg);
  const double inv_n = 1.0 / static_cast<double>(count);
  double total = 0.0;
  for (int g = 0; g < cfg.grid_points; ++g) {
    const double t = (g + 1) * step;
    const double d = identity_residual(sum_t[g] * inv_n, sum_wt[g] * inv_n, cfg.n, cfg.w);
    total += d * d * std::exp(-cfg.grid_decay * t) * step;
  }
  return static_cast<double>(count) * total;
}

// Adds sum_{i in [lo,hi)} q_i^g for g = 1..G into acc, where q_i = exp(-base * y_i).
void accumulate_powers(std::span<const double> y, double base, int points, double* acc) {
  const std::size_t m = y.size();
  std::vector<double> q(m);
  std::vector<double> p(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) q[i] = std::exp(-base * y[i]);
  for (int g = 0; g < points; ++g) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      p[i] *= q[i];
      s += p[i];
    }
    acc[g] += s;
  }
}

std::vector<double> rescale_by_mean(std::span<const double> x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  std::vector<double> y(x.size());
  const double lambda_hat = 1.0 / mean;
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * lambda_hat;
  return y;
}

void require_positive(const SampleBatch& data) {
  if (data.values.empty()) throw InvalidParameter("gof: empty data");
  for (double x : data.values) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw InvalidParameter("gof: values must be finite and > 0, got " + format_double(x));
    }
  }
}

std::vector<double> standard_exponential_draws(std::size_t count, const GofConfig& cfg, int replicate) {
  RandomStream rng(cfg.seed, {stream_key("gof-bootstrap"), static_cast<std::uint64_t>(replicate)});
  std::vector<double> x(count);
  for (double& v : x) v = rng.standard_exponential();
  return x;
}

}  // namespace

double integrated_residual(const std::function<double(double)>& phi, const GofConfig& cfg) {
  const double step = grid_step(cfg);
  double total = 0.0;
  for (int g = 1; g <= cfg.grid_points; ++g) {
    const double t = g * step;
    const double d = identity_residual(phi(t), phi(cfg.w * t), cfg.n, cfg.w);
    total += d * d * std::exp(-cfg.grid_decay * t) * step;
  }
  return total;
}

double statistic_of_rescaled(std::span<const double> y, const GofConfig& cfg) {
  const std::size_t count = y.size();
  const std::size_t chunks = parallel::chunk_count(count);
  const auto G = static_cast<std::size_t>(cfg.grid_points);
  const double step = grid_step(cfg);
  std::vector<double> partial(2 * G * chunks, 0.0);
#pragma omp parallel for schedule(static) if (chunks > 1)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * parallel::kChunkSize;
    const std::size_t hi = std::min(lo + parallel::kChunkSize, count);
    double* acc = partial.data() + 2 * G * static_cast<std::size_t>(c);
    accumulate_powers(y.subspan(lo, hi - lo), step, cfg.grid_points, acc);
    accumulate_powers(y.subspan(lo, hi - lo), cfg.w * step, cfg.grid_points, acc + G);
  }
  std::vector<double> sum_t(G, 0.0), sum_wt(G, 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t g = 0; g < G; ++g) {
      sum_t[g] += partial[2 * G * c + g];
      sum_wt[g] += partial[2 * G * c + G + g];
    }
  }
  return combine(sum_t, sum_wt, count, cfg);
}

GofStatistic gof_statistic(const SampleBatch& data, const GofConfig& cfg) {
  require_positive(data);
  const std::vector<double> y = rescale_by_mean(data.values);
  const double mean = std::accumulate(data.values.begin(), data.values.end(), 0.0) / data.size();
  return {statistic_of_rescaled(y, cfg), 1.0 / mean};
}

std::vector<std::pair<double, double>> residual_table(const SampleBatch& data, const GofConfig& cfg) {
  require_positive(data);
  const std::vector<double> y = rescale_by_mean(data.values);
  const SampleBatch rescaled{y, data.label};
  const double step = grid_step(cfg);
  std::vector<std::pair<double, double>> rows;
  rows.reserve(static_cast<std::size_t>(cfg.grid_points));
  for (int g = 1; g <= cfg.grid_points; ++g) {
    const double t = g * step;
    rows.emplace_back(
        t, identity_residual(empirical_laplace(rescaled, t), empirical_laplace(rescaled, cfg.w * t), cfg.n, cfg.w));
  }
  return rows;
}

std::vector<double> bootstrap_replicates(std::size_t sample_size, const GofConfig& cfg) {
  const int reps = cfg.bootstrap_reps;
  std::vector<double> out(static_cast<std::size_t>(reps));
#pragma omp parallel for schedule(dynamic, 8)
  for (int b = 0; b < reps; ++b) {
    const std::vector<double> y = rescale_by_mean(standard_exponential_draws(sample_size, cfg, b));
    out[static_cast<std::size_t>(b)] = statistic_of_rescaled(y, cfg);
  }
  return out;
}

double bootstrap_p_value(double statistic, std::span<const double> replicates) {
  const auto exceed = std::count_if(replicates.begin(), replicates.end(), [&](double t) { return t >= statistic; });
  return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(replicates.size()) + 1.0);
}

GofResult gof_test(const SampleBatch& data, const GofConfig& cfg) {
  cfg.validate();
  const GofStatistic s = gof_statistic(data, cfg);
  std::vector<double> reps = bootstrap_replicates(data.size(), cfg);
  const double p = bootstrap_p_value(s.statistic, reps);
  return {s.statistic, p, s.lambda_hat, p <= cfg.level, std::move(reps)};
}

namespace reference {

double statistic_of_rescaled(std::span<const double> y, const GofConfig& cfg) {
  const auto G = static_cast<std::size_t>(cfg.grid_points);
  const double step = grid_step(cfg);
  std::vector<double> sum_t(G, 0.0), sum_wt(G, 0.0);
  for (std::size_t g = 0; g < G; ++g) {
    const double t = static_cast<double>(g + 1) * step;
    for (double v : y) {
      sum_t[g] += std::exp(-t * v);
      sum_wt[g] += std::exp(-cfg.w * t * v);
    }
  }
  return combine(sum_t, sum_wt, y.size(), cfg);
}

GofStatistic gof_statistic(const SampleBatch& data, const GofConfig& cfg) {
  require_positive(data);
  const std::vector<double> y = rescale_by_mean(data.values);
  const double mean = std::accumulate(data.values.begin(), data.values.end(), 0.0) / data.size();
  return {reference::statistic_of_rescaled(y, cfg), 1.0 / mean};
}

std::vector<double> bootstrap_replicates(std::size_t sample_size, const GofConfig& cfg) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(cfg.bootstrap_reps));
  for (int b = 0; b < cfg.bootstrap_reps; ++b) {
    out.push_back(reference::statistic_of_rescaled(rescale_by_mean(standard_exponential_draws(sample_size, cfg, b)), cfg));
  }
  return out;
}

GofResult gof_test(const SampleBatch& data, const GofConfig& cfg) {
  cfg.validate();
  const GofStatistic s = reference::gof_statistic(data, cfg);
  std::vector<double> reps = reference::bootstrap_replicates(data.size(), cfg);
  const double p = bootstrap_p_value(s.statistic, reps);
  return {s.statistic, p, s.lambda_hat, p <= cfg.level, std::move(reps)};
}

}  // namespace reference

}  // namespace phasetype::gof
