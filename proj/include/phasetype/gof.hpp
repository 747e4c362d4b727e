#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "phasetype/distributions.hpp"
#include "phasetype/random.hpp"

namespace phasetype::gof {

// Goodness-of-fit test for exponentiality.
//
// For X ~ Exp, the Laplace transform Phi satisfies, for the chosen (n, w),
//   D(t) = (w-1)^{n+1}/w^n Phi(wt) Phi^n(t) - (w-1) Phi(wt)
//          + sum_{k=1}^n ((w-1)/w)^k Phi^k(t) = 0      for all t >= 0,
// and no other law with a moment generating function near zero does. The
// test substitutes the empirical Laplace transform of the data rescaled by
// its mean, integrates N * D(t)^2 exp(-c t) over a uniform grid on
// (0, 10], and calibrates the result by parametric bootstrap from Exp(1).
// Rescaling makes the statistic scale-free and the null fully specified.

struct GofConfig {
  int n = 2;
  double w = 2.0;
  int grid_points = 64;
  double grid_decay = 1.0;
  int bootstrap_reps = 999;
  double level = 0.05;
  std::uint64_t seed = kDefaultSeed;

  /// Throws InvalidParameter on n < 1, w <= 0 or w == 1, grid_points < 1,
  /// grid_decay <= 0, bootstrap_reps < 99, level outside (0, 1).
  void validate() const;
};

inline constexpr double kGridUpper = 10.0;

struct GofStatistic {
  double statistic;
  double lambda_hat;
};

struct GofResult {
  double statistic;
  double p_value;
  double lambda_hat;
  bool reject;
  std::vector<double> replicates;
};

/// (1/N) sum_i exp(-t x_i).
double empirical_laplace(const SampleBatch& data, double t);

/// D(t) from the two transform values Phi(t) and Phi(wt).
double identity_residual(double phi_t, double phi_wt, int n, double w);

/// sum_g D(t_g)^2 exp(-c t_g) dt for an arbitrary transform, without the
/// sample-size factor. Zero (up to rounding) for an exact exponential LT.
double integrated_residual(const std::function<double(double)>& phi, const GofConfig& cfg);

/// Statistic on data already divided by its mean. Parallel over data chunks.
double statistic_of_rescaled(std::span<const double> y, const GofConfig& cfg);

GofStatistic gof_statistic(const SampleBatch& data, const GofConfig& cfg);

/// (t_g, D-hat(t_g)) for every grid node, for plotting.
std::vector<std::pair<double, double>> residual_table(const SampleBatch& data, const GofConfig& cfg);

/// Parametric bootstrap test. Replicate b draws N standard exponentials from
/// the stream (cfg.seed, "gof-bootstrap", b); replicates run in parallel and
/// the result does not depend on the thread count.
GofResult gof_test(const SampleBatch& data, const GofConfig& cfg);

/// Bootstrap null statistics for sample size N.
std::vector<double> bootstrap_replicates(std::size_t sample_size, const GofConfig& cfg);

/// p = (1 + #{T_b >= T}) / (B + 1).
double bootstrap_p_value(double statistic, std::span<const double> replicates);

// Serial kernels kept as the reference for the parallel ones. They evaluate
// every exp(-t y) directly instead of by the power recurrence on the grid.
namespace reference {

double statistic_of_rescaled(std::span<const double> y, const GofConfig& cfg);
GofStatistic gof_statistic(const SampleBatch& data, const GofConfig& cfg);
std::vector<double> bootstrap_replicates(std::size_t sample_size, const GofConfig& cfg);
GofResult gof_test(const SampleBatch& data, const GofConfig& cfg);

}  // namespace reference

}  // namespace phasetype::gof
