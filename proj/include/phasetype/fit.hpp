#pragma once

#include <span>
#include <vector>

#include "phasetype/distributions.hpp"

namespace phasetype {

struct FitOptions {
  int max_iterations = 500;
  double relative_tolerance = 1e-9;
};

struct EmeFit {
  EMEParams params;
  double log_likelihood;
  int iterations;
  /// Log-likelihood at the method-of-moments start the search began from.
  double start_log_likelihood;
};

/// sum_i log pdf(params, x_i), chunk-parallel.
double eme_log_likelihood(const EMEParams& params, std::span<const double> data);

/// Maximum-likelihood (lambda, w) for a fixed stage count n.
///
/// Nelder-Mead in (log lambda, log w), started from the method-of-moments
/// solutions of mean = (n+w)/lambda, var = (n+w^2)/lambda^2 (both roots of
/// the quadratic in w are tried; the better optimum wins). The returned
/// log-likelihood is never below the start value.
///
/// Throws DegenerateData when all values coincide, InvalidParameter for an
/// empty batch or nonpositive values, ConvergenceError when the iteration
/// cap is hit while the objective is still improving.
EmeFit fit_eme_mle(const SampleBatch& data, int n, const FitOptions& options = {});

/// Fits n = 1..n_max and returns the best by log-likelihood. Values of n
/// whose fit fails to converge are skipped; if every n fails the last error
/// is rethrown.
EmeFit fit_eme_mle_search(const SampleBatch& data, int n_max, const FitOptions& options = {});

}  // namespace phasetype
