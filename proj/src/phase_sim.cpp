#include "phasetype/phase_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phasetype/errors.hpp"
#include "phasetype/format.hpp"
#include "phasetype/parallel.hpp"

namespace phasetype::sim {

namespace {

constexpr double kKsCritical1Pct = 1.63;

void fill_chunk(const StageChain& chain, RandomStream& rng, double* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    double t = 0.0;
    for (double r : chain.rates()) t += rng.exponential(r);
    out[i] = t;
  }
}

std::string chain_label(const StageChain& chain) {
  std::string s = "absorption[";
  for (std::size_t i = 0; i < chain.size(); ++i) s += (i ? "," : "") + format_double(chain.rates()[i]);
  return s + "]";
}

}  // namespace

StageChain::StageChain(std::vector<double> stage_rates) : rates_(std::move(stage_rates)) {
  if (rates_.empty()) throw InvalidParameter("stage chain needs at least one stage");
  for (double r : rates_) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidParameter("stage rates must be positive, got " + format_double(r));
  }
}

StageChain eme_chain(int k, double lambda1, double lambda2) {
  if (k < 1) throw InvalidParameter("eme_chain: k must be >= 1, got " + std::to_string(k));
  std::vector<double> rates(static_cast<std::size_t>(k), lambda1);
  rates.push_back(lambda2);
  return StageChain(std::move(rates));
}

std::optional<Distribution> absorption_law(const StageChain& chain) {
  const auto r = chain.rates();
  if (r.size() == 1) return ExpParams(r[0]);
  if (std::all_of(r.begin(), r.end(), [&](double x) { return x == r[0]; })) {
    return ErlangParams(static_cast<int>(r.size()), r[0]);
  }
  if (std::all_of(r.begin(), r.end() - 1, [&](double x) { return x == r[0]; })) {
    return EMEParams(static_cast<int>(r.size() - 1), r[0], r[0] / r.back());
  }
  try {
    return RateVector(std::vector<double>(r.begin(), r.end()));
  } catch (const InvalidParameter&) {
    return std::nullopt;
  }
}

SampleBatch simulate_absorption(const StageChain& chain, std::size_t count, RandomStream& rng) {
  if (count == 0) throw InvalidParameter("simulate_absorption: count must be >= 1");
  SampleBatch out{std::vector<double>(count), chain_label(chain)};
  fill_chunk(chain, rng, out.values.data(), count);
  return out;
}

SampleBatch simulate_absorption(const StageChain& chain, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw InvalidParameter("simulate_absorption: count must be >= 1");
  SampleBatch out{std::vector<double>(count), chain_label(chain)};
  const std::size_t chunks = parallel::chunk_count(count);
#pragma omp parallel for schedule(static) if (chunks > 1)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * parallel::kChunkSize;
    const std::size_t hi = std::min(lo + parallel::kChunkSize, count);
    RandomStream rng(seed, {stream_key("simulate"), static_cast<std::uint64_t>(c)});
    fill_chunk(chain, rng, out.values.data() + lo, hi - lo);
  }
  return out;
}

namespace reference {

SampleBatch simulate_absorption(const StageChain& chain, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw InvalidParameter("simulate_absorption: count must be >= 1");
  SampleBatch out{{}, chain_label(chain)};
  out.values.reserve(count);
  for (std::size_t c = 0; c * parallel::kChunkSize < count; ++c) {
    RandomStream rng(seed, {stream_key("simulate"), static_cast<std::uint64_t>(c)});
    const std::size_t m = std::min(parallel::kChunkSize, count - c * parallel::kChunkSize);
    for (std::size_t i = 0; i < m; ++i) {
      double t = 0.0;
      for (double r : chain.rates()) t += rng.exponential(r);
      out.values.push_back(t);
    }
  }
  return out;
}

}  // namespace reference

double ks_distance(std::span<const double> values, const Distribution& dist) {
  if (values.empty()) throw InvalidParameter("ks_distance: empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(dist, sorted[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

SimResult validate_against(SampleBatch times, const Distribution& dist) {
  times.validate();
  const double d = ks_distance(times.values, dist);
  const double crit = kKsCritical1Pct / std::sqrt(static_cast<double>(times.size()));
  return SimResult{std::move(times), d, crit, d < crit, dist};
}

}  // namespace phasetype::sim
