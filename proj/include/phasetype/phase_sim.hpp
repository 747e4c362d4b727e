#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phasetype/distributions.hpp"
#include "phasetype/random.hpp"

namespace phasetype::sim {

/// Sequential chain of transient stages, each left at its own exponential
/// rate, followed by an absorbing state. The absorption time is the sum of
/// the holding times.
class StageChain {
 public:
  explicit StageChain(std::vector<double> stage_rates);
  std::span<const double> rates() const { return rates_; }
  std::size_t size() const { return rates_.size(); }

 private:
  std::vector<double> rates_;
};

/// k stages at lambda1 followed by one stage at lambda2. With
/// lambda2 = lambda1 / w the absorption time is EME(n=k, lambda=lambda1, w).
StageChain eme_chain(int k, double lambda1, double lambda2);

/// Analytic law of the absorption time when one of the implemented families
/// covers the chain: single stage -> Exp, all equal -> Erlang, k equal then
/// one different -> EME, all distinct -> HypoE. Otherwise nullopt.
std::optional<Distribution> absorption_law(const StageChain& chain);

/// count draws from a single stream, serially.
SampleBatch simulate_absorption(const StageChain& chain, std::size_t count, RandomStream& rng);

/// count draws split into fixed-size chunks; chunk c uses the stream
/// (seed, "simulate", c). Chunks run in parallel; the output is identical for
/// any thread count and equal to reference::simulate_absorption.
SampleBatch simulate_absorption(const StageChain& chain, std::size_t count, std::uint64_t seed);

namespace reference {
SampleBatch simulate_absorption(const StageChain& chain, std::size_t count, std::uint64_t seed);
}

struct SimResult {
  SampleBatch times;
  double ks_distance;
  double critical_value;  // 1.63 / sqrt(N), asymptotic 1% level
  bool passed;
  Distribution reference;
};

/// sup_x |F_N(x) - F(x)|, taken over the sample points (both one-sided gaps).
double ks_distance(std::span<const double> values, const Distribution& dist);

SimResult validate_against(SampleBatch times, const Distribution& dist);

}  // namespace phasetype::sim
