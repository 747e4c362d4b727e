#pragma once

#include <cstddef>
#include <vector>

namespace phasetype::parallel {

/// Work is split into chunks of this many items regardless of the thread
/// count, and per-chunk partials are combined in chunk order. Results are
/// therefore bit-identical for any OMP_NUM_THREADS.
inline constexpr std::size_t kChunkSize = 4096;

inline std::size_t chunk_count(std::size_t items) { return (items + kChunkSize - 1) / kChunkSize; }

/// sum_{i < count} term(i), evaluated chunk-parallel.
template <class Term>
double chunked_sum(std::size_t count, Term term) {
  const std::size_t chunks = chunk_count(count);
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static) if (chunks > 1)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunkSize;
    const std::size_t hi = lo + kChunkSize < count ? lo + kChunkSize : count;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace phasetype::parallel
