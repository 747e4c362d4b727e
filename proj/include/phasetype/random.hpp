#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace phasetype {

/// Seed used by every entry point when the caller does not supply one.
inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// Stable 64-bit FNV-1a hash of a stream name. Used to derive named
/// sub-streams ("gof-bootstrap", "simulate", ...) from a single seed.
constexpr std::uint64_t stream_key(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// A reproducible random stream. The engine is seeded through
/// std::seed_seq from the root seed plus a derivation path, so the state
/// for (seed, path) is identical on every conforming platform.
///
/// A stream is not thread-safe; derive one per thread or per replicate.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});

  /// Uniform on (0, 1], 53 bits of resolution.
  double uniform_open0() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double standard_exponential();
  double exponential(double rate) { return standard_exponential() / rate; }
  double standard_normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace phasetype
