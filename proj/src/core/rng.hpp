#pragma once

#include <cstdint>
#include <vector>

namespace regstop {

/// Counter-based random generator, algorithm "splitmix-counter v1".
///
/// Every draw is a pure function of (seed, stream, counter):
///   key     = mix64(seed ^ (stream * 0xbf58476d1ce4e5b9))
///   word(i) = mix64(key ^ (i * 0x94d049bb133111eb))
/// with mix64 the SplitMix64 finalizer. Uniforms map the top 53 bits of a
/// word into (0,1) (never exactly 0 or 1); normals are a Box-Muller pair
/// built from the uniforms at counters 2j and 2j+1. There is no hidden
/// state, so any element of any stream can be regenerated independently,
/// which is what makes noise realizations reproducible run-to-run.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

  uint64_t word(uint64_t counter) const;
  double uniform(uint64_t counter) const;   // in (0,1)
  double normal(uint64_t counter) const;    // standard normal

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

 private:
  uint64_t seed_;
  uint64_t stream_;
};

/// SplitMix64 finalizer; exposed because seed derivation reuses it.
uint64_t mix64(uint64_t x);

/// Derives the noise seed for one noise-level index from a master seed, so
/// each delta in a sweep gets an independent, reproducible stream.
uint64_t derive_seed(uint64_t master_seed, uint64_t index);

/// len independent standard normals from the given (seed, stream).
std::vector<double> gaussian_vector(uint64_t seed, uint64_t stream, int len);

}  // namespace regstop
