#include "core/rng.hpp"

#include <cmath>

namespace regstop {

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t CounterRng::word(uint64_t counter) const {
  const uint64_t key = mix64(seed_ ^ (stream_ * 0xbf58476d1ce4e5b9ull));
  return mix64(key ^ (counter * 0x94d049bb133111ebull));
}

double CounterRng::uniform(uint64_t counter) const {
  // top 53 bits, shifted into (0,1) by a half-ulp offset so log() is safe
  return (static_cast<double>(word(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(uint64_t counter) const {
  const uint64_t j = counter >> 1;
  const double u1 = uniform(2 * j);
  const double u2 = uniform(2 * j + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  return (counter & 1) ? r * std::sin(a) : r * std::cos(a);
}

uint64_t derive_seed(uint64_t master_seed, uint64_t index) {
  return mix64(master_seed ^ mix64(index + 1));
}

std::vector<double> gaussian_vector(uint64_t seed, uint64_t stream, int len) {
  CounterRng rng(seed, stream);
  std::vector<double> v(static_cast<size_t>(len));
  for (int i = 0; i < len; ++i) v[static_cast<size_t>(i)] = rng.normal(static_cast<uint64_t>(i));
  return v;
}

}  // namespace regstop
