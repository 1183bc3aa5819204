#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Seeding and sampling helpers. All draws go through uniform01() so that a
// run is reproducible bit-for-bit from its seed regardless of the standard
// library's distribution implementations.
namespace coexim::rnd {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from (seed, stream tag, member index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t member) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ member);
}

// Uniform in [0, 1), 53-bit resolution. Never returns 1.0.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + uniform01(g) * (hi - lo);
}

// Exponential inter-arrival draw; rate in events per second.
inline double exp_draw(std::mt19937_64& g, double rate) {
  return -std::log1p(-uniform01(g)) / rate;
}

}  // namespace coexim::rnd
