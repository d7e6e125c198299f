#include "motif/rng.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace motif {

uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t hash_name(std::string_view name) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

Rng derive_stream(uint64_t seed, std::string_view name, uint64_t index) {
  uint64_t x = mix64(seed);
  x = mix64(x ^ hash_name(name));
  x = mix64(x ^ index);
  return Rng(x);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

uint64_t uniform_index(Rng& rng, uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const uint64_t max = std::numeric_limits<uint64_t>::max();
  const uint64_t limit = max - (max % n);
  uint64_t r = rng();
  while (r >= limit) r = rng();
  return r % n;
}

int uniform_int(Rng& rng, int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  return lo + static_cast<int>(uniform_index(rng, static_cast<uint64_t>(hi - lo) + 1));
}

double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

double standard_normal(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string rng_state(const Rng& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

void restore_rng_state(Rng& rng, const std::string& state) {
  std::istringstream in(state);
  in >> rng;
  if (!in) throw std::runtime_error("corrupt RNG state");
}

}  // namespace motif
