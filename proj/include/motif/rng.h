#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace motif {

/// All randomness flows through this engine and the helpers below, which fix the
/// mapping from raw 64-bit draws to values so RNG streams can be replayed exactly.
using Rng = std::mt19937_64;

uint64_t mix64(uint64_t x);
uint64_t hash_name(std::string_view name);

/// Independent stream for (seed, name, index), e.g. (global seed, origin_id, view index).
Rng derive_stream(uint64_t seed, std::string_view name, uint64_t index = 0);

/// (draw >> 11) * 2^-53, in [0, 1).
double uniform01(Rng& rng);
/// Uniform in [0, n) by rejection on the top of the 64-bit range, then modulo. n > 0.
uint64_t uniform_index(Rng& rng, uint64_t n);
/// Inclusive range.
int uniform_int(Rng& rng, int lo, int hi);
double uniform_real(Rng& rng, double lo, double hi);
bool bernoulli(Rng& rng, double p);
/// Box-Muller on two uniform01 draws.
double standard_normal(Rng& rng);

std::string rng_state(const Rng& rng);
void restore_rng_state(Rng& rng, const std::string& state);

}  // namespace motif
