#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lexvec {

// mt19937_64 output is fixed by the standard, so seeded streams are
// reproducible across toolchains. The distributions below are hand-rolled
// for the same reason (std:: distributions are implementation-defined).
using Rng = std::mt19937_64;

// Independent sub-seed for a named pipeline stage.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index);

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform in [0, n). n must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

}  // namespace lexvec
