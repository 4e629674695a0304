#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sdenum::rng {

// Philox4x32-10 counter-based generator. Every variate is addressed by a
// (key, counter) pair, so path generation is a pure function of
// (seed, path_index, step, component) and independent of thread scheduling.

struct Counter {
  std::uint32_t c0 = 0, c1 = 0, c2 = 0, c3 = 0;
};

struct Key {
  std::uint32_t k0 = 0, k1 = 0;
};

// Domain tags keep independent consumers of the same (seed, path) key from
// colliding on counters.
inline constexpr std::uint32_t kDomainWiener = 0u;
inline constexpr std::uint32_t kDomainInitialState = 1u;
inline constexpr std::uint32_t kDomainTest = 2u;

namespace detail {

inline constexpr std::uint32_t kMult0 = 0xD2511F53u;
inline constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mul_hilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                     std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(Counter ctr, Key key) noexcept {
  std::uint32_t c0 = ctr.c0, c1 = ctr.c1, c2 = ctr.c2, c3 = ctr.c3;
  std::uint32_t k0 = key.k0, k1 = key.k1;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    detail::mul_hilo(detail::kMult0, c0, hi0, lo0);
    detail::mul_hilo(detail::kMult1, c2, hi1, lo1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    k0 += detail::kWeyl0;
    k1 += detail::kWeyl1;
  }
  return {c0, c1, c2, c3};
}

// Uniform in the open interval (0, 1), built from 53 bits of two words.
inline double uniform_open(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(hi) << 32) | static_cast<std::uint64_t>(lo);
  return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// The seed alone selects the Philox key (after mixing, so nearby seeds give
// unrelated streams); path, step, component, and domain address the counter.
// Distinct (seed, path, step, component, domain) tuples never collide.
inline Key make_key(std::uint64_t seed) noexcept {
  const std::uint64_t mixed = splitmix64(seed);
  return {static_cast<std::uint32_t>(mixed),
          static_cast<std::uint32_t>(mixed >> 32)};
}

inline Counter make_counter(std::uint64_t path, std::uint64_t step,
                            std::uint32_t component,
                            std::uint32_t domain) noexcept {
  return {static_cast<std::uint32_t>(path),
          static_cast<std::uint32_t>(path >> 32),
          static_cast<std::uint32_t>(step), (domain << 16) | component};
}

// One standard normal variate: Box-Muller on two uniforms from one block.
inline double normal(Key key, std::uint64_t path, std::uint64_t step,
                     std::uint32_t component, std::uint32_t domain) noexcept {
  const auto w = philox4x32(make_counter(path, step, component, domain), key);
  const double u1 = uniform_open(w[0], w[1]);
  const double u2 = uniform_open(w[2], w[3]);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

inline double normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                     std::uint32_t component, std::uint32_t domain) noexcept {
  return normal(make_key(seed), path, step, component, domain);
}

}  // namespace sdenum::rng
