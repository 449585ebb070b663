#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace heavytail {

using Rng = std::mt19937_64;

/// Master seed of a deterministic job. Replica streams and sub-job seeds are
/// derived from it by hashing, so results never depend on scheduling.
struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent seed for a named sub-job ("stationary", "theory", ...).
inline Seed derive(Seed seed, std::string_view tag) {
  return Seed{splitmix64(seed.value ^ splitmix64(fnv1a64(tag)))};
}

/// Stream owned by replica `replica` of the job seeded with `seed`.
inline Rng replica_stream(Seed seed, std::uint64_t replica) {
  return Rng{splitmix64(splitmix64(seed.value) ^ splitmix64(replica + 0x632be59bd9b4e019ULL))};
}

/// Uniform on [0, 1).
inline double uniform01(Rng& rng) {
  return std::generate_canonical<double, 53>(rng);
}

/// Uniform on (0, 1]; safe to raise to negative powers.
inline double uniform_open0(Rng& rng) { return 1.0 - uniform01(rng); }

}  // namespace heavytail
