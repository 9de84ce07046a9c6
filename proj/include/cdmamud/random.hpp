#pragma once

#include <cstdint>
#include <random>

namespace cdmamud {

using Rng = std::mt19937_64;

// Independent random streams of one trial. Keeping them apart means that a
// parameter which only changes how much one stream is consumed (swarm
// settings, CSI error bounds) leaves the other streams untouched.
enum class Stream : std::uint64_t {
  draws = 1,  // spreading codes, channel, symbols, noise
  swarm = 2,  // particle initialisation and updates
  csi = 3,    // channel-estimate corruption
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Counter-based seed derivation: any (point, trial, stream) can be replayed
// in isolation from the master seed alone.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point, std::uint64_t trial,
                                    Stream stream) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ point);
  h = splitmix64(h ^ trial);
  return splitmix64(h ^ static_cast<std::uint64_t>(stream));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t point, std::uint64_t trial, Stream stream) {
  return Rng(derive_seed(master, point, trial, stream));
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace cdmamud
