#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace asn {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to turn (seed, tag...) tuples into independent
/// stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and an ordered list of tags.
/// derive_seed(s, {a, b}) == derive_seed(derive_seed(s, {a}), {b}).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = seed;
  for (auto t : tags) s = splitmix64(s ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream tags. Keeping them in one place guarantees calibration, training
// and evaluation never share a stream.
namespace stream {
inline constexpr std::uint64_t kTraining = 1;
inline constexpr std::uint64_t kValidation = 2;
inline constexpr std::uint64_t kCalibration = 3;
inline constexpr std::uint64_t kEvaluation = 4;
inline constexpr std::uint64_t kDetect = 5;
inline constexpr std::uint64_t kNoise = 16;
inline constexpr std::uint64_t kSignal = 17;
inline constexpr std::uint64_t kPlacement = 18;
inline constexpr std::uint64_t kResample = 19;
}  // namespace stream

}  // namespace asn
