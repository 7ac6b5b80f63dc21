#include "asn/signals.hpp"

#include <cmath>
#include <numbers>

#include "asn/random.hpp"

namespace asn {

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = normal(rng);
  return out;
}

std::vector<double> speech_like(std::size_t n, double sample_rate, std::uint64_t seed) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  constexpr double kSyllableRate = 4.0;
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);

  // Pole chosen so the tilt corner sits near 250 Hz at the given rate.
  const double pole = std::exp(-kTwoPi * 250.0 / sample_rate);
  const double envelope_phase = phase(rng);

  std::vector<double> out(n);
  double state = 0.0;
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    state = pole * state + normal(rng);
    const double t = static_cast<double>(i) / sample_rate;
    const double env = 0.1 + 0.9 * 0.5 * (1.0 - std::cos(kTwoPi * kSyllableRate * t + envelope_phase));
    out[i] = env * state;
    energy += out[i] * out[i];
  }
  const double rms = std::sqrt(energy / static_cast<double>(n));
  if (rms > 0.0)
    for (auto& v : out) v /= rms;
  return out;
}

}  // namespace asn
