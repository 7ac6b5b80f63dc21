#pragma once

#include <cstdint>
#include <vector>

namespace asn {

/// Unit-variance white Gaussian noise.
std::vector<double> white_noise(std::size_t n, std::uint64_t seed);

/// Synthetic speech-like excitation: white noise through a leaky integrator
/// (about -6 dB/octave above ~250 Hz) with a 4 Hz syllabic envelope.
/// Normalized to unit RMS.
std::vector<double> speech_like(std::size_t n, double sample_rate, std::uint64_t seed);

}  // namespace asn
