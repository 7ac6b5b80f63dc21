#pragma once

#include <complex>
#include <span>
#include <vector>

namespace asn::fft {

using Complex = std::complex<double>;

/// Real-to-complex DFT of `x` zero-padded (or truncated) to `n` points.
/// Returns the n/2 + 1 non-negative frequency bins.
std::vector<Complex> rfft(std::span<const double> x, std::size_t n);

/// Inverse of rfft, scaled so irfft(rfft(x, n), n) == x.
std::vector<double> irfft(std::span<const Complex> spectrum, std::size_t n);

std::size_t next_pow2(std::size_t n);

}  // namespace asn::fft
