#include "asn/fft.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include <fftw3.h>

namespace asn::fft {
namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

// Planning is not thread-safe in FFTW; execution with the new-array
// interface is. Plans live for the whole process.
class PlanCache {
 public:
  fftw_plan forward(std::size_t n) { return get(n, true); }
  fftw_plan backward(std::size_t n) { return get(n, false); }

 private:
  fftw_plan get(std::size_t n, bool fwd) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, fwd);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto re = alloc_real(n);
    auto cx = alloc_complex(n / 2 + 1);
    const int ni = static_cast<int>(n);
    fftw_plan p = fwd ? fftw_plan_dft_r2c_1d(ni, re.get(), cx.get(), FFTW_ESTIMATE)
                      : fftw_plan_dft_c2r_1d(ni, cx.get(), re.get(), FFTW_ESTIMATE);
    plans_.emplace(key, p);
    return p;
  }

  std::mutex mutex_;
  std::map<std::pair<std::size_t, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<Complex> rfft(std::span<const double> x, std::size_t n) {
  auto in = alloc_real(n);
  auto out = alloc_complex(n / 2 + 1);
  const std::size_t m = std::min(n, x.size());
  std::copy_n(x.begin(), m, in.get());
  std::fill(in.get() + m, in.get() + n, 0.0);
  fftw_execute_dft_r2c(cache().forward(n), in.get(), out.get());
  std::vector<Complex> result(n / 2 + 1);
  for (std::size_t k = 0; k < result.size(); ++k) result[k] = {out[k][0], out[k][1]};
  return result;
}

std::vector<double> irfft(std::span<const Complex> spectrum, std::size_t n) {
  auto in = alloc_complex(n / 2 + 1);
  auto out = alloc_real(n);
  for (std::size_t k = 0; k < n / 2 + 1; ++k) {
    const Complex c = k < spectrum.size() ? spectrum[k] : Complex{};
    in[k][0] = c.real();
    in[k][1] = c.imag();
  }
  fftw_execute_dft_c2r(cache().backward(n), in.get(), out.get());
  std::vector<double> result(out.get(), out.get() + n);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : result) v *= scale;
  return result;
}

}  // namespace asn::fft
