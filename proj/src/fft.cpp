#include "fft.hpp"

#include <cmath>
#include <numbers>

namespace panfuse::detail {

bool is_pow2(int n) { return n >= 1 && (n & (n - 1)) == 0; }

void fft_pow2(std::vector<std::complex<double>>& data) {
  const std::size_t n = data.size();
  if (n <= 1) return;

  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / double(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::vector<std::complex<double>> fft2_real(const std::vector<double>& img,
                                            int n) {
  std::vector<std::complex<double>> spec(std::size_t(n) * n);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] = img[i];

  std::vector<std::complex<double>> line(n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) line[x] = spec[std::size_t(y) * n + x];
    fft_pow2(line);
    for (int x = 0; x < n; ++x) spec[std::size_t(y) * n + x] = line[x];
  }
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) line[y] = spec[std::size_t(y) * n + x];
    fft_pow2(line);
    for (int y = 0; y < n; ++y) spec[std::size_t(y) * n + x] = line[y];
  }
  return spec;
}

}  // namespace panfuse::detail
