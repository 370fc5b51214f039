#pragma once

// Direct O(n^2) 2D DFT and the per-frequency symbol of the spectral
// generator, written independently of the library.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// Forward DFT (no normalization) of a row-major W x H array.
inline std::vector<cplx> dft2(const std::vector<cplx>& in, int w, int h, int sign = -1) {
  std::vector<cplx> out(in.size());
  const double two_pi = 2.0 * std::numbers::pi;
  for (int l = 0; l < h; ++l)
    for (int k = 0; k < w; ++k) {
      cplx acc = 0.0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double ph = sign * two_pi * (double(k) * x / w + double(l) * y / h);
          acc += in[y * w + x] * cplx(std::cos(ph), std::sin(ph));
        }
      out[l * w + k] = acc;
    }
  return out;
}

inline std::vector<cplx> idft2(const std::vector<cplx>& in, int w, int h) {
  auto out = dft2(in, w, h, +1);
  for (auto& v : out) v /= double(w) * h;
  return out;
}

/// Frequency in cycles/pixel of index k on an axis of length n, with the
/// Nyquist index signed by `otherSign` (the sign of the other coordinate).
inline double axisFrequency(int k, int n, double otherFreq, bool otherIsNyquist) {
  if (n % 2 == 0 && 2 * k == n) {
    if (otherIsNyquist) return 0.5;
    return otherFreq < 0.0 ? -0.5 : 0.5;
  }
  return 2 * k < n ? double(k) / n : double(k - n) / n;
}

inline bool isNyquist(int k, int n) { return n % 2 == 0 && 2 * k == n; }

inline double plainFrequency(int k, int n) {
  return 2 * k <= n ? double(k) / n : double(k - n) / n;
}

/// (lambda, mu) for DFT bin (k, l).
inline std::pair<double, double> binFrequency(int k, int l, int w, int h) {
  const double lam0 = plainFrequency(k, w);
  const double mu0 = plainFrequency(l, h);
  const double lam = axisFrequency(k, w, mu0, isNyquist(l, h));
  const double mu = axisFrequency(l, h, lam0, isNyquist(k, w));
  return {lam, mu};
}

/// Directional decay rate 2 pi^2 (lambda cos t + mu sin t)^2.
inline double directionalRate(double lam, double mu, double theta) {
  const double d = lam * std::cos(theta) + mu * std::sin(theta);
  return 2.0 * std::numbers::pi * std::numbers::pi * d * d;
}

}  // namespace oracle
