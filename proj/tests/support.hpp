#pragma once

// Synthetic inputs shared by the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <random>

#include "hypo/grid.hpp"

namespace testsupport {

inline hypo::Image randomImage(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  hypo::Image img(w, h);
  for (double& v : img.data()) v = u(rng);
  return img;
}

inline hypo::LiftedField randomField(const hypo::AngleGrid& grid, int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  hypo::LiftedField f(grid, w, h);
  for (double& v : f.data()) v = u(rng);
  return f;
}

/// Each pixel bad with probability p.
inline hypo::Mask randomMask(int w, int h, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution bad(p);
  hypo::Mask m(w, h);
  for (std::size_t i = 0; i < m.size(); ++i) m.setBad(i, bad(rng));
  return m;
}

/// Corrupted pixels set to 0.
inline hypo::Image corrupt(const hypo::Image& img, const hypo::Mask& mask) {
  hypo::Image out = img;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (mask.bad(x, y)) out(x, y) = 0.0;
  return out;
}

/// Piecewise-smooth scene: shaded background, a disc and a rotated bar,
/// values in [0, 1].
inline hypo::Image piecewiseSmooth(int w, int h) {
  hypo::Image img(w, h);
  const double cx = 0.38 * w, cy = 0.42 * h, rad = 0.22 * std::min(w, h);
  const double ang = 0.5;
  const double c = std::cos(ang), s = std::sin(ang);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = 0.25 + 0.2 * double(x) / w + 0.1 * std::sin(2.0 * std::numbers::pi * y / h);
      if (std::hypot(x - cx, y - cy) < rad) v = 0.8 - 0.1 * double(y) / h;
      const double u = (x - 0.65 * w) * c + (y - 0.6 * h) * s;
      const double t = -(x - 0.65 * w) * s + (y - 0.6 * h) * c;
      if (std::abs(u) < 0.3 * w && std::abs(t) < 0.05 * h) v = 0.1;
      img(x, y) = v;
    }
  return img;
}

inline double mse(const hypo::Image& a, const hypo::Image& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

/// Peak signal-to-noise ratio for unit-range images.
inline double psnr(const hypo::Image& a, const hypo::Image& b) {
  return 10.0 * std::log10(1.0 / mse(a, b));
}

template <class A, class B>
double relativeL2(const A& got, const B& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    const double d = got[i] - want[i];
    num += d * d;
    den += want[i] * want[i];
  }
  return std::sqrt(num / den);
}

}  // namespace testsupport
