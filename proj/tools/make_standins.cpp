// Writes the synthetic stand-in images used by the README recipes.
//
//   hypo_make_standins <output-dir>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>

#include "hypo/image_io.hpp"

using namespace hypo;
namespace fs = std::filesystem;

namespace {

constexpr int kSize = 128;

Image scene() {
  Image img(kSize, kSize);
  const double cx = 0.38 * kSize, cy = 0.42 * kSize, rad = 0.22 * kSize;
  const double c = std::cos(0.5), s = std::sin(0.5);
  for (int y = 0; y < kSize; ++y)
    for (int x = 0; x < kSize; ++x) {
      double v = 0.25 + 0.2 * x / kSize + 0.1 * std::sin(2.0 * std::numbers::pi * y / kSize);
      if (std::hypot(x - cx, y - cy) < rad) v = 0.8 - 0.1 * y / kSize;
      const double u = (x - 0.65 * kSize) * c + (y - 0.6 * kSize) * s;
      const double t = -(x - 0.65 * kSize) * s + (y - 0.6 * kSize) * c;
      if (std::abs(u) < 0.3 * kSize && std::abs(t) < 0.05 * kSize) v = 0.1;
      img(x, y) = v;
    }
  return img;
}

// Two white stripes crossing at right angles, each broken by a dark gap.
Image stripes() {
  Image img(kSize, kSize, 0.0);
  const double half = kSize / 2.0;
  for (int y = 0; y < kSize; ++y)
    for (int x = 0; x < kSize; ++x) {
      const double a = (x - half + y - half) / std::numbers::sqrt2;
      const double b = (x - half - (y - half)) / std::numbers::sqrt2;
      const bool gapA = std::abs(b + 30.0) < 4.0;
      const bool gapB = std::abs(a - 30.0) < 4.0;
      if (std::abs(a) < 5.0 && !gapA) img(x, y) = 1.0;
      if (std::abs(b) < 5.0 && !gapB) img(x, y) = 1.0;
    }
  return img;
}

Image rings() {
  Image img(kSize, kSize);
  for (int y = 0; y < kSize; ++y)
    for (int x = 0; x < kSize; ++x) {
      const double r = std::hypot(x - kSize / 2.0, y - kSize / 2.0);
      img(x, y) = 0.5 + 0.5 * std::cos(r / 4.0);
    }
  return img;
}

Image checker() {
  Image img(kSize, kSize);
  for (int y = 0; y < kSize; ++y)
    for (int x = 0; x < kSize; ++x) img(x, y) = ((x / 16 + y / 16) % 2) ? 0.85 : 0.2;
  return img;
}

Mask scratches() {
  Mask m(kSize, kSize);
  for (int y = 0; y < kSize; ++y)
    for (int x = 0; x < kSize; ++x) {
      const int d = (x + y) % 40;
      const int e = (x - y + 4 * kSize) % 56;
      if (d < 2 || e < 2) m.setBad(x, y, true);
    }
  return m;
}

Mask randomMask(double fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bad(fraction);
  Mask m(kSize, kSize);
  for (std::size_t i = 0; i < m.size(); ++i) m.setBad(i, bad(rng));
  return m;
}

Image corrupt(Image img, const Mask& m) {
  for (std::size_t i = 0; i < img.size(); ++i)
    if (m.bad(i)) img.data()[i] = 0.0;
  return img;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: hypo_make_standins <output-dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  try {
    fs::create_directories(dir);
    const Image base = scene();
    saveImage(base, dir / "scene.pgm");
    saveImage(stripes(), dir / "stripes.pgm");
    saveImage(rings(), dir / "rings.pgm");
    saveImage(checker(), dir / "checker.pgm");

    const Mask scratch = scratches();
    saveMask(scratch, dir / "scratch_mask.pgm");
    saveImage(corrupt(base, scratch), dir / "scene_scratch.pgm");
    for (int pct : {30, 50, 80, 90}) {
      const Mask m = randomMask(pct / 100.0, 1000 + pct);
      saveMask(m, dir / ("mask_r" + std::to_string(pct) + ".pgm"));
      saveImage(corrupt(base, m), dir / ("scene_r" + std::to_string(pct) + ".pgm"));
    }

    std::ofstream cfg(dir / "curve_gap.cfg");
    cfg << "# interrupted curve: reconnect two oriented endpoints\n"
           "x_in = 0\ny_in = 0\ntheta_in = 0.4\n"
           "x_fin = 2\ny_fin = 0.5\ntheta_fin = 2.8\n"
           "a = 0\nb = 1\nbeta = 1\nintervals = 200\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
