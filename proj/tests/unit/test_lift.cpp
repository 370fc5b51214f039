#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hypo/lift.hpp"
#include "support.hpp"

using namespace hypo;

TEST_CASE("gaussian kernel is normalized and symmetric") {
  for (double sigma : {0.5, 1.0, 2.3}) {
    const auto k = gaussianKernel(sigma);
    CHECK(k.size() == 2 * static_cast<std::size_t>(std::ceil(4 * sigma)) + 1);
    double sum = 0.0;
    for (double v : k) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 0; i < k.size(); ++i) CHECK(k[i] == k[k.size() - 1 - i]);
  }
}

TEST_CASE("smoothing preserves constants") {
  const Image img(9, 5, 0.3);
  const Image s = gaussianSmooth(img, 1.5);
  for (double v : s.data()) CHECK(v == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("orientation of a linear ramp is its gradient direction") {
  for (double phi : {0.0, 0.4, 1.2, 2.0, 2.9}) {
    Image img(32, 32);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) img(x, y) = 0.01 * (std::cos(phi) * x + std::sin(phi) * y);
    const OrientationMap om = orientationMap(img);
    const double want = std::fmod(phi, std::numbers::pi);
    for (int y = 8; y < 24; ++y)
      for (int x = 8; x < 24; ++x) {
        REQUIRE(om.angle(x, y).has_value());
        const double d = std::abs(*om.angle(x, y) - want);
        CHECK(std::min(d, std::numbers::pi - d) < 1e-9);
      }
  }
}

TEST_CASE("constant images are flat everywhere") {
  const OrientationMap om = orientationMap(Image(12, 7, 0.8));
  CHECK(om.flatCount() == 84);
}

TEST_CASE("lift puts value in the nearest bin or spreads it over flat fibers") {
  const AngleGrid grid(6);
  OrientationMap om(2, 1);
  om.setAngle(0, 0, grid.angle(2) + 0.1);
  om.setFlat(1, 0);
  Image img(2, 1);
  img(0, 0) = 0.9;
  img(1, 0) = 0.6;
  const LiftedField f = lift(img, om, grid);
  for (int r = 0; r < 6; ++r) {
    CHECK(f(r, 0, 0) == (r == 2 ? 0.9 : 0.0));
    CHECK(f(r, 1, 0) == doctest::Approx(0.1));
  }
}

TEST_CASE("projectSum inverts lift on random images") {
  std::mt19937_64 rng(21);
  for (int n : {1, 4, 30}) {
    const Image img = testsupport::randomImage(20, 13, rng);
    const Image back = projectSum(lift(img, LiftParams{}, AngleGrid(n)));
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(back.data()[i] == doctest::Approx(img.data()[i]).epsilon(1e-13));
  }
}

TEST_CASE("fixed-angle and cross lifts") {
  const AngleGrid grid(8);
  std::mt19937_64 rng(22);
  const Image img = testsupport::randomImage(6, 6, rng);
  const LiftedField f = liftFixedAngle(img, 3.0 * std::numbers::pi / 8.0, grid);
  for (int r = 0; r < 8; ++r)
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x) CHECK(f(r, x, y) == (r == 3 ? img(x, y) : 0.0));

  Image ramp(6, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) ramp(x, y) = 0.1 * y;  // gradient along +y
  const LiftedField c = liftCross(ramp, img, LiftParams{}, grid);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) CHECK(c(4, x, y) == img(x, y));
}

TEST_CASE("projectMax picks the largest fiber entry") {
  LiftedField f(AngleGrid(3), 1, 1);
  f(0, 0, 0) = 0.2;
  f(1, 0, 0) = 0.7;
  f(2, 0, 0) = -1.0;
  CHECK(projectMax(f)(0, 0) == 0.7);
  CHECK(projectSum(f)(0, 0) == doctest::Approx(-0.1));
}

TEST_CASE("lift parameters are validated") {
  CHECK_THROWS_AS((LiftParams{0.0, 1e-4}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LiftParams{1.0, -1.0}.validate()), std::invalid_argument);
}
