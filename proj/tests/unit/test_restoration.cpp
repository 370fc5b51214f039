#include <doctest.h>

#include <random>
#include <stdexcept>

#include "hypo/errors.hpp"
#include "hypo/restoration.hpp"
#include "support.hpp"

using namespace hypo;

TEST_CASE("average fill examples") {
  std::mt19937_64 rng(51);
  const Image img = testsupport::randomImage(7, 5, rng);
  const Image same = averageFill(img, Mask(7, 5));
  for (std::size_t i = 0; i < img.size(); ++i) CHECK(same.data()[i] == img.data()[i]);

  Image flat(5, 5, 0.4);
  Mask one(5, 5);
  one.setBad(2, 2, true);
  flat(2, 2) = 0.0;
  CHECK(averageFill(flat, one)(2, 2) == doctest::Approx(0.4));

  Image strip(5, 1);
  strip(0, 0) = 0.0;
  strip(4, 0) = 1.0;
  Mask corridor(5, 1);
  for (int x = 1; x <= 3; ++x) corridor.setBad(x, 0, true);
  const Image filled = averageFill(strip, corridor);
  CHECK(filled(1, 0) == 0.0);
  CHECK(filled(3, 0) == 1.0);
  CHECK(filled(2, 0) == doctest::Approx(0.5));

  CHECK_THROWS_AS(averageFill(strip, Mask(5, 1, true)), std::invalid_argument);
  Mask wide(40, 1, true);
  wide.setBad(0, 0, false);
  CHECK_THROWS_AS(averageFill(Image(40, 1), wide, 5), NumericError);
}

TEST_CASE("3x3 average truncates at the frame") {
  Image img(3, 3);
  img(0, 0) = 4.0;
  const Image avg = boxAverage3x3(img);
  CHECK(avg(0, 0) == doctest::Approx(1.0));
  CHECK(avg(1, 1) == doctest::Approx(4.0 / 9.0));
  CHECK(avg(1, 0) == doctest::Approx(4.0 / 6.0));
  CHECK(avg(2, 2) == 0.0);
}

TEST_CASE("bad boundary uses 8-connectivity") {
  Mask m(5, 5, true);
  m.setBad(0, 0, false);
  const Mask b = badBoundary(m);
  CHECK(b.bad(1, 1));
  CHECK(b.bad(1, 0));
  CHECK_FALSE(b.bad(2, 2));
  CHECK_FALSE(b.bad(0, 0));
  CHECK(b.badCount() == 3);
}

TEST_CASE("sigma examples") {
  for (DrHeight measure : {DrHeight::FiberSum, DrHeight::FiberMax}) {
    LiftedField f(AngleGrid(2), 3, 1);
    f(0, 0, 0) = 1.0;
    f(0, 1, 0) = 0.5;
    Image h0(3, 1);
    h0(0, 0) = 2.0;
    h0(1, 0) = 0.0;
    h0(2, 0) = 0.7;
    const DrState state{Mask(3, 1), f, h0, 1, measure};
    const Image s = drSigma(state);
    CHECK(s(0, 0) == doctest::Approx(1.5));
    CHECK(s(1, 0) == doctest::Approx(0.5));
    CHECK(s(2, 0) == 1.0);  // zero height
  }
  std::mt19937_64 rng(52);
  const Image img = testsupport::randomImage(8, 8, rng);
  const DrState start = drInitialize(img, Mask(8, 8), LiftParams{}, AngleGrid(6), DrHeight::FiberMax);
  const Image unit = drSigma(start);
  for (double v : unit.data()) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("DR sets shrink monotonically and interior pixels wait for the boundary") {
  std::mt19937_64 rng(53);
  const Image clean = testsupport::piecewiseSmooth(32, 32);
  for (int trial = 0; trial < 5; ++trial) {
    const Mask mask = testsupport::randomMask(32, 32, 0.2 + 0.15 * trial, rng);
    const Image img = testsupport::corrupt(clean, mask);
    DrParams params;
    params.intervals = 12;
    params.diffusion.grid = AngleGrid(12);
    params.heightMeasure = trial % 2 ? DrHeight::FiberMax : DrHeight::FiberSum;
    const DrResult res = dynamicRestoration(img, mask, params, [](const DrState& before, const DrState& after) {
      const Mask boundary = badBoundary(before.bad);
      for (std::size_t i = 0; i < after.bad.size(); ++i) {
        REQUIRE_FALSE((after.bad.bad(i) && !before.bad.bad(i)));
        if (before.bad.bad(i) && !after.bad.bad(i)) REQUIRE(boundary.bad(i));
      }
      CHECK(after.stepIndex == before.stepIndex + 1);
    });
    CHECK(res.badCounts.size() == 13);
    CHECK(res.badCounts.front() == mask.badCount());
  }
}

TEST_CASE("DR with an empty mask and one interval is plain diffusion") {
  std::mt19937_64 rng(54);
  const Image img = testsupport::randomImage(16, 16, rng);
  DrParams params;
  params.totalTime = 0.3;
  params.intervals = 1;
  params.diffusion.grid = AngleGrid(8);
  const DrResult res = dynamicRestoration(img, Mask(16, 16), params);
  DiffusionParams d = params.diffusion;
  d.totalTime = 0.3;
  d.timeSteps = DiffusionParams::stepsFor(0.3);
  const Image want = pureDiffusion(img, LiftParams{}, d);
  for (std::size_t i = 0; i < img.size(); ++i) CHECK(res.image.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-14));
  CHECK(res.badCounts == std::vector<std::size_t>{0, 0});
}

TEST_CASE("DR with a tiny time barely changes a smooth image") {
  Image img(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) img(x, y) = 0.5 + 0.3 * std::sin(0.2 * x) * std::cos(0.15 * y);
  DrParams params;
  params.totalTime = 1e-3;
  params.intervals = 1;
  const DrResult res = dynamicRestoration(img, Mask(32, 32), params);
  CHECK(testsupport::psnr(res.image, img) >= 40.0);
}

TEST_CASE("DR improves on the corrupted input") {
  std::mt19937_64 rng(55);
  const Image clean = testsupport::piecewiseSmooth(48, 48);
  const Mask mask = testsupport::randomMask(48, 48, 0.3, rng);
  const Image img = testsupport::corrupt(clean, mask);
  DrParams params;
  params.intervals = 60;
  const DrResult res = dynamicRestoration(img, mask, params);
  CHECK(testsupport::psnr(res.image, clean) > testsupport::psnr(img, clean) + 3.0);
  for (double v : res.image.data()) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("AHE stages") {
  std::mt19937_64 rng(56);
  const Image clean = testsupport::piecewiseSmooth(32, 32);
  const Mask mask = testsupport::randomMask(32, 32, 0.4, rng);
  const Image img = testsupport::corrupt(clean, mask);
  AheParams p = AheParams::defaults(0.5, 0.5, AngleGrid(12));
  p.mixWeight = 1.0;
  const AheStages st = aheStages(img, mask, p);
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (mask.bad(i)) CHECK(st.mixed.data()[i] == st.filled.data()[i]);
    else CHECK(st.mixed.data()[i] == img.data()[i]);
  }
  CHECK(p.weak.totalTime == doctest::Approx(0.05));

  const Image noMask = ahe(clean, Mask(32, 32), p);
  const Image weak = pureDiffusion(clean, p.lift, p.weak);
  for (std::size_t i = 0; i < clean.size(); ++i) CHECK(noMask.data()[i] == doctest::Approx(weak.data()[i]).epsilon(1e-14));
}

TEST_CASE("drivers are deterministic") {
  std::mt19937_64 rng(57);
  const Image clean = testsupport::piecewiseSmooth(24, 24);
  const Mask mask = testsupport::randomMask(24, 24, 0.3, rng);
  const Image img = testsupport::corrupt(clean, mask);
  const AheParams p = AheParams::defaults(0.5, 0.25, AngleGrid(8));
  const Image a = ahe(img, mask, p);
  const Image b = ahe(img, mask, p);
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a.data()[i] == b.data()[i]);
}
