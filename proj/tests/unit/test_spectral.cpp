#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hypo/errors.hpp"
#include "hypo/parallel.hpp"
#include "hypo/spectral.hpp"
#include "oracles/dense_generator.hpp"
#include "oracles/naive_dft.hpp"
#include "support.hpp"

using namespace hypo;
using testsupport::relativeL2;

namespace {

// Dense N x N column generator.
Eigen::MatrixXd columnGenerator(double lam, double mu, double beta, int n) {
  const double dt = std::numbers::pi / n;
  const double kappa = beta * beta / (dt * dt);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    a(r, r) = -oracle::directionalRate(lam, mu, r * dt) - 2.0 * kappa;
    a(r, (r + 1) % n) += kappa;
    a(r, (r + n - 1) % n) += kappa;
  }
  return a;
}

DiffusionParams params(double beta, double total, int steps, int n) {
  DiffusionParams p;
  p.beta = beta;
  p.totalTime = total;
  p.timeSteps = steps;
  p.grid = AngleGrid(n);
  return p;
}

}  // namespace

TEST_CASE("toSpectral agrees with a direct DFT of every slice") {
  std::mt19937_64 rng(31);
  const LiftedField f = testsupport::randomField(AngleGrid(3), 5, 4, rng);
  const SpectralField s = toSpectral(f);
  for (int r = 0; r < 3; ++r) {
    std::vector<oracle::cplx> in(f.slice(r).begin(), f.slice(r).end());
    const auto want = oracle::dft2(in, 5, 4);
    for (int l = 0; l < 4; ++l)
      for (int k = 0; k < 5; ++k) {
        const Complex got = s.column(k, l).coeffs[r];
        CHECK(std::abs(got - want[l * 5 + k]) < 1e-12);
      }
  }
  const LiftedField back = fromSpectral(s);
  CHECK(relativeL2(back.data(), f.data()) < 1e-15);
}

TEST_CASE("fromSpectral rejects spectra without conjugate symmetry") {
  SpectralField s(AngleGrid(2), 4, 4);
  std::vector<Complex> c{Complex(1.0, 0.0), Complex(0.0, 0.0)};
  s.setColumn(1, 0, c);
  CHECK_THROWS_AS(fromSpectral(s), NumericError);
}

TEST_CASE("one Crank-Nicolson step matches the dense rational update") {
  const int n = 7;
  const double beta = 0.8, tau = 0.05;
  for (auto [lam, mu] : {std::pair{0.0, 0.0}, {0.25, -0.1}, {0.5, 0.5}}) {
    const Eigen::MatrixXd a = columnGenerator(lam, mu, beta, n);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd step = (id - 0.5 * tau * a).inverse() * (id + 0.5 * tau * a);
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
    SpectralColumn col{lam, mu, {}};
    for (int i = 0; i < n; ++i) col.coeffs.emplace_back(v[i], -v[i]);
    const SpectralColumn out = evolveColumn(col, params(beta, 3 * tau, 3, n));
    const Eigen::VectorXd want = step * step * step * v;
    for (int i = 0; i < n; ++i) {
      CHECK(out.coeffs[i].real() == doctest::Approx(want[i]).epsilon(1e-13));
      CHECK(out.coeffs[i].imag() == doctest::Approx(-want[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("column evolution converges to the matrix exponential at second order") {
  const int n = 12;
  const double beta = 0.5, lam = 0.2, mu = 0.35;
  const Eigen::MatrixXd a = columnGenerator(lam, mu, beta, n);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.3 * std::cos(2.0 * i * std::numbers::pi / n);
  const Eigen::VectorXd exact = oracle::expApply(a, 1.0, v);
  double prev = 0.0;
  for (int steps : {16, 32, 64}) {
    SpectralColumn col{lam, mu, {}};
    for (int i = 0; i < n; ++i) col.coeffs.emplace_back(v[i], 0.0);
    const SpectralColumn out = evolveColumn(col, params(beta, 1.0, steps, n));
    double num = 0.0;
    for (int i = 0; i < n; ++i) num += std::norm(out.coeffs[i] - exact[i]);
    const double err = std::sqrt(num) / exact.norm();
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("full diffuse matches the dense generator on a non-square grid") {
  std::mt19937_64 rng(32);
  const int w = 5, h = 4, n = 3;
  const LiftedField f = testsupport::randomField(AngleGrid(n), w, h, rng);
  const Eigen::MatrixXd g = oracle::denseGenerator(w, h, n, 1.1);
  Eigen::VectorXd v(f.data().size());
  for (std::size_t i = 0; i < f.data().size(); ++i) v[static_cast<Eigen::Index>(i)] = f.data()[i];
  const Eigen::VectorXd exact = oracle::expApply(g, 0.5, v);
  const LiftedField out = diffuse(f, params(1.1, 0.5, 256, n));
  CHECK(relativeL2(out.data(), exact) < 1e-5);
}

TEST_CASE("diffuse conserves mass and constants") {
  std::mt19937_64 rng(33);
  const LiftedField f = testsupport::randomField(AngleGrid(10), 16, 12, rng);
  for (double beta : {0.0, 0.5, 2.0}) {
    const LiftedField out = diffuse(f, params(beta, 1.0, 32, 10));
    CHECK(out.sum() == doctest::Approx(f.sum()).epsilon(1e-12));
  }
  const LiftedField c(AngleGrid(10), 8, 8, 0.25);
  const LiftedField out = diffuse(c, params(0.5, 1.0, 8, 10));
  for (double v : out.data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("rotation symmetry is exact where it applies and a no-op elsewhere") {
  std::mt19937_64 rng(34);
  for (auto [w, h, n] : {std::tuple{16, 16, 4}, {16, 16, 8}, {12, 12, 6}, {15, 15, 4}, {16, 12, 4}, {16, 16, 5}}) {
    const LiftedField f = testsupport::randomField(AngleGrid(n), w, h, rng);
    DiffusionParams p = params(0.5, 0.5, 16, n);
    const LiftedField a = diffuse(f, p);
    p.useRotationSymmetry = true;
    const LiftedField b = diffuse(f, p);
    CHECK(relativeL2(b.data(), a.data()) < 1e-13);
  }
}

TEST_CASE("results do not depend on the thread count") {
  std::mt19937_64 rng(35);
  const LiftedField f = testsupport::randomField(AngleGrid(6), 24, 20, rng);
  const DiffusionParams p = params(0.5, 0.25, 8, 6);
  setThreadCount(1);
  const LiftedField one = diffuse(f, p);
  setThreadCount(4);
  const LiftedField four = diffuse(f, p);
  setThreadCount(0);
  for (std::size_t i = 0; i < one.data().size(); ++i) REQUIRE(one.data()[i] == four.data()[i]);
}

TEST_CASE("angular laplacian coefficient and action") {
  const AngularLaplacian lap(0.5, AngleGrid(4));
  CHECK(lap.coefficient() == doctest::Approx(0.25 / (std::numbers::pi * std::numbers::pi / 16)));
  std::vector<double> in{1.0, 0.0, 0.0, 0.0}, out(4);
  lap.apply(in, out);
  CHECK(out[0] == doctest::Approx(-2.0 * lap.coefficient()));
  CHECK(out[1] == doctest::Approx(lap.coefficient()));
  CHECK(out[3] == doctest::Approx(lap.coefficient()));
  CHECK(out[2] == 0.0);
}

TEST_CASE("invalid parameters and mismatched grids are rejected") {
  const LiftedField f(AngleGrid(4), 4, 4, 1.0);
  CHECK_THROWS_AS(diffuse(f, params(-1.0, 1.0, 4, 4)), std::invalid_argument);
  CHECK_THROWS_AS(diffuse(f, params(0.5, 0.0, 4, 4)), std::invalid_argument);
  CHECK_THROWS_AS(diffuse(f, params(0.5, 1.0, 0, 4)), std::invalid_argument);
  CHECK_THROWS_AS(diffuse(f, params(0.5, 1.0, 4, 5)), std::invalid_argument);
  CHECK(DiffusionParams::stepsFor(1.0) == 32);
  CHECK(DiffusionParams::stepsFor(1.0 / 60.0) == 1);
  CHECK(DiffusionParams::stepsFor(0.1) == 4);
}
