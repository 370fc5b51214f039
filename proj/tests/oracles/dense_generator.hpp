#pragma once

// Dense (N W H) x (N W H) generator of the semidiscrete hypoelliptic
// diffusion and its exact exponential via symmetric eigendecomposition.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "naive_dft.hpp"

namespace oracle {

/// Index layout r * W * H + y * W + x.
inline Eigen::MatrixXd denseGenerator(int w, int h, int n, double beta) {
  const int wh = w * h;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n * wh, n * wh);
  const double dtheta = std::numbers::pi / n;
  const double kappa = beta * beta / (dtheta * dtheta);
  for (int r = 0; r < n; ++r) {
    const double theta = r * dtheta;
    // Spatial block: real circulant kernel from the symbol.
    std::vector<double> kernel(wh, 0.0);
    for (int dy = 0; dy < h; ++dy)
      for (int dx = 0; dx < w; ++dx) {
        cplx acc = 0.0;
        for (int l = 0; l < h; ++l)
          for (int k = 0; k < w; ++k) {
            const auto [lam, mu] = binFrequency(k, l, w, h);
            const double ph = 2.0 * std::numbers::pi * (double(k) * dx / w + double(l) * dy / h);
            acc += -directionalRate(lam, mu, theta) * cplx(std::cos(ph), std::sin(ph));
          }
        kernel[dy * w + dx] = acc.real() / wh;
      }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int y2 = 0; y2 < h; ++y2)
          for (int x2 = 0; x2 < w; ++x2) {
            const int dx = ((x - x2) % w + w) % w;
            const int dy = ((y - y2) % h + h) % h;
            g(r * wh + y * w + x, r * wh + y2 * w + x2) += kernel[dy * w + dx];
          }
    // Angular coupling.
    for (int p = 0; p < wh; ++p) {
      const int up = (r + 1) % n;
      const int dn = (r + n - 1) % n;
      g(r * wh + p, r * wh + p) += -2.0 * kappa;
      g(r * wh + p, up * wh + p) += kappa;
      g(r * wh + p, dn * wh + p) += kappa;
    }
  }
  return g;
}

/// exp(t G) v for symmetric G.
inline Eigen::VectorXd expApply(const Eigen::MatrixXd& g, double t, const Eigen::VectorXd& v) {
  const Eigen::MatrixXd sym = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd e = (t * es.eigenvalues().array()).exp();
  return es.eigenvectors() * (e.asDiagonal() * (es.eigenvectors().transpose() * v));
}

}  // namespace oracle
