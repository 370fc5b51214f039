#pragma once

// Varying-coefficient hypoelliptic diffusion
//
//   d psi / dt = (1/2) b(x,y) (cos theta d_x + sin theta d_y)^2 psi + a(x,y) d^2 psi / d theta^2
//
// integrated in the spatial domain. The 1/2 on the directional term follows
// the same convention as the spectral solver, so a == beta^2 and b == 1
// reproduce diffuse() up to discretization error.

#include "hypo/grid.hpp"

namespace hypo {

struct VaryingCoeffParams {
  double a0 = 0.0;
  double a1 = 0.25;  // beta^2 for beta = 0.5
  double b0 = 0.0;
  double b1 = 1.0;
  double epsSigma = 2.0;
  double epsStar = 0.1;
  double beta = 0.5;  // only used to derive a1 via withBeta()
  double totalTime = 1.0;
  int timeSteps = 32;

  double step() const noexcept { return totalTime / timeSteps; }
  void validate() const;

  /// Defaults with a1 = beta^2.
  static VaryingCoeffParams withBeta(double beta);
};

struct CoefficientField {
  Image a;
  Image b;
};

/// Exact Euclidean distance (pixels) from every pixel to the nearest bad
/// pixel; +infinity everywhere when the mask has no bad pixel.
Image distanceToBad(const Mask& mask);

/// eps = exp(-d^2 / epsSigma) with d = distanceToBad(mask).
Image epsilonMap(const Mask& mask, double epsSigma);

/// a = a0 + a1 eps where (a0 + a1 eps) / (a0 + a1) > epsStar, else 0; same for b.
CoefficientField coefficientField(const Mask& mask, const VaryingCoeffParams& params);

/// Strang-split Crank-Nicolson integration: half step in theta (per-pixel
/// periodic tridiagonal solve), full directional step (per-slice sparse
/// solve by BiCGSTAB), half step in theta. Pixels where both coefficients
/// vanish are left bit-for-bit unchanged.
LiftedField diffuseVarying(const LiftedField& field, const CoefficientField& coeffs,
                           const VaryingCoeffParams& params);

inline constexpr double kDirectionalSolveTolerance = 1e-8;
inline constexpr int kDirectionalSolveMaxIterations = 500;

}  // namespace hypo
