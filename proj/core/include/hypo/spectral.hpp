#pragma once

// Constant-coefficient hypoelliptic diffusion on the semidiscrete
// roto-translation group.
//
// Each orientation slice is taken to the spatial DFT domain, where the
// evolution decouples into one length-N ODE per spatial frequency (k, l):
//
//   dc/dt = -2 pi^2 diag(lambda cos(theta_r) + mu sin(theta_r))^2 c + Lambda_N c
//
// with Lambda_N the periodic three-point second difference in theta scaled by
// beta^2 / dtheta^2. Columns are integrated by Crank-Nicolson; every implicit
// solve is a periodic tridiagonal Thomas solve.

#include <complex>
#include <span>
#include <vector>

#include "hypo/grid.hpp"
#include "hypo/tridiagonal.hpp"

namespace hypo {

using Complex = std::complex<double>;

struct DiffusionParams {
  double beta = 0.5;
  double totalTime = 1.0;
  int timeSteps = 32;
  AngleGrid grid{30};
  bool useRotationSymmetry = false;

  double step() const noexcept { return totalTime / timeSteps; }
  void validate() const;

  /// Smallest step count keeping the time step at or below maxStep.
  static int stepsFor(double totalTime, double maxStep = 1.0 / 32.0);
};

/// The periodic second difference in theta, (Lc)_r = coeff * (c[r+1] - 2 c[r] + c[r-1]).
class AngularLaplacian {
 public:
  AngularLaplacian(double beta, const AngleGrid& grid);

  /// beta^2 / dtheta^2.
  double coefficient() const noexcept { return coeff_; }
  int size() const noexcept { return n_; }

  void apply(std::span<const double> in, std::span<double> out) const;
  void apply(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  int n_;
  double coeff_;
};

struct SpectralColumn {
  double lambda = 0.0;  // cycles per pixel
  double mu = 0.0;
  std::vector<Complex> coeffs;
};

/// All W*H spectral columns of a lifted field. Coefficient r of column (k, l)
/// is the (k, l) DFT bin of slice r, with forward normalization 1.
class SpectralField {
 public:
  SpectralField(AngleGrid grid, int width, int height);

  const AngleGrid& angleGrid() const noexcept { return grid_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const FrequencyGrid& frequencies() const noexcept { return freq_; }

  SpectralColumn column(int k, int l) const;
  void setColumn(int k, int l, std::span<const Complex> coeffs);

  /// Slice-major storage: entry (r, l, k) at r * W * H + l * W + k.
  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

 private:
  AngleGrid grid_;
  int width_;
  int height_;
  FrequencyGrid freq_;
  std::vector<Complex> data_;
};

/// Crank-Nicolson propagator for one column: the implicit matrix is factored
/// once and reused for every step.
class ColumnPropagator {
 public:
  ColumnPropagator(double lambda, double mu, const DiffusionParams& params);

  /// Advances c through params.timeSteps steps in place.
  void evolve(std::span<Complex> c) const;

 private:
  int n_;
  int steps_;
  std::vector<double> explicitDiag_;
  double explicitOff_;
  PeriodicTridiagonalSolver<double> implicit_;
};

SpectralField toSpectral(const LiftedField& field);

/// Inverse DFT with 1/(W H) normalization. Throws NumericError if the
/// imaginary residue exceeds 1e-6 of the real magnitude.
LiftedField fromSpectral(const SpectralField& spectrum);

SpectralColumn evolveColumn(const SpectralColumn& col, const DiffusionParams& params);

LiftedField diffuse(const LiftedField& field, const DiffusionParams& params);

/// Largest imaginary residue relative to the largest real magnitude seen in
/// the most recent fromSpectral call on this thread (diagnostics).
double lastImaginaryResidue() noexcept;

}  // namespace hypo
