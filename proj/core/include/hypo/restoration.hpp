#pragma once

// Mask-aware inpainting drivers built on the diffusion solvers: Dynamic
// Restoration (DR) and Averaging and Hypoelliptic Evolution (AHE).

#include <cstddef>
#include <functional>
#include <vector>

#include "hypo/grid.hpp"
#include "hypo/lift.hpp"
#include "hypo/spatial.hpp"
#include "hypo/spectral.hpp"

namespace hypo {

/// Clamps every value into [0, 1].
Image clampUnit(Image img);

/// Lift, constant-coefficient diffusion, sum projection, clamp.
Image pureDiffusion(const Image& img, const LiftParams& lift, const DiffusionParams& diffusion);

/// Fills bad pixels by repeated double-buffered sweeps: a bad pixel with at
/// least one filled 8-neighbour takes the mean of its filled neighbours.
/// Good pixels are never modified. Throws if every pixel is bad or the sweep
/// count exceeds maxSweeps.
Image averageFill(const Image& img, const Mask& mask, int maxSweeps = 100000);

/// Mean over the 3x3 neighbourhood (truncated at the frame).
Image boxAverage3x3(const Image& img);

/// Bad pixels with at least one good 8-neighbour.
Mask badBoundary(const Mask& bad);

/// Fiber height used by the sigma rescaling.
enum class DrHeight {
  FiberSum,  // sum over the fiber, matching projectSum
  FiberMax,  // max over the fiber
};

struct DrState {
  Mask bad;             // B(r); G(r) is its complement
  LiftedField field;    // psi at t_r
  Image initialHeight;  // height of the initial lift
  int stepIndex = 0;
  DrHeight heightMeasure = DrHeight::FiberSum;
};

struct DrParams {
  double totalTime = 1.0;
  int intervals = 60;
  int stepsPerInterval = 0;  // 0: enough Crank-Nicolson steps to keep dt <= 1/32
  DiffusionParams diffusion;  // beta, angle grid, symmetry flag (time fields ignored)
  LiftParams lift;
  DrHeight heightMeasure = DrHeight::FiberSum;

  void validate() const;
};

/// Height of every fiber under the given measure.
Image fiberHeight(const LiftedField& field, DrHeight measure);

DrState drInitialize(const Image& img, const Mask& mask, const LiftParams& lift,
                     const AngleGrid& grid, DrHeight measure = DrHeight::FiberSum);

/// sigma = (h0 + h) / (2 h) with h the current fiber height; 1 where h <= 0.
Image drSigma(const DrState& state);

/// One DR interval of length tau. diffusion.totalTime is replaced by tau.
DrState drStep(const DrState& state, double tau, const DiffusionParams& diffusion);

struct DrResult {
  Image image;
  std::vector<std::size_t> badCounts;  // |B(r)| for r = 0..n
};

using DrObserver = std::function<void(const DrState& before, const DrState& after)>;

DrResult dynamicRestoration(const Image& img, const Mask& mask, const DrParams& params,
                            const DrObserver& observer = {});

struct AheParams {
  int fillMaxSweeps = 100000;
  VaryingCoeffParams strong;
  double mixWeight = 0.5;
  DiffusionParams weak;  // small totalTime
  LiftParams lift;

  /// Defaults with weak time = strong time / 10 on the given angle grid.
  static AheParams defaults(double beta, double strongTime, const AngleGrid& grid);
  void validate() const;
};

struct AheStages {
  Image filled;    // step 1
  Image strong;    // step 2
  Image mixed;     // step 3
  Image result;    // step 4, clamped
};

AheStages aheStages(const Image& img, const Mask& mask, const AheParams& params);
Image ahe(const Image& img, const Mask& mask, const AheParams& params);

}  // namespace hypo
