#pragma once

// Lifting planar images to orientation fields and projecting back.
//
// The lift is the distributional one: a pixel's whole value goes to the
// orientation bin nearest its (smoothed) gradient direction. Pixels whose
// gradient vanishes have no preferred orientation and spread value/N over
// every bin, so project_sum(lift(f)) == f.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "hypo/grid.hpp"

namespace hypo {

struct LiftParams {
  double smoothingSigma = 1.0;     // pixels
  double gradientThreshold = 1e-4; // |grad f| at or below this is flat

  void validate() const;
};

/// Per-pixel gradient orientation in [0, pi), or flat.
class OrientationMap {
 public:
  OrientationMap(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool flat(int x, int y) const { return std::isnan(theta_[index(x, y)]); }
  std::optional<double> angle(int x, int y) const {
    const double t = theta_[index(x, y)];
    return std::isnan(t) ? std::nullopt : std::optional<double>(t);
  }

  void setFlat(int x, int y) { theta_[index(x, y)] = std::numeric_limits<double>::quiet_NaN(); }
  void setAngle(int x, int y, double theta);

  std::size_t flatCount() const noexcept;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  std::vector<double> theta_;
};

/// Separable Gaussian blur; radius ceil(4 sigma), unit-sum kernel,
/// half-sample mirror boundaries.
Image gaussianSmooth(const Image& img, double sigma);

/// Normalized 1D kernel used by gaussianSmooth (length 2 * radius + 1).
std::vector<double> gaussianKernel(double sigma);

OrientationMap orientationMap(const Image& img, const LiftParams& params = {});

LiftedField lift(const Image& img, const OrientationMap& omap, const AngleGrid& grid);
LiftedField lift(const Image& img, const LiftParams& params, const AngleGrid& grid);

/// Every pixel's value placed in the bin nearest theta0.
LiftedField liftFixedAngle(const Image& img, double theta0, const AngleGrid& grid);

/// Orientations from `structure`, values from `values`.
LiftedField liftCross(const Image& structure, const Image& values, const LiftParams& params,
                      const AngleGrid& grid);

/// out(x, y) = sum over r of field(r, x, y). No clamping.
Image projectSum(const LiftedField& field);

/// out(x, y) = max over r of field(r, x, y).
Image projectMax(const LiftedField& field);

}  // namespace hypo
