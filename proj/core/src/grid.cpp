#include "hypo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hypo {

namespace {

void requirePositive(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("grid dimensions must be positive, got " + std::to_string(width) +
                                "x" + std::to_string(height));
  }
}

double aliasedFrequency(int k, int n) {
  return k <= n / 2 ? static_cast<double>(k) / n : static_cast<double>(k - n) / n;
}

}  // namespace

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
  requirePositive(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  requirePositive(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("image data length does not match width*height");
  }
}

double Image::sum() const noexcept { return std::accumulate(data_.begin(), data_.end(), 0.0); }

Mask::Mask(int width, int height, bool bad) : width_(width), height_(height) {
  requirePositive(width, height);
  bad_.assign(static_cast<std::size_t>(width) * height, bad ? 1 : 0);
}

std::size_t Mask::badCount() const noexcept {
  return static_cast<std::size_t>(std::count(bad_.begin(), bad_.end(), std::uint8_t{1}));
}

void requireSameShape(const Image& img, const Mask& mask) {
  if (!mask.matches(img)) {
    throw std::invalid_argument("mask is " + std::to_string(mask.width()) + "x" +
                                std::to_string(mask.height()) + " but image is " +
                                std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }
}

AngleGrid::AngleGrid(int n) : n_(n) {
  if (n <= 0) throw std::invalid_argument("number of orientations must be positive");
}

int AngleGrid::nearestBin(double theta) const noexcept {
  // Half-way angles such as pi/4 on N = 30 land a rounding error below the
  // tie; the small slack sends exact ties up as intended.
  const double pos = theta * n_ / std::numbers::pi;
  const auto bin = static_cast<long long>(std::floor(pos + 0.5 + 1e-9));
  const long long m = bin % n_;
  return static_cast<int>(m < 0 ? m + n_ : m);
}

LiftedField::LiftedField(AngleGrid grid, int width, int height, double fill)
    : grid_(grid), width_(width), height_(height) {
  requirePositive(width, height);
  data_.assign(grid.size() * sliceSize(), fill);
}

LiftedField::LiftedField(AngleGrid grid, int width, int height, std::vector<double> data)
    : grid_(grid), width_(width), height_(height), data_(std::move(data)) {
  requirePositive(width, height);
  if (data_.size() != grid.size() * sliceSize()) {
    throw std::invalid_argument("lifted field data length does not match N*width*height");
  }
}

double LiftedField::sum() const noexcept {
  return std::accumulate(data_.begin(), data_.end(), 0.0);
}

double LiftedField::maxAbs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

FrequencyGrid::FrequencyGrid(int width, int height) : width_(width), height_(height) {
  requirePositive(width, height);
}

std::pair<double, double> FrequencyGrid::frequency(int k, int l) const noexcept {
  double lambda = aliasedFrequency(k, width_);
  double mu = aliasedFrequency(l, height_);
  const bool nyqK = width_ % 2 == 0 && k == width_ / 2;
  const bool nyqL = height_ % 2 == 0 && l == height_ / 2;
  if (nyqK && !nyqL) {
    lambda = mu < 0.0 ? -0.5 : 0.5;
  } else if (nyqL && !nyqK) {
    mu = lambda < 0.0 ? -0.5 : 0.5;
  }
  return {lambda, mu};
}

}  // namespace hypo
