#include "hypo/lift.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace hypo {

namespace {

int mirror(int i, int n) {
  // half-sample symmetric: ... 1 0 | 0 1 ... n-1 | n-1 n-2 ...
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

double reduceToHalfTurn(double theta) {
  double t = std::fmod(theta, std::numbers::pi);
  if (t < 0.0) t += std::numbers::pi;
  if (t >= std::numbers::pi) t -= std::numbers::pi;
  return t;
}

}  // namespace

void LiftParams::validate() const {
  if (!(smoothingSigma > 0.0) || !std::isfinite(smoothingSigma)) {
    throw std::invalid_argument("smoothing sigma must be finite and positive");
  }
  if (!(gradientThreshold >= 0.0)) throw std::invalid_argument("gradient threshold must be >= 0");
}

OrientationMap::OrientationMap(int width, int height)
    : width_(width),
      height_(height),
      theta_(static_cast<std::size_t>(width) * height, std::numeric_limits<double>::quiet_NaN()) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("orientation map must be non-empty");
}

void OrientationMap::setAngle(int x, int y, double theta) {
  theta_[index(x, y)] = reduceToHalfTurn(theta);
}

std::size_t OrientationMap::flatCount() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(theta_.begin(), theta_.end(), [](double t) { return std::isnan(t); }));
}

std::vector<double> gaussianKernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("gaussian sigma must be finite and positive");
  }
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    total += k[i + radius];
  }
  for (double& v : k) v /= total;
  return k;
}

Image gaussianSmooth(const Image& img, double sigma) {
  const auto kernel = gaussianKernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = img.width();
  const int h = img.height();

  Image rows(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * img(mirror(x + i, w), y);
      rows(x, y) = acc;
    }
  }
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * rows(x, mirror(y + i, h));
      out(x, y) = acc;
    }
  }
  return out;
}

OrientationMap orientationMap(const Image& img, const LiftParams& params) {
  params.validate();
  const Image s = gaussianSmooth(img, params.smoothingSigma);
  const int w = s.width();
  const int h = s.height();

  auto dx = [&](int x, int y) {
    if (w == 1) return 0.0;
    if (x == 0) return s(1, y) - s(0, y);
    if (x == w - 1) return s(w - 1, y) - s(w - 2, y);
    return 0.5 * (s(x + 1, y) - s(x - 1, y));
  };
  auto dy = [&](int x, int y) {
    if (h == 1) return 0.0;
    if (y == 0) return s(x, 1) - s(x, 0);
    if (y == h - 1) return s(x, h - 1) - s(x, h - 2);
    return 0.5 * (s(x, y + 1) - s(x, y - 1));
  };

  OrientationMap omap(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = dx(x, y);
      const double gy = dy(x, y);
      if (std::hypot(gx, gy) <= params.gradientThreshold) {
        omap.setFlat(x, y);
      } else {
        omap.setAngle(x, y, std::atan2(gy, gx));
      }
    }
  }
  return omap;
}

LiftedField lift(const Image& img, const OrientationMap& omap, const AngleGrid& grid) {
  if (img.width() != omap.width() || img.height() != omap.height()) {
    throw std::invalid_argument("image and orientation map dimensions differ");
  }
  LiftedField field(grid, img.width(), img.height());
  const int n = grid.size();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double v = img(x, y);
      if (const auto theta = omap.angle(x, y)) {
        field(grid.nearestBin(*theta), x, y) = v;
      } else {
        for (int r = 0; r < n; ++r) field(r, x, y) = v / n;
      }
    }
  }
  return field;
}

LiftedField lift(const Image& img, const LiftParams& params, const AngleGrid& grid) {
  return lift(img, orientationMap(img, params), grid);
}

LiftedField liftFixedAngle(const Image& img, double theta0, const AngleGrid& grid) {
  LiftedField field(grid, img.width(), img.height());
  const auto slice = field.slice(grid.nearestBin(theta0));
  std::copy(img.data().begin(), img.data().end(), slice.begin());
  return field;
}

LiftedField liftCross(const Image& structure, const Image& values, const LiftParams& params,
                      const AngleGrid& grid) {
  if (!structure.sameShape(values)) {
    throw std::invalid_argument("structure and value images must have equal dimensions");
  }
  return lift(values, orientationMap(structure, params), grid);
}

Image projectSum(const LiftedField& field) {
  Image out(field.width(), field.height());
  auto dst = out.data();
  for (int r = 0; r < field.orientations(); ++r) {
    const auto src = field.slice(r);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
  }
  return out;
}

Image projectMax(const LiftedField& field) {
  Image out(field.width(), field.height());
  auto dst = out.data();
  const auto first = field.slice(0);
  std::copy(first.begin(), first.end(), dst.begin());
  for (int r = 1; r < field.orientations(); ++r) {
    const auto src = field.slice(r);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::max(dst[i], src[i]);
  }
  return out;
}

}  // namespace hypo
