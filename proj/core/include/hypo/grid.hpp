#pragma once

// Core value types shared by every module. Layout is row-major with x
// fastest: pixel (x, y) lives at y * width + x, and orientation slice r of a
// lifted field occupies the contiguous block [r * W * H, (r + 1) * W * H).

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace hypo {

class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(int x, int y) const { return data_[index(x, y)]; }
  double& operator()(int x, int y) { return data_[index(x, y)]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  double sum() const noexcept;
  bool sameShape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Partition of the pixel grid into good (G) and bad (B) pixels.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool bad = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool bad(int x, int y) const { return bad_[index(x, y)] != 0; }
  bool good(int x, int y) const { return !bad(x, y); }
  void setBad(int x, int y, bool value) { bad_[index(x, y)] = value ? 1 : 0; }

  bool bad(std::size_t i) const { return bad_[i] != 0; }
  void setBad(std::size_t i, bool value) { bad_[i] = value ? 1 : 0; }

  std::size_t badCount() const noexcept;
  std::size_t size() const noexcept { return bad_.size(); }

  bool matches(const Image& img) const noexcept {
    return width_ == img.width() && height_ == img.height();
  }
  bool operator==(const Mask&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bad_;
};

/// Throws std::invalid_argument unless mask and image share dimensions.
void requireSameShape(const Image& img, const Mask& mask);

/// Uniform grid of N orientations theta_r = r * pi / N on the projective line.
class AngleGrid {
 public:
  explicit AngleGrid(int n = 30);

  int size() const noexcept { return n_; }
  double spacing() const noexcept { return std::numbers::pi / n_; }
  double angle(int r) const noexcept { return r * std::numbers::pi / n_; }

  /// Nearest bin to theta (any real), computed as round-half-up(theta * N / pi)
  /// reduced modulo N.
  int nearestBin(double theta) const noexcept;

  bool operator==(const AngleGrid&) const = default;

 private:
  int n_;
};

class LiftedField {
 public:
  LiftedField() = default;
  LiftedField(AngleGrid grid, int width, int height, double fill = 0.0);
  LiftedField(AngleGrid grid, int width, int height, std::vector<double> data);

  const AngleGrid& angleGrid() const noexcept { return grid_; }
  int orientations() const noexcept { return grid_.size(); }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t sliceSize() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }

  double operator()(int r, int x, int y) const { return data_[index(r, x, y)]; }
  double& operator()(int r, int x, int y) { return data_[index(r, x, y)]; }

  std::span<const double> slice(int r) const {
    return std::span<const double>(data_).subspan(r * sliceSize(), sliceSize());
  }
  std::span<double> slice(int r) {
    return std::span<double>(data_).subspan(r * sliceSize(), sliceSize());
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  double sum() const noexcept;
  double maxAbs() const noexcept;

 private:
  std::size_t index(int r, int x, int y) const noexcept {
    return r * sliceSize() + static_cast<std::size_t>(y) * width_ + x;
  }

  AngleGrid grid_{1};
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Spatial DFT frequencies in cycles per pixel.
///
/// Index k maps to k/W for k <= W/2 and to (k - W)/W above. The Nyquist
/// index of an even dimension is ambiguous (+1/2 and -1/2 alias); its sign is
/// taken from the other coordinate so that (k, l) and its conjugate partner
/// (-k, -l) always carry exactly negated frequencies.
class FrequencyGrid {
 public:
  FrequencyGrid(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::pair<double, double> frequency(int k, int l) const noexcept;

 private:
  int width_;
  int height_;
};

}  // namespace hypo
