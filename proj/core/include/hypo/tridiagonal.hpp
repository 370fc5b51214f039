#pragma once

// Thomas algorithm for tridiagonal and periodic (cyclic) tridiagonal systems.
//
// Row i reads  lower[i] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1] = d[i].
// In the periodic case indices wrap modulo n, so lower[0] multiplies x[n-1]
// and upper[n-1] multiplies x[0]. The cyclic system is reduced to two plain
// tridiagonal solves by a Sherman-Morrison rank-one correction; both the
// factorization and each solve are O(n).

#include <cassert>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace hypo {

template <class T>
class TridiagonalSolver {
 public:
  TridiagonalSolver() = default;

  /// lower[0] and upper[n-1] are ignored.
  TridiagonalSolver(std::span<const T> lower, std::span<const T> diag, std::span<const T> upper)
      : lower_(lower.begin(), lower.end()), cp_(diag.size()), inv_(diag.size()) {
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n || upper.size() != n) {
      throw std::invalid_argument("tridiagonal bands must have equal, non-zero length");
    }
    T denom = diag[0];
    for (std::size_t i = 0;; ++i) {
      if (std::abs(denom) == 0.0) throw std::runtime_error("singular tridiagonal matrix");
      inv_[i] = T(1) / denom;
      if (i + 1 == n) break;
      cp_[i] = upper[i] * inv_[i];
      denom = diag[i + 1] - lower[i + 1] * cp_[i];
    }
  }

  std::size_t size() const noexcept { return inv_.size(); }

  /// Overwrites rhs with the solution. U may be T or a type T scales, such
  /// as std::complex<double> for a real matrix.
  template <class U>
  void solve(std::span<U> rhs) const {
    const std::size_t n = size();
    assert(rhs.size() == n);
    rhs[0] *= inv_[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cp_[i] * rhs[i + 1];
  }

 private:
  std::vector<T> lower_;
  std::vector<T> cp_;
  std::vector<T> inv_;
};

template <class T>
class PeriodicTridiagonalSolver {
 public:
  PeriodicTridiagonalSolver() = default;

  PeriodicTridiagonalSolver(std::span<const T> lower, std::span<const T> diag,
                            std::span<const T> upper) {
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n || upper.size() != n) {
      throw std::invalid_argument("periodic tridiagonal bands must have equal, non-zero length");
    }
    n_ = n;
    if (n <= 2) {
      factorSmall(lower, diag, upper);
      return;
    }
    // A = Abar + u v^T with u = (gamma, 0, ..., 0, alpha), v = (1, 0, ..., 0, beta/gamma).
    alpha_ = upper[n - 1];
    beta_ = lower[0];
    gamma_ = -diag[0];
    if (std::abs(gamma_) == 0.0) gamma_ = T(-1);
    std::vector<T> d(diag.begin(), diag.end());
    d[0] -= gamma_;
    d[n - 1] -= alpha_ * beta_ / gamma_;
    inner_ = TridiagonalSolver<T>(lower, d, upper);

    z_.assign(n, T(0));
    z_[0] = gamma_;
    z_[n - 1] = alpha_;
    inner_.solve(std::span<T>(z_));
    const T denom = T(1) + z_[0] + beta_ * z_[n - 1] / gamma_;
    if (std::abs(denom) == 0.0) throw std::runtime_error("singular periodic tridiagonal matrix");
    invDenom_ = T(1) / denom;
  }

  std::size_t size() const noexcept { return n_; }

  /// Overwrites rhs with the solution.
  template <class U>
  void solve(std::span<U> rhs) const {
    assert(rhs.size() == n_);
    if (n_ <= 2) {
      solveSmall(rhs);
      return;
    }
    inner_.solve(rhs);
    const U fact = (rhs[0] + beta_ * rhs[n_ - 1] / gamma_) * invDenom_;
    for (std::size_t i = 0; i < n_; ++i) rhs[i] -= fact * z_[i];
  }

 private:
  // With n <= 2 the wrapped entries land on the same matrix cells as the
  // ordinary bands; solve the dense 1x1 or 2x2 system directly.
  void factorSmall(std::span<const T> lower, std::span<const T> diag, std::span<const T> upper) {
    if (n_ == 1) {
      small_ = {lower[0] + diag[0] + upper[0]};
      if (std::abs(small_[0]) == 0.0) throw std::runtime_error("singular periodic system");
      return;
    }
    const T m00 = diag[0];
    const T m01 = lower[0] + upper[0];
    const T m10 = lower[1] + upper[1];
    const T m11 = diag[1];
    const T det = m00 * m11 - m01 * m10;
    if (std::abs(det) == 0.0) throw std::runtime_error("singular periodic system");
    small_ = {m11 / det, -m01 / det, -m10 / det, m00 / det};
  }

  template <class U>
  void solveSmall(std::span<U> rhs) const {
    if (n_ == 1) {
      rhs[0] /= small_[0];
      return;
    }
    const U r0 = rhs[0];
    const U r1 = rhs[1];
    rhs[0] = small_[0] * r0 + small_[1] * r1;
    rhs[1] = small_[2] * r0 + small_[3] * r1;
  }

  std::size_t n_ = 0;
  TridiagonalSolver<T> inner_;
  std::vector<T> z_;
  std::vector<T> small_;
  T alpha_{};
  T beta_{};
  T gamma_{};
  T invDenom_{};
};

}  // namespace hypo
