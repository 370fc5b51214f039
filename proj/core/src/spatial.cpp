#include "hypo/spatial.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypo/errors.hpp"
#include "hypo/parallel.hpp"
#include "hypo/tridiagonal.hpp"

namespace hypo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Squared distance transform of a sampled function along one line
// (lower envelope of parabolas, Felzenszwalb & Huttenlocher).
void distanceTransform1d(const std::vector<double>& f, std::vector<double>& d) {
  const int n = static_cast<int>(f.size());
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
      if (s <= z[k] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    if (s <= z[k]) {
      // k == 0 and the new parabola dominates everywhere
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

double cutoffCoefficient(double c0, double c1, double eps, double epsStar) {
  const double value = c0 + c1 * eps;
  return value / (c0 + c1) > epsStar ? value : 0.0;
}

// One directional Crank-Nicolson step on a single orientation slice.
class DirectionalStep {
 public:
  DirectionalStep(const Image& b, double theta, double tau) : w_(b.width()), h_(b.height()) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    // (c dx + s dy)^2 = c^2 dxx + s^2 dyy + 2cs dxy, dxy = (D_{++} - D_{+-}) / 4
    stencil_ = {{{1, 0, c * c}, {0, 1, s * s}, {1, 1, 0.5 * c * s}, {1, -1, -0.5 * c * s}}};

    const std::size_t count = static_cast<std::size_t>(w_) * h_;
    active_.assign(count, -1);
    for (std::size_t i = 0; i < count; ++i) {
      if (b.data()[i] > 0.0) {
        active_[i] = static_cast<int>(pixels_.size());
        pixels_.push_back(static_cast<int>(i));
      }
    }
    scale_.resize(pixels_.size());
    for (std::size_t j = 0; j < pixels_.size(); ++j) scale_[j] = 0.5 * b.data()[pixels_[j]] * 0.5 * tau;
  }

  bool empty() const noexcept { return pixels_.empty(); }

  // Advances one slice in place. Inactive pixels (b == 0) keep their values
  // exactly and act as Dirichlet data for their active neighbours.
  void apply(std::span<double> psi) const {
    const auto n = static_cast<Eigen::Index>(pixels_.size());
    if (n == 0) return;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(pixels_.size() * 9);
    Eigen::VectorXd rhs(n);
    Eigen::VectorXd guess(n);

    for (Eigen::Index j = 0; j < n; ++j) {
      const int p = pixels_[j];
      const int x = p % w_;
      const int y = p / w_;
      const double g = scale_[j];  // (tau/2) * (1/2) b
      double lap = 0.0;            // (L psi)(p)
      double diag = 0.0;           // L_pp
      double fixedCoupling = 0.0;  // sum over inactive q of L_pq psi(q)

      for (const auto& [dx, dy, weight] : stencil_) {
        if (weight == 0.0) continue;
        for (int sign : {-1, 1}) {
          const int xn = x + sign * dx;
          const int yn = y + sign * dy;
          if (xn < 0 || xn >= w_ || yn < 0 || yn >= h_) continue;  // no flux across the frame
          const int q = yn * w_ + xn;
          lap += weight * (psi[q] - psi[p]);
          diag -= weight;
          if (active_[q] >= 0) {
            triplets.emplace_back(j, active_[q], -g * weight);
          } else {
            fixedCoupling += weight * psi[q];
          }
        }
      }
      triplets.emplace_back(j, j, 1.0 - g * diag);
      rhs[j] = psi[p] + g * lap + g * fixedCoupling;
      guess[j] = psi[p];
    }

    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix(n, n);
    matrix.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>> solver;
    solver.setTolerance(kDirectionalSolveTolerance);
    solver.setMaxIterations(kDirectionalSolveMaxIterations);
    solver.compute(matrix);
    const Eigen::VectorXd x = solver.solveWithGuess(rhs, guess);
    if (solver.info() != Eigen::Success) {
      throw NumericError("directional solve did not converge after " +
                             std::to_string(solver.iterations()) + " iterations (relative residual " +
                             std::to_string(solver.error()) + ")",
                         solver.error());
    }
    for (Eigen::Index j = 0; j < n; ++j) psi[pixels_[j]] = x[j];
  }

 private:
  struct Tap {
    int dx;
    int dy;
    double weight;
  };

  int w_;
  int h_;
  std::array<Tap, 4> stencil_;
  std::vector<int> active_;
  std::vector<int> pixels_;
  std::vector<double> scale_;
};

// Crank-Nicolson over dt of d psi/dt = a / dtheta^2 * (periodic second difference), per pixel.
void angularHalfStep(LiftedField& field, const Image& a, double dt) {
  const int n = field.orientations();
  const double invSpacing2 = 1.0 / (field.angleGrid().spacing() * field.angleGrid().spacing());
  const std::size_t plane = field.sliceSize();
  auto data = field.data();

  parallelFor(0, plane, [&](std::size_t p) {
    const double coeff = a.data()[p];
    if (coeff == 0.0) return;
    const double kappa = coeff * invSpacing2;
    std::vector<double> lower(n, -0.5 * dt * kappa);
    std::vector<double> diag(n, 1.0 + dt * kappa);
    const PeriodicTridiagonalSolver<double> solver(lower, diag, lower);
    std::vector<double> col(n);
    std::vector<double> rhs(n);
    for (int r = 0; r < n; ++r) col[r] = data[r * plane + p];
    for (int r = 0; r < n; ++r) {
      const double prev = col[(r + n - 1) % n];
      const double next = col[(r + 1) % n];
      rhs[r] = (1.0 - dt * kappa) * col[r] + 0.5 * dt * kappa * (prev + next);
    }
    solver.solve(std::span<double>(rhs));
    for (int r = 0; r < n; ++r) data[r * plane + p] = rhs[r];
  });
}

}  // namespace

void VaryingCoeffParams::validate() const {
  if (!(a0 + a1 > 0.0)) throw std::invalid_argument("a0 + a1 must be positive");
  if (!(b0 + b1 > 0.0)) throw std::invalid_argument("b0 + b1 must be positive");
  if (!(a1 > 0.0) || !(b1 > 0.0)) throw std::invalid_argument("a1 and b1 must be positive");
  if (!(epsSigma > 0.0)) throw std::invalid_argument("epsilon sigma must be positive");
  if (!(epsStar > 0.0 && epsStar < 1.0)) throw std::invalid_argument("epsilon cutoff must lie in (0,1)");
  if (!(totalTime > 0.0) || !std::isfinite(totalTime)) {
    throw std::invalid_argument("diffusion time must be finite and positive");
  }
  if (timeSteps <= 0) throw std::invalid_argument("time step count must be positive");
}

VaryingCoeffParams VaryingCoeffParams::withBeta(double beta) {
  VaryingCoeffParams p;
  p.beta = beta;
  p.a1 = beta * beta;
  return p;
}

Image distanceToBad(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<double> sq(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = mask.bad(i) ? 0.0 : kInf;

  std::vector<double> f(h);
  std::vector<double> d(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = sq[static_cast<std::size_t>(y) * w + x];
    distanceTransform1d(f, d);
    for (int y = 0; y < h; ++y) sq[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  f.resize(w);
  d.resize(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = sq[static_cast<std::size_t>(y) * w + x];
    distanceTransform1d(f, d);
    for (int x = 0; x < w; ++x) sq[static_cast<std::size_t>(y) * w + x] = d[x];
  }

  Image out(w, h);
  for (std::size_t i = 0; i < sq.size(); ++i) out.data()[i] = std::sqrt(sq[i]);
  return out;
}

Image epsilonMap(const Mask& mask, double epsSigma) {
  if (!(epsSigma > 0.0)) throw std::invalid_argument("epsilon sigma must be positive");
  Image eps = distanceToBad(mask);
  for (double& v : eps.data()) v = v == kInf ? 0.0 : std::exp(-v * v / epsSigma);
  return eps;
}

CoefficientField coefficientField(const Mask& mask, const VaryingCoeffParams& params) {
  params.validate();
  const Image eps = epsilonMap(mask, params.epsSigma);
  CoefficientField coeffs{Image(mask.width(), mask.height()), Image(mask.width(), mask.height())};
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double e = eps.data()[i];
    coeffs.a.data()[i] = cutoffCoefficient(params.a0, params.a1, e, params.epsStar);
    coeffs.b.data()[i] = cutoffCoefficient(params.b0, params.b1, e, params.epsStar);
  }
  return coeffs;
}

LiftedField diffuseVarying(const LiftedField& field, const CoefficientField& coeffs,
                           const VaryingCoeffParams& params) {
  if (!(params.totalTime > 0.0) || params.timeSteps <= 0) {
    throw std::invalid_argument("diffusion time and step count must be positive");
  }
  if (coeffs.a.width() != field.width() || coeffs.a.height() != field.height() ||
      !coeffs.a.sameShape(coeffs.b)) {
    throw std::invalid_argument("coefficient field does not match the lifted field");
  }
  for (std::size_t i = 0; i < coeffs.a.size(); ++i) {
    if (!(coeffs.a.data()[i] >= 0.0) || !(coeffs.b.data()[i] >= 0.0)) {
      throw std::invalid_argument("varying coefficients must be non-negative");
    }
  }

  const double tau = params.step();
  const int n = field.orientations();
  std::vector<DirectionalStep> directional;
  directional.reserve(n);
  for (int r = 0; r < n; ++r) directional.emplace_back(coeffs.b, field.angleGrid().angle(r), tau);

  LiftedField psi = field;
  for (int step = 0; step < params.timeSteps; ++step) {
    angularHalfStep(psi, coeffs.a, 0.5 * tau);
    parallelFor(0, n, [&](std::size_t r) { directional[r].apply(psi.slice(static_cast<int>(r))); });
    angularHalfStep(psi, coeffs.a, 0.5 * tau);
  }
  return psi;
}

}  // namespace hypo
