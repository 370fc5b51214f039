#include "hypo/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "hypo/errors.hpp"
#include "hypo/parallel.hpp"

namespace hypo {

namespace {

constexpr double kTwoPiSquared = 2.0 * std::numbers::pi * std::numbers::pi;
constexpr double kImaginaryResidueLimit = 1e-6;

thread_local double tLastResidue = 0.0;

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& plannerMutex() {
  static std::mutex m;
  return m;
}

// In-place batched 2D DFT over all N slices of a W x H field.
void transformSlices(std::vector<Complex>& buffer, int n, int width, int height, int sign) {
  int dims[2] = {height, width};
  auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(plannerMutex());
    plan = fftw_plan_many_dft(2, dims, n, data, nullptr, 1, width * height, data, nullptr, 1,
                              width * height, sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("FFTW could not create a plan");
  fftw_execute(plan);
  std::lock_guard lock(plannerMutex());
  fftw_destroy_plan(plan);
}

}  // namespace

void DiffusionParams::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and >= 0");
  if (!(totalTime > 0.0) || !std::isfinite(totalTime)) {
    throw std::invalid_argument("diffusion time must be finite and positive");
  }
  if (timeSteps <= 0) throw std::invalid_argument("time step count must be positive");
}

int DiffusionParams::stepsFor(double totalTime, double maxStep) {
  return std::max(1, static_cast<int>(std::ceil(totalTime / maxStep - 1e-12)));
}

AngularLaplacian::AngularLaplacian(double beta, const AngleGrid& grid)
    : n_(grid.size()), coeff_(beta * beta / (grid.spacing() * grid.spacing())) {}

void AngularLaplacian::apply(std::span<const double> in, std::span<double> out) const {
  for (int r = 0; r < n_; ++r) {
    const double prev = in[(r + n_ - 1) % n_];
    const double next = in[(r + 1) % n_];
    out[r] = coeff_ * (next - 2.0 * in[r] + prev);
  }
}

void AngularLaplacian::apply(std::span<const Complex> in, std::span<Complex> out) const {
  for (int r = 0; r < n_; ++r) {
    const Complex prev = in[(r + n_ - 1) % n_];
    const Complex next = in[(r + 1) % n_];
    out[r] = coeff_ * (next - 2.0 * in[r] + prev);
  }
}

SpectralField::SpectralField(AngleGrid grid, int width, int height)
    : grid_(grid),
      width_(width),
      height_(height),
      freq_(width, height),
      data_(static_cast<std::size_t>(grid.size()) * width * height) {}

SpectralColumn SpectralField::column(int k, int l) const {
  SpectralColumn col;
  std::tie(col.lambda, col.mu) = freq_.frequency(k, l);
  const std::size_t plane = static_cast<std::size_t>(width_) * height_;
  const std::size_t offset = static_cast<std::size_t>(l) * width_ + k;
  col.coeffs.resize(grid_.size());
  for (int r = 0; r < grid_.size(); ++r) col.coeffs[r] = data_[r * plane + offset];
  return col;
}

void SpectralField::setColumn(int k, int l, std::span<const Complex> coeffs) {
  const std::size_t plane = static_cast<std::size_t>(width_) * height_;
  const std::size_t offset = static_cast<std::size_t>(l) * width_ + k;
  for (int r = 0; r < grid_.size(); ++r) data_[r * plane + offset] = coeffs[r];
}

ColumnPropagator::ColumnPropagator(double lambda, double mu, const DiffusionParams& params)
    : n_(params.grid.size()), steps_(params.timeSteps), explicitDiag_(params.grid.size()) {
  params.validate();
  const double tau = params.step();
  const double kappa = AngularLaplacian(params.beta, params.grid).coefficient();

  std::vector<double> lower(n_, -0.5 * tau * kappa);
  std::vector<double> upper(n_, -0.5 * tau * kappa);
  std::vector<double> diag(n_);
  for (int r = 0; r < n_; ++r) {
    const double theta = params.grid.angle(r);
    const double d = lambda * std::cos(theta) + mu * std::sin(theta);
    // -A_rr = 2 pi^2 d^2 + 2 kappa
    const double sink = kTwoPiSquared * d * d + 2.0 * kappa;
    diag[r] = 1.0 + 0.5 * tau * sink;
    explicitDiag_[r] = 1.0 - 0.5 * tau * sink;
  }
  explicitOff_ = 0.5 * tau * kappa;
  implicit_ = PeriodicTridiagonalSolver<double>(lower, diag, upper);
}

void ColumnPropagator::evolve(std::span<Complex> c) const {
  std::vector<Complex> rhs(n_);
  for (int step = 0; step < steps_; ++step) {
    for (int r = 0; r < n_; ++r) {
      const Complex prev = c[(r + n_ - 1) % n_];
      const Complex next = c[(r + 1) % n_];
      rhs[r] = explicitDiag_[r] * c[r] + explicitOff_ * (prev + next);
    }
    implicit_.solve(std::span<Complex>(rhs));
    std::copy(rhs.begin(), rhs.end(), c.begin());
  }
}

SpectralField toSpectral(const LiftedField& field) {
  SpectralField spectrum(field.angleGrid(), field.width(), field.height());
  auto out = spectrum.data();
  const auto in = field.data();
  std::vector<Complex> buffer(in.begin(), in.end());
  transformSlices(buffer, field.orientations(), field.width(), field.height(), FFTW_FORWARD);
  std::copy(buffer.begin(), buffer.end(), out.begin());
  return spectrum;
}

LiftedField fromSpectral(const SpectralField& spectrum) {
  const auto in = spectrum.data();
  std::vector<Complex> buffer(in.begin(), in.end());
  transformSlices(buffer, spectrum.angleGrid().size(), spectrum.width(), spectrum.height(),
                  FFTW_BACKWARD);

  const double norm = 1.0 / (static_cast<double>(spectrum.width()) * spectrum.height());
  std::vector<double> values(buffer.size());
  double maxReal = 0.0;
  double maxImag = 0.0;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    values[i] = buffer[i].real() * norm;
    maxReal = std::max(maxReal, std::abs(values[i]));
    maxImag = std::max(maxImag, std::abs(buffer[i].imag() * norm));
  }
  const double residue = maxImag == 0.0 ? 0.0 : maxImag / std::max(maxReal, 1e-300);
  tLastResidue = residue;
  if (residue > kImaginaryResidueLimit) {
    throw NumericError("inverse DFT left an imaginary residue of " + std::to_string(residue) +
                           " (relative); spectral columns are not Hermitian-symmetric",
                       residue);
  }
  return LiftedField(spectrum.angleGrid(), spectrum.width(), spectrum.height(), std::move(values));
}

double lastImaginaryResidue() noexcept { return tLastResidue; }

SpectralColumn evolveColumn(const SpectralColumn& col, const DiffusionParams& params) {
  if (static_cast<int>(col.coeffs.size()) != params.grid.size()) {
    throw std::invalid_argument("column length does not match the angle grid");
  }
  SpectralColumn out = col;
  ColumnPropagator(col.lambda, col.mu, params).evolve(out.coeffs);
  return out;
}

namespace {

// One spectral column to evolve: either directly, or through the propagator
// of a representative frequency after a cyclic shift of the angle index.
struct OrbitTask {
  int representative;            // column index owning the propagator
  std::vector<std::pair<int, int>> members;  // (column index, angular shift)
};

// A quarter turn (lambda, mu) -> (-mu, lambda) of the frequency plane maps the
// generator at bin r to the generator at bin r - N/2. On a square grid with
// even N this lets one factorization serve a whole rotation orbit.
std::vector<OrbitTask> planOrbits(const FrequencyGrid& freq, int n, bool useSymmetry) {
  const int w = freq.width();
  const int h = freq.height();
  const int count = w * h;
  std::vector<OrbitTask> tasks;
  const bool symmetric = useSymmetry && w == h && n % 2 == 0;
  if (!symmetric) {
    tasks.reserve(count);
    for (int i = 0; i < count; ++i) tasks.push_back({i, {{i, 0}}});
    return tasks;
  }
  std::vector<char> assigned(count, 0);
  const int half = n / 2;
  for (int i = 0; i < count; ++i) {
    if (assigned[i]) continue;
    assigned[i] = 1;
    OrbitTask task{i, {{i, 0}}};
    int k = i % w;
    int l = i / w;
    auto [lambda, mu] = freq.frequency(k, l);
    for (int turn = 1; turn < 4; ++turn) {
      const int k2 = (w - l) % w;
      const int l2 = k;
      const double lambda2 = -mu;
      const double mu2 = lambda;
      const int j = l2 * w + k2;
      const auto actual = freq.frequency(k2, l2);
      if (!assigned[j] && actual.first == lambda2 && actual.second == mu2) {
        assigned[j] = 1;
        task.members.emplace_back(j, (turn * half) % n);
      }
      k = k2;
      l = l2;
      lambda = lambda2;
      mu = mu2;
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

}  // namespace

LiftedField diffuse(const LiftedField& field, const DiffusionParams& params) {
  params.validate();
  if (params.grid.size() != field.orientations()) {
    throw std::invalid_argument("diffusion angle grid does not match the field");
  }
  SpectralField spectrum = toSpectral(field);
  const int n = field.orientations();
  const std::size_t plane = field.sliceSize();
  auto data = spectrum.data();
  const auto tasks = planOrbits(spectrum.frequencies(), n, params.useRotationSymmetry);
  const int w = field.width();

  parallelFor(0, tasks.size(), [&](std::size_t t) {
    const OrbitTask& task = tasks[t];
    const int rk = task.representative % w;
    const int rl = task.representative / w;
    const auto [lambda, mu] = spectrum.frequencies().frequency(rk, rl);
    const ColumnPropagator propagator(lambda, mu, params);
    std::vector<Complex> col(n);
    for (const auto& [index, shift] : task.members) {
      // member bin r corresponds to representative bin r - shift
      for (int r = 0; r < n; ++r) col[r] = data[((r + shift) % n) * plane + index];
      propagator.evolve(col);
      for (int r = 0; r < n; ++r) data[((r + shift) % n) * plane + index] = col[r];
    }
  });
  return fromSpectral(spectrum);
}

}  // namespace hypo
