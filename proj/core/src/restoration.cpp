#include "hypo/restoration.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "hypo/errors.hpp"

namespace hypo {

namespace {

template <class F>
void forEachNeighbour8(int x, int y, int w, int h, F&& f) {
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const int xn = x + dx;
      const int yn = y + dy;
      if (xn >= 0 && xn < w && yn >= 0 && yn < h) f(xn, yn);
    }
  }
}

}  // namespace

Image clampUnit(Image img) {
  for (double& v : img.data()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

Image pureDiffusion(const Image& img, const LiftParams& lift, const DiffusionParams& diffusion) {
  const LiftedField field = hypo::lift(img, lift, diffusion.grid);
  return clampUnit(projectSum(diffuse(field, diffusion)));
}

Image averageFill(const Image& img, const Mask& mask, int maxSweeps) {
  requireSameShape(img, mask);
  const int w = img.width();
  const int h = img.height();
  if (mask.badCount() == mask.size()) {
    throw std::invalid_argument("cannot fill: every pixel is marked bad");
  }

  Image out = img;
  std::vector<std::uint8_t> filled(mask.size());
  std::size_t remaining = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    filled[i] = mask.bad(i) ? 0 : 1;
    remaining += mask.bad(i) ? 1 : 0;
  }

  int sweeps = 0;
  while (remaining > 0) {
    if (++sweeps > maxSweeps) {
      throw NumericError("average fill did not finish within " + std::to_string(maxSweeps) + " sweeps");
    }
    // Values and fill flags of this sweep only become visible in the next one.
    std::vector<std::uint8_t> nextFilled = filled;
    Image next = out;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (filled[i]) continue;
        double total = 0.0;
        int count = 0;
        forEachNeighbour8(x, y, w, h, [&](int xn, int yn) {
          if (filled[static_cast<std::size_t>(yn) * w + xn]) {
            total += out(xn, yn);
            ++count;
          }
        });
        if (count > 0) {
          next(x, y) = total / count;
          nextFilled[i] = 1;
          --remaining;
        }
      }
    }
    out = std::move(next);
    filled = std::move(nextFilled);
  }
  return out;
}

Image boxAverage3x3(const Image& img) {
  const int w = img.width();
  const int h = img.height();
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double total = img(x, y);
      int count = 1;
      forEachNeighbour8(x, y, w, h, [&](int xn, int yn) {
        total += img(xn, yn);
        ++count;
      });
      out(x, y) = total / count;
    }
  }
  return out;
}

Mask badBoundary(const Mask& bad) {
  const int w = bad.width();
  const int h = bad.height();
  Mask boundary(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!bad.bad(x, y)) continue;
      bool touchesGood = false;
      forEachNeighbour8(x, y, w, h, [&](int xn, int yn) { touchesGood |= bad.good(xn, yn); });
      boundary.setBad(x, y, touchesGood);
    }
  }
  return boundary;
}

void DrParams::validate() const {
  if (!(totalTime > 0.0)) throw std::invalid_argument("DR total time must be positive");
  if (intervals < 1) throw std::invalid_argument("DR needs at least one interval");
  if (stepsPerInterval < 0) throw std::invalid_argument("steps per interval must be >= 0");
  lift.validate();
}

Image fiberHeight(const LiftedField& field, DrHeight measure) {
  return measure == DrHeight::FiberMax ? projectMax(field) : projectSum(field);
}

DrState drInitialize(const Image& img, const Mask& mask, const LiftParams& liftParams,
                     const AngleGrid& grid, DrHeight measure) {
  requireSameShape(img, mask);
  LiftedField field = lift(img, liftParams, grid);
  Image height = fiberHeight(field, measure);
  return DrState{mask, std::move(field), std::move(height), 0, measure};
}

Image drSigma(const DrState& state) {
  const Image current = fiberHeight(state.field, state.heightMeasure);
  Image sigma(current.width(), current.height(), 1.0);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const double h = current.data()[i];
    if (h > 0.0) sigma.data()[i] = 0.5 * (state.initialHeight.data()[i] + h) / h;
  }
  return sigma;
}

DrState drStep(const DrState& state, double tau, const DiffusionParams& diffusion) {
  const int w = state.field.width();
  const int h = state.field.height();
  const std::size_t plane = state.field.sliceSize();

  // (a) rescale the fibers of good pixels by sigma
  LiftedField start = state.field;
  const Image sigma = drSigma(state);
  auto data = start.data();
  for (std::size_t p = 0; p < plane; ++p) {
    if (state.bad.bad(p)) continue;
    const double s = sigma.data()[p];
    for (int r = 0; r < start.orientations(); ++r) data[r * plane + p] *= s;
  }

  // (b) diffuse over the interval, (c) project
  DiffusionParams interval = diffusion;
  interval.totalTime = tau;
  LiftedField evolved = diffuse(start, interval);
  const Image projected = projectSum(evolved);

  // (d)-(f) grow the good set from the boundary of B
  const Image average = boxAverage3x3(projected);
  const Mask boundary = badBoundary(state.bad);
  Mask nextBad = state.bad;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (boundary.bad(x, y) && projected(x, y) >= average(x, y)) nextBad.setBad(x, y, false);
    }
  }
  return DrState{std::move(nextBad), std::move(evolved), state.initialHeight, state.stepIndex + 1,
                 state.heightMeasure};
}

DrResult dynamicRestoration(const Image& img, const Mask& mask, const DrParams& params,
                            const DrObserver& observer) {
  params.validate();
  const double tau = params.totalTime / params.intervals;
  DiffusionParams diffusion = params.diffusion;
  diffusion.totalTime = tau;
  diffusion.timeSteps =
      params.stepsPerInterval > 0 ? params.stepsPerInterval : DiffusionParams::stepsFor(tau);

  DrState state = drInitialize(img, mask, params.lift, diffusion.grid, params.heightMeasure);
  DrResult result;
  result.badCounts.push_back(state.bad.badCount());
  for (int r = 0; r < params.intervals; ++r) {
    DrState next = drStep(state, tau, diffusion);
    if (observer) observer(state, next);
    result.badCounts.push_back(next.bad.badCount());
    state = std::move(next);
  }
  result.image = clampUnit(projectSum(state.field));
  return result;
}

AheParams AheParams::defaults(double beta, double strongTime, const AngleGrid& grid) {
  AheParams p;
  p.strong = VaryingCoeffParams::withBeta(beta);
  p.strong.totalTime = strongTime;
  p.strong.timeSteps = DiffusionParams::stepsFor(strongTime);
  p.weak.beta = beta;
  p.weak.grid = grid;
  p.weak.totalTime = strongTime / 10.0;
  p.weak.timeSteps = DiffusionParams::stepsFor(p.weak.totalTime);
  return p;
}

void AheParams::validate() const {
  if (!(mixWeight >= 0.0 && mixWeight <= 1.0)) throw std::invalid_argument("mix weight must lie in [0,1]");
  if (fillMaxSweeps < 1) throw std::invalid_argument("fill sweep cap must be positive");
  strong.validate();
  weak.validate();
  lift.validate();
}

AheStages aheStages(const Image& img, const Mask& mask, const AheParams& params) {
  params.validate();
  requireSameShape(img, mask);
  AheStages stages;

  stages.filled = averageFill(img, mask, params.fillMaxSweeps);

  const CoefficientField coeffs = coefficientField(mask, params.strong);
  const LiftedField lifted = lift(stages.filled, params.lift, params.weak.grid);
  stages.strong = projectSum(diffuseVarying(lifted, coeffs, params.strong));

  stages.mixed = img;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (!mask.bad(i)) continue;
    stages.mixed.data()[i] = params.mixWeight * stages.filled.data()[i] +
                             (1.0 - params.mixWeight) * stages.strong.data()[i];
  }

  stages.result = pureDiffusion(stages.mixed, params.lift, params.weak);
  return stages;
}

Image ahe(const Image& img, const Mask& mask, const AheParams& params) {
  return aheStages(img, mask, params).result;
}

}  // namespace hypo
