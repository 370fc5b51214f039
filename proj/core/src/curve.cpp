#include "hypo/curve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hypo/errors.hpp"

namespace hypo {

namespace {

constexpr double kPi = std::numbers::pi;

double reduceAngle(double theta) {
  double t = std::fmod(theta, kPi);
  if (t < 0.0) t += kPi;
  if (t >= kPi) t -= kPi;
  return t;
}

// Decision vector layout: z = (u_0 .. u_{M-1}, v_0 .. v_{M-1}).
struct Problem {
  BoundaryData bd;
  double beta;
  int m;
  double h;

  Pose startPose() const { return {bd.start.x, bd.start.y, bd.startAngle}; }

  Pose endpoint(const std::vector<double>& z) const {
    Pose p = startPose();
    for (int i = 0; i < m; ++i) {
      const double dtheta = z[m + i] * beta * h;
      const double mid = p.theta + 0.5 * dtheta;
      p.x += z[i] * h * std::cos(mid);
      p.y += z[i] * h * std::sin(mid);
      p.theta += dtheta;
    }
    return p;
  }

  std::array<double, 3> defect(const Pose& end) const {
    return {end.x - bd.end.x, end.y - bd.end.y, wrapProjective(end.theta - bd.endAngle)};
  }

  double energyOf(const std::vector<double>& z) const {
    double j = 0.0;
    for (double c : z) j += c * c;
    return j * h;
  }

  // Adds seed^T d(endpoint)/dz to grad by reverse accumulation.
  void endpointAdjoint(const std::vector<double>& z, const std::array<double, 3>& seed,
                       std::vector<double>& grad) const {
    std::vector<double> theta(m + 1);
    theta[0] = bd.startAngle;
    for (int i = 0; i < m; ++i) theta[i + 1] = theta[i] + z[m + i] * beta * h;

    const double ax = seed[0];
    const double ay = seed[1];
    double at = seed[2];
    for (int i = m - 1; i >= 0; --i) {
      const double u = z[i];
      const double mid = theta[i] + 0.5 * z[m + i] * beta * h;
      const double c = std::cos(mid);
      const double s = std::sin(mid);
      const double dMid = ax * (-u * h * s) + ay * (u * h * c);  // d/d(mid)
      grad[i] += ax * h * c + ay * h * s;
      grad[m + i] += at * beta * h + dMid * 0.5 * beta * h;
      at += dMid;
    }
  }
};

struct Merit {
  const Problem& problem;
  std::array<double, 3> multiplier{};
  double penalty = 1.0;

  double operator()(const std::vector<double>& z, std::vector<double>& grad) const {
    const auto e = problem.defect(problem.endpoint(z));
    double value = problem.energyOf(z);
    std::array<double, 3> seed{};
    for (int k = 0; k < 3; ++k) {
      value += multiplier[k] * e[k] + penalty * e[k] * e[k];
      seed[k] = multiplier[k] + 2.0 * penalty * e[k];
    }
    grad.assign(z.size(), 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) grad[i] = 2.0 * problem.h * z[i];
    problem.endpointAdjoint(z, seed, grad);
    return value;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double maxAbs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Limited-memory quasi-Newton descent with Armijo backtracking. Returns the
// merit value after every accepted step.
std::vector<double> minimize(const Merit& merit, std::vector<double>& z, int maxIterations,
                             double gradientTolerance) {
  constexpr int kMemory = 12;
  constexpr double kArmijo = 1e-4;
  std::vector<double> trace;
  std::vector<double> grad;
  double f = merit(z, grad);
  trace.push_back(f);

  std::deque<std::pair<std::vector<double>, std::vector<double>>> history;  // (s, y)
  std::vector<double> dir(z.size());
  std::vector<double> trial(z.size());
  std::vector<double> trialGrad;

  for (int it = 0; it < maxIterations; ++it) {
    if (maxAbs(grad) <= gradientTolerance) break;

    // two-loop recursion
    dir = grad;
    std::vector<double> alpha(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
      const auto& [s, y] = history[k];
      alpha[k] = dot(s, dir) / dot(y, s);
      for (std::size_t i = 0; i < dir.size(); ++i) dir[i] -= alpha[k] * y[i];
    }
    if (!history.empty()) {
      const auto& [s, y] = history.back();
      const double gamma = dot(s, y) / dot(y, y);
      for (double& d : dir) d *= gamma;
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const auto& [s, y] = history[k];
      const double b = dot(y, dir) / dot(y, s);
      for (std::size_t i = 0; i < dir.size(); ++i) dir[i] += (alpha[k] - b) * s[i];
    }
    for (double& d : dir) d = -d;

    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      history.clear();
      for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = -grad[i];
      slope = dot(grad, dir);
    }

    double step = 1.0;
    double fTrial = 0.0;
    bool accepted = false;
    for (int shrink = 0; shrink < 60; ++shrink) {
      for (std::size_t i = 0; i < z.size(); ++i) trial[i] = z[i] + step * dir[i];
      fTrial = merit(trial, trialGrad);
      if (std::isfinite(fTrial) && fTrial <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    std::vector<double> s(z.size());
    std::vector<double> y(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      s[i] = trial[i] - z[i];
      y[i] = trialGrad[i] - grad[i];
    }
    const bool stalled = f - fTrial <= 1e-16 * std::max(1.0, std::abs(f));
    z = trial;
    grad = trialGrad;
    f = fTrial;
    trace.push_back(f);
    if (dot(s, y) > 1e-14 * std::sqrt(dot(s, s) * dot(y, y))) {
      history.emplace_back(std::move(s), std::move(y));
      if (history.size() > kMemory) history.pop_front();
    }
    if (stalled) break;
  }
  return trace;
}

double norm3(const std::array<double, 3>& e) { return std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]); }

// Minimum-norm Gauss-Newton corrections driving the terminal defect to
// rounding level after the penalty rounds.
void polishFeasibility(const Problem& problem, std::vector<double>& z) {
  for (int iter = 0; iter < 20; ++iter) {
    const auto e = problem.defect(problem.endpoint(z));
    if (norm3(e) <= 1e-14) return;
    std::array<std::vector<double>, 3> rows;
    for (int k = 0; k < 3; ++k) {
      rows[k].assign(z.size(), 0.0);
      std::array<double, 3> seed{};
      seed[k] = 1.0;
      problem.endpointAdjoint(z, seed, rows[k]);
    }
    // Solve (J J^T) w = e, then z -= J^T w.
    double g[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i][j] = dot(rows[i], rows[j]);
    const double det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                       g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                       g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    if (std::abs(det) < 1e-300) return;
    std::array<double, 3> w{};
    for (int c = 0; c < 3; ++c) {
      double m[3][3];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = j == c ? e[i] : g[i][j];
      w[c] = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
              m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
              m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])) /
             det;
    }
    std::vector<double> next = z;
    for (int k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < z.size(); ++i) next[i] -= w[k] * rows[k][i];
    if (norm3(problem.defect(problem.endpoint(next))) >= norm3(e)) return;
    z = std::move(next);
  }
}

std::vector<std::vector<double>> initialGuesses(const Problem& problem, int count) {
  const BoundaryData& bd = problem.bd;
  const double duration = bd.b - bd.a;
  const double dist = std::hypot(bd.end.x - bd.start.x, bd.end.y - bd.start.y);
  const double turn = wrapProjective(bd.endAngle - bd.startAngle);
  const double otherTurn = turn >= 0.0 ? turn - kPi : turn + kPi;
  const double speed = dist / duration;
  const double rate = problem.beta > 0.0 ? 1.0 / (problem.beta * duration) : 0.0;

  const std::array<std::pair<double, double>, 5> base = {{
      {speed, turn * rate},
      {-speed, turn * rate},
      {speed, otherTurn * rate},
      {-speed, otherTurn * rate},
      {speed, 0.0},
  }};
  std::vector<std::vector<double>> guesses;
  for (int k = 0; k < count; ++k) {
    // beyond the base set, stretch the speed to explore longer detours
    const auto [u, v] = base[k % base.size()];
    const double stretch = 1.0 + static_cast<double>(k / static_cast<int>(base.size()));
    std::vector<double> z(2 * problem.m);
    std::fill(z.begin(), z.begin() + problem.m, u * stretch);
    std::fill(z.begin() + problem.m, z.end(), v);
    guesses.push_back(std::move(z));
  }
  return guesses;
}

}  // namespace

BoundaryData BoundaryData::normalized() const {
  const double values[] = {start.x, start.y, end.x, end.y, startAngle, endAngle, a, b};
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("boundary data must be finite");
  }
  if (!(a < b)) throw std::invalid_argument("boundary horizon needs a < b");
  BoundaryData out = *this;
  out.startAngle = reduceAngle(startAngle);
  out.endAngle = reduceAngle(endAngle);
  return out;
}

void ControlCurve::validate() const {
  if (u.size() != v.size()) throw std::invalid_argument("control arrays differ in length");
  if (u.size() < 2) throw std::invalid_argument("need at least two control intervals");
  if (!(duration > 0.0)) throw std::invalid_argument("control duration must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i]) || !std::isfinite(v[i])) throw std::invalid_argument("controls must be finite");
  }
}

LiftedTrajectory integrate(const ControlCurve& controls, const Pose& start) {
  controls.validate();
  const double h = controls.step();
  LiftedTrajectory traj;
  traj.nodes.reserve(controls.u.size() + 1);
  Pose p = start;
  traj.nodes.push_back(p);
  for (std::size_t i = 0; i < controls.u.size(); ++i) {
    const double dtheta = controls.v[i] * controls.beta * h;
    const double mid = p.theta + 0.5 * dtheta;
    p.x += controls.u[i] * h * std::cos(mid);
    p.y += controls.u[i] * h * std::sin(mid);
    p.theta += dtheta;
    traj.nodes.push_back(p);
  }
  return traj;
}

double energy(const ControlCurve& controls) {
  controls.validate();
  double j = 0.0;
  for (std::size_t i = 0; i < controls.u.size(); ++i) {
    j += controls.u[i] * controls.u[i] + controls.v[i] * controls.v[i];
  }
  return j * controls.step();
}

double controlLength(const ControlCurve& controls) {
  controls.validate();
  double len = 0.0;
  for (std::size_t i = 0; i < controls.u.size(); ++i) len += std::hypot(controls.u[i], controls.v[i]);
  return len * controls.step();
}

double wrapProjective(double delta) { return delta - kPi * std::floor(delta / kPi + 0.5); }

double projectiveAngleDistance(double a, double b) { return std::abs(wrapProjective(a - b)); }

std::vector<double> polylineCurvature(const std::vector<Point2>& nodes) {
  if (nodes.size() < 3) throw std::invalid_argument("curvature needs at least three nodes");
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (nodes[i].x == nodes[i + 1].x && nodes[i].y == nodes[i + 1].y) {
      throw std::invalid_argument("polyline has repeated consecutive nodes at index " + std::to_string(i));
    }
  }
  std::vector<double> kappa(nodes.size());
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
    const Point2& p = nodes[i - 1];
    const Point2& q = nodes[i];
    const Point2& r = nodes[i + 1];
    const double a = std::hypot(q.x - p.x, q.y - p.y);
    const double b = std::hypot(r.x - q.x, r.y - q.y);
    const double c = std::hypot(r.x - p.x, r.y - p.y);
    const double cross = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    kappa[i] = c == 0.0 ? 0.0 : 2.0 * std::abs(cross) / (a * b * c);
  }
  kappa.front() = kappa[1];
  kappa.back() = kappa[nodes.size() - 2];
  return kappa;
}

double reparametrizationInvariantCost(const std::vector<Point2>& nodes, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const auto kappa = polylineCurvature(nodes);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double len = std::hypot(nodes[i + 1].x - nodes[i].x, nodes[i + 1].y - nodes[i].y);
    const double g0 = std::sqrt(1.0 + kappa[i] * kappa[i] / (beta * beta));
    const double g1 = std::sqrt(1.0 + kappa[i + 1] * kappa[i + 1] / (beta * beta));
    total += 0.5 * len * (g0 + g1);
  }
  return total;
}

double terminalDefect(const Pose& reached, const BoundaryData& bd) {
  const double dx = reached.x - bd.end.x;
  const double dy = reached.y - bd.end.y;
  const double dt = projectiveAngleDistance(reached.theta, bd.endAngle);
  return std::sqrt(dx * dx + dy * dy + dt * dt);
}

CompletionResult completeCurve(const BoundaryData& boundary, double beta,
                               const CompletionOptions& options) {
  const BoundaryData bd = boundary.normalized();
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive");
  if (options.intervals < 2) throw std::invalid_argument("need at least two control intervals");
  if (options.starts < 1) throw std::invalid_argument("need at least one start");

  const Problem problem{bd, beta, options.intervals, (bd.b - bd.a) / options.intervals};
  const auto guesses = initialGuesses(problem, options.starts);

  bool found = false;
  double bestDefect = std::numeric_limits<double>::infinity();
  CompletionResult best;

  for (int k = 0; k < options.starts; ++k) {
    std::vector<double> z = guesses[k];
    Merit merit{problem, {}, options.initialPenalty};
    std::vector<std::vector<double>> trace;
    for (int round = 0; round <= options.continuationRounds; ++round) {
      trace.push_back(minimize(merit, z, options.maxInnerIterations, options.gradientTolerance));
      const auto e = problem.defect(problem.endpoint(z));
      if (norm3(e) <= 1e-12) break;
      for (int c = 0; c < 3; ++c) merit.multiplier[c] += 2.0 * merit.penalty * e[c];
      merit.penalty *= 10.0;
    }
    polishFeasibility(problem, z);

    ControlCurve controls{bd.b - bd.a, beta, std::vector<double>(z.begin(), z.begin() + problem.m),
                          std::vector<double>(z.begin() + problem.m, z.end())};
    LiftedTrajectory traj = integrate(controls, problem.startPose());
    const double defect = terminalDefect(traj.nodes.back(), bd);
    const double j = energy(controls);
    bestDefect = std::min(bestDefect, defect);
    if (defect <= options.defectTolerance && (!found || j < best.energy)) {
      found = true;
      best = CompletionResult{std::move(controls), std::move(traj), j, defect, k, std::move(trace)};
    }
  }
  if (!found) {
    throw NumericError("curve completion failed: best terminal defect " + std::to_string(bestDefect) +
                           " exceeds tolerance " + std::to_string(options.defectTolerance),
                       bestDefect);
  }
  return best;
}

}  // namespace hypo
