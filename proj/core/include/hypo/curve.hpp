#pragma once

// Sub-Riemannian curve completion on the projective tangent bundle.
//
// A lifted curve (x, y, theta) follows
//   x' = u cos(theta),  y' = u sin(theta),  theta' = beta v
// with piecewise-constant controls (u, v) on M equal intervals of [a, b].
// complete() finds controls steering the curve between two oriented points
// (orientations taken modulo pi) with minimal energy J = int (u^2 + v^2).

#include <vector>

namespace hypo {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

struct BoundaryData {
  Point2 start;
  Point2 end;
  double startAngle = 0.0;
  double endAngle = 0.0;
  double a = 0.0;
  double b = 1.0;

  /// Throws unless a < b and all values are finite. Angles are reduced to [0, pi).
  BoundaryData normalized() const;
};

struct ControlCurve {
  double duration = 1.0;  // b - a
  double beta = 1.0;
  std::vector<double> u;
  std::vector<double> v;

  int intervals() const noexcept { return static_cast<int>(u.size()); }
  double step() const noexcept { return duration / static_cast<double>(u.size()); }
  void validate() const;
};

/// M + 1 poses; theta is not reduced modulo pi.
struct LiftedTrajectory {
  std::vector<Pose> nodes;
};

/// Explicit midpoint integration of the controlled dynamics.
LiftedTrajectory integrate(const ControlCurve& controls, const Pose& start);

/// J = sum (u_i^2 + v_i^2) h.
double energy(const ControlCurve& controls);

/// sum sqrt(u_i^2 + v_i^2) h. Cauchy-Schwarz gives length^2 <= duration * J.
double controlLength(const ControlCurve& controls);

/// Distance on the projective line: min(|d|, pi - |d|) with d reduced mod pi.
double projectiveAngleDistance(double a, double b);

/// delta reduced modulo pi into [-pi/2, pi/2).
double wrapProjective(double delta);

/// Curvature at each node of a planar polyline from the circle through the
/// node and its two neighbours; end nodes copy their neighbour's value.
std::vector<double> polylineCurvature(const std::vector<Point2>& nodes);

/// Trapezoidal evaluation of int |gamma'| sqrt(1 + kappa^2 / beta^2).
double reparametrizationInvariantCost(const std::vector<Point2>& nodes, double beta);

struct CompletionOptions {
  int intervals = 200;        // M
  int starts = 5;             // K deterministic initial guesses
  double defectTolerance = 1e-5;
  double initialPenalty = 10.0;
  int continuationRounds = 6;  // penalty multiplied by 10 each round
  int maxInnerIterations = 4000;
  double gradientTolerance = 1e-10;
};

struct CompletionResult {
  ControlCurve controls;
  LiftedTrajectory trajectory;
  double energy = 0.0;
  double defect = 0.0;  // combined terminal defect (Euclidean norm)
  int startIndex = 0;
  /// Merit value after every accepted inner iteration of the winning start,
  /// one vector per penalty round.
  std::vector<std::vector<double>> meritTrace;
};

/// Terminal defect: Euclidean position error combined with projective angle
/// error as sqrt(dx^2 + dy^2 + dtheta^2).
double terminalDefect(const Pose& reached, const BoundaryData& bd);

/// Throws NumericError carrying the best defect if no start reaches
/// options.defectTolerance.
CompletionResult completeCurve(const BoundaryData& bd, double beta,
                               const CompletionOptions& options = {});

}  // namespace hypo
