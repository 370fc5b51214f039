#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "hypo/curve.hpp"
#include "hypo/errors.hpp"
#include "hypo/image_io.hpp"
#include "hypo/lift.hpp"
#include "hypo/parallel.hpp"
#include "hypo/restoration.hpp"
#include "hypo/spatial.hpp"
#include "hypo/spectral.hpp"

namespace hypo::cli {

namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

/// Configuration error surfaced as exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON-lines diagnostics sink; a no-op without a path.
class Diagnostics {
 public:
  explicit Diagnostics(const std::string& path) {
    if (path.empty()) return;
    file_.emplace(path, std::ios::trunc);
    if (!*file_) throw IoError("cannot open diagnostics file '" + path + "'");
  }

  void write(const Json& record) {
    if (file_) *file_ << record.dump() << '\n';
  }

 private:
  std::optional<std::ofstream> file_;
};

struct LiftOptions {
  int angles = 30;
  double sigma = 1.0;
  double gradThreshold = 1e-4;
  std::optional<double> fixedAngle;
  std::string crossStructure;

  LiftParams params() const { return {sigma, gradThreshold}; }
};

struct InpaintOptions {
  std::string input;
  std::string output;
  std::string mask;
  std::string method = "pure";
  std::string diagnostics;
  double beta2 = 0.25;
  double time = 1.0;
  int steps = 60;
  std::string drHeight = "sum";
  int cnSteps = 0;
  bool rotationSymmetry = false;
  // varying coefficients; a1 defaults to beta^2
  double a0 = 0.0;
  std::optional<double> a1;
  double b0 = 0.0;
  double b1 = 1.0;
  double epsSigma = 2.0;
  double epsStar = 0.1;
  // AHE
  double mixWeight = 0.5;
  std::optional<double> weakTime;
  LiftOptions lift;
};

struct DiffuseOptions {
  std::string input;
  std::string output;
  double beta2 = 0.25;
  double time = 1.0;
  int cnSteps = 0;
  bool rotationSymmetry = false;
};

struct ProjectOptions {
  std::string input;
  std::string output;
  std::string mode = "sum";
};

struct LiftCommandOptions {
  std::string input;
  std::string output;
  LiftOptions lift;
};

struct CurveOptions {
  std::string config;
  std::vector<double> start;
  std::vector<double> end;
  std::vector<double> horizon{0.0, 1.0};
  double beta = 1.0;
  int intervals = 200;
  int starts = 5;
  std::string output;
};

void addLiftFlags(CLI::App* cmd, LiftOptions& o) {
  cmd->add_option("--angles", o.angles, "Number of orientations N")->check(CLI::PositiveNumber);
  cmd->add_option("--sigma", o.sigma, "Gaussian pre-smoothing std-dev (pixels)")->check(CLI::PositiveNumber);
  cmd->add_option("--grad-threshold", o.gradThreshold, "Gradient magnitude treated as flat")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--fixed-angle", o.fixedAngle, "Lift every pixel at this angle (radians)");
  cmd->add_option("--cross", o.crossStructure, "Take orientations from this structure image");
}

double betaFromBeta2(double beta2) {
  if (!(beta2 >= 0.0) || !std::isfinite(beta2)) throw UsageError("--beta2 must be finite and >= 0");
  return std::sqrt(beta2);
}

LiftedField liftWithOptions(const Image& img, const LiftOptions& o) {
  const AngleGrid grid(o.angles);
  if (o.fixedAngle && !o.crossStructure.empty()) {
    throw UsageError("--fixed-angle and --cross are mutually exclusive");
  }
  if (o.fixedAngle) return liftFixedAngle(img, *o.fixedAngle, grid);
  if (!o.crossStructure.empty()) {
    const Image structure = loadImage(o.crossStructure);
    if (!structure.sameShape(img)) throw UsageError("--cross image dimensions differ from the input");
    return liftCross(structure, img, o.params(), grid);
  }
  return lift(img, o.params(), grid);
}

DiffusionParams diffusionParams(double beta2, double time, int cnSteps, int angles, bool symmetry) {
  if (!(time > 0.0)) throw UsageError("--time must be positive");
  DiffusionParams p;
  p.beta = betaFromBeta2(beta2);
  p.totalTime = time;
  p.timeSteps = cnSteps > 0 ? cnSteps : DiffusionParams::stepsFor(time);
  p.grid = AngleGrid(angles);
  p.useRotationSymmetry = symmetry;
  return p;
}

Mask requireMask(const InpaintOptions& o, const Image& img) {
  if (o.mask.empty()) {
    throw UsageError("method '" + o.method + "' needs a corruption mask: pass --mask <file>");
  }
  Mask mask = loadMask(o.mask);
  if (!mask.matches(img)) {
    throw UsageError("mask '" + o.mask + "' is " + std::to_string(mask.width()) + "x" +
                     std::to_string(mask.height()) + " but the image is " + std::to_string(img.width()) +
                     "x" + std::to_string(img.height()));
  }
  return mask;
}

VaryingCoeffParams varyingParams(const InpaintOptions& o, double beta) {
  VaryingCoeffParams p = VaryingCoeffParams::withBeta(beta);
  p.a0 = o.a0;
  if (o.a1) p.a1 = *o.a1;
  p.b0 = o.b0;
  p.b1 = o.b1;
  p.epsSigma = o.epsSigma;
  p.epsStar = o.epsStar;
  p.totalTime = o.time;
  p.timeSteps = o.cnSteps > 0 ? o.cnSteps : DiffusionParams::stepsFor(o.time);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("varying-coefficient parameters: ") + e.what() +
                     (o.a1 ? "" : " (a1 defaults to beta^2; pass --a1 when --beta2 is 0)"));
  }
  return p;
}

int runInpaint(const InpaintOptions& o) {
  const auto started = Clock::now();
  Diagnostics diag(o.diagnostics);
  const Image img = loadImage(o.input);
  const DiffusionParams diffusion =
      diffusionParams(o.beta2, o.time, o.cnSteps, o.lift.angles, o.rotationSymmetry);

  diag.write({{"event", "config"},
              {"command", "inpaint"},
              {"method", o.method},
              {"input", o.input},
              {"output", o.output},
              {"mask", o.mask},
              {"beta2", o.beta2},
              {"time", o.time},
              {"angles", o.lift.angles},
              {"cn_steps", diffusion.timeSteps},
              {"width", img.width()},
              {"height", img.height()}});

  Image result;
  std::optional<std::size_t> initialBad;
  if (o.method == "pure") {
    result = clampUnit(projectSum(diffuse(liftWithOptions(img, o.lift), diffusion)));
  } else if (o.method == "dr") {
    const Mask mask = requireMask(o, img);
    if (o.steps < 1) throw UsageError("--steps must be at least 1");
    DrParams dr;
    dr.totalTime = o.time;
    dr.intervals = o.steps;
    dr.stepsPerInterval = o.cnSteps;
    dr.diffusion = diffusion;
    dr.lift = o.lift.params();
    dr.heightMeasure = o.drHeight == "max" ? DrHeight::FiberMax : DrHeight::FiberSum;
    const DrResult out = dynamicRestoration(img, mask, dr);
    for (std::size_t r = 0; r < out.badCounts.size(); ++r) {
      diag.write({{"event", "dr_step"}, {"step", r}, {"bad_pixels", out.badCounts[r]}});
    }
    initialBad = mask.badCount();
    result = out.image;
  } else if (o.method == "varying") {
    const Mask mask = requireMask(o, img);
    const VaryingCoeffParams params = varyingParams(o, diffusion.beta);
    const CoefficientField coeffs = coefficientField(mask, params);
    result = clampUnit(projectSum(diffuseVarying(liftWithOptions(img, o.lift), coeffs, params)));
    initialBad = mask.badCount();
  } else if (o.method == "ahe") {
    const Mask mask = requireMask(o, img);
    AheParams params;
    params.strong = varyingParams(o, diffusion.beta);
    params.mixWeight = o.mixWeight;
    params.weak = diffusion;
    params.weak.totalTime = o.weakTime.value_or(o.time / 10.0);
    if (!(params.weak.totalTime > 0.0)) throw UsageError("--weak-time must be positive");
    params.weak.timeSteps = DiffusionParams::stepsFor(params.weak.totalTime);
    params.lift = o.lift.params();
    result = ahe(img, mask, params);
    initialBad = mask.badCount();
  } else {
    throw UsageError("unknown method '" + o.method + "'");
  }

  saveImage(result, o.output);
  Json summary = {{"event", "summary"},
                  {"status", "ok"},
                  {"mass_before", img.sum()},
                  {"mass_after", result.sum()},
                  {"wall_seconds", std::chrono::duration<double>(Clock::now() - started).count()}};
  if (initialBad) summary["bad_pixels_initial"] = *initialBad;
  diag.write(summary);
  return kExitOk;
}

int runLift(const LiftCommandOptions& o) {
  const Image img = loadImage(o.input);
  saveLifted(liftWithOptions(img, o.lift), o.output);
  return kExitOk;
}

int runDiffuse(const DiffuseOptions& o) {
  const LiftedField field = loadLifted(o.input);
  const DiffusionParams p =
      diffusionParams(o.beta2, o.time, o.cnSteps, field.orientations(), o.rotationSymmetry);
  saveLifted(diffuse(field, p), o.output);
  return kExitOk;
}

int runProject(const ProjectOptions& o) {
  const LiftedField field = loadLifted(o.input);
  const Image img = o.mode == "max" ? projectMax(field) : projectSum(field);
  saveImage(img, o.output);
  return kExitOk;
}

// key=value lines; '#' starts a comment.
BoundaryData readBoundaryFile(const std::string& path, CurveOptions& o) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open boundary file '" + path + "'");
  BoundaryData bd;
  bool seen[6] = {};
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineNo) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string text = trim(line.substr(eq + 1));
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw UsageError(path + ":" + std::to_string(lineNo) + ": '" + text + "' is not a number");
    }
    if (key == "x_in") { bd.start.x = value; seen[0] = true; }
    else if (key == "y_in") { bd.start.y = value; seen[1] = true; }
    else if (key == "theta_in") { bd.startAngle = value; seen[2] = true; }
    else if (key == "x_fin") { bd.end.x = value; seen[3] = true; }
    else if (key == "y_fin") { bd.end.y = value; seen[4] = true; }
    else if (key == "theta_fin") { bd.endAngle = value; seen[5] = true; }
    else if (key == "a") bd.a = value;
    else if (key == "b") bd.b = value;
    else if (key == "beta") o.beta = value;
    else if (key == "intervals") o.intervals = static_cast<int>(value);
    else if (key == "starts") o.starts = static_cast<int>(value);
    else throw UsageError(path + ":" + std::to_string(lineNo) + ": unknown key '" + key + "'");
  }
  if (!std::all_of(std::begin(seen), std::end(seen), [](bool b) { return b; })) {
    throw UsageError(path + ": needs x_in, y_in, theta_in, x_fin, y_fin and theta_fin");
  }
  return bd;
}

int runCompleteCurve(CurveOptions o, std::ostream& out) {
  BoundaryData bd;
  if (!o.config.empty()) {
    bd = readBoundaryFile(o.config, o);
  } else {
    if (o.start.size() != 3 || o.end.size() != 3) {
      throw UsageError("pass --start x,y,theta and --end x,y,theta, or --config <file>");
    }
    bd.start = {o.start[0], o.start[1]};
    bd.startAngle = o.start[2];
    bd.end = {o.end[0], o.end[1]};
    bd.endAngle = o.end[2];
    if (o.horizon.size() != 2) throw UsageError("--horizon needs a,b");
    bd.a = o.horizon[0];
    bd.b = o.horizon[1];
  }
  if (!(o.beta > 0.0)) throw UsageError("beta must be positive");
  if (o.intervals < 2) throw UsageError("intervals must be at least 2");
  if (o.starts < 1) throw UsageError("starts must be at least 1");
  try {
    bd = bd.normalized();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  CompletionOptions opts;
  opts.intervals = o.intervals;
  opts.starts = o.starts;
  const CompletionResult res = completeCurve(bd, o.beta, opts);

  if (!o.output.empty()) {
    std::ofstream csv(o.output, std::ios::trunc);
    if (!csv) throw IoError("cannot open '" + o.output + "' for writing");
    csv.precision(17);
    csv << "t,x,y,theta,u,v\n";
    const double h = res.controls.step();
    for (std::size_t i = 0; i < res.trajectory.nodes.size(); ++i) {
      const Pose& p = res.trajectory.nodes[i];
      csv << bd.a + static_cast<double>(i) * h << ',' << p.x << ',' << p.y << ',' << p.theta << ',';
      if (i < res.controls.u.size()) csv << res.controls.u[i] << ',' << res.controls.v[i];
      else csv << ',';
      csv << '\n';
    }
  }
  out.precision(12);
  out << "J = " << res.energy << "\n";
  out << "terminal_defect = " << res.defect << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hypoelliptic diffusion image inpainting and curve completion"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = all cores)");

  InpaintOptions inpaint;
  auto* inpaintCmd = app.add_subcommand("inpaint", "Restore an image by hypoelliptic diffusion");
  inpaintCmd->add_option("input", inpaint.input, "Input image (.pgm or .png)")->required();
  inpaintCmd->add_option("output", inpaint.output, "Output image (.pgm or .png)")->required();
  inpaintCmd->add_option("--method", inpaint.method, "pure | dr | varying | ahe")
      ->check(CLI::IsMember({"pure", "dr", "varying", "ahe"}));
  inpaintCmd->add_option("--mask", inpaint.mask, "Corruption mask (bad where value >= 128)");
  inpaintCmd->add_option("--beta2", inpaint.beta2, "beta^2, angular diffusion weight");
  inpaintCmd->add_option("--time", inpaint.time, "Total diffusion time T");
  inpaintCmd->add_option("--steps", inpaint.steps, "DR intervals n");
  inpaintCmd->add_option("--dr-height", inpaint.drHeight, "DR fiber height for sigma: sum | max")
      ->check(CLI::IsMember({"sum", "max"}));
  inpaintCmd->add_option("--cn-steps", inpaint.cnSteps, "Crank-Nicolson steps (0 = auto, dt <= 1/32)");
  inpaintCmd->add_flag("--rotation-symmetry", inpaint.rotationSymmetry,
                       "Reuse column factorizations across frequency rotations");
  inpaintCmd->add_option("--a0", inpaint.a0, "Varying coefficient a0");
  inpaintCmd->add_option("--a1", inpaint.a1, "Varying coefficient a1 (default beta^2)");
  inpaintCmd->add_option("--b0", inpaint.b0, "Varying coefficient b0");
  inpaintCmd->add_option("--b1", inpaint.b1, "Varying coefficient b1");
  inpaintCmd->add_option("--eps-sigma", inpaint.epsSigma, "sigma in eps = exp(-d^2/sigma)");
  inpaintCmd->add_option("--eps-star", inpaint.epsStar, "Coefficient cutoff in (0,1)");
  inpaintCmd->add_option("--mix-weight", inpaint.mixWeight, "AHE weight of the averaged fill on B")
      ->check(CLI::Range(0.0, 1.0));
  inpaintCmd->add_option("--weak-time", inpaint.weakTime, "AHE weak smoothing time (default T/10)");
  inpaintCmd->add_option("--diagnostics", inpaint.diagnostics, "JSON-lines diagnostics output");
  addLiftFlags(inpaintCmd, inpaint.lift);

  LiftCommandOptions liftOpts;
  auto* liftCmd = app.add_subcommand("lift", "Lift an image to an SRLF1 orientation field");
  liftCmd->add_option("input", liftOpts.input, "Input image")->required();
  liftCmd->add_option("output", liftOpts.output, "Output .srlf file")->required();
  addLiftFlags(liftCmd, liftOpts.lift);

  DiffuseOptions diffuseOpts;
  auto* diffuseCmd = app.add_subcommand("diffuse", "Diffuse an SRLF1 field");
  diffuseCmd->add_option("input", diffuseOpts.input, "Input .srlf file")->required();
  diffuseCmd->add_option("output", diffuseOpts.output, "Output .srlf file")->required();
  diffuseCmd->add_option("--beta2", diffuseOpts.beta2, "beta^2");
  diffuseCmd->add_option("--time", diffuseOpts.time, "Total diffusion time T");
  diffuseCmd->add_option("--cn-steps", diffuseOpts.cnSteps, "Crank-Nicolson steps (0 = auto)");
  diffuseCmd->add_flag("--rotation-symmetry", diffuseOpts.rotationSymmetry, "Use rotation orbits");

  ProjectOptions projectOpts;
  auto* projectCmd = app.add_subcommand("project", "Project an SRLF1 field to an image");
  projectCmd->add_option("input", projectOpts.input, "Input .srlf file")->required();
  projectCmd->add_option("output", projectOpts.output, "Output image")->required();
  projectCmd->add_option("--mode", projectOpts.mode, "sum | max")->check(CLI::IsMember({"sum", "max"}));

  CurveOptions curveOpts;
  auto* curveCmd = app.add_subcommand("complete-curve", "Sub-Riemannian curve completion");
  curveCmd->add_option("--config", curveOpts.config, "key=value boundary file");
  curveCmd->add_option("--start", curveOpts.start, "x,y,theta")->delimiter(',');
  curveCmd->add_option("--end", curveOpts.end, "x,y,theta")->delimiter(',');
  curveCmd->add_option("--horizon", curveOpts.horizon, "a,b")->delimiter(',');
  curveCmd->add_option("--beta", curveOpts.beta, "beta > 0");
  curveCmd->add_option("--intervals", curveOpts.intervals, "Control intervals M");
  curveCmd->add_option("--starts", curveOpts.starts, "Deterministic starts K");
  curveCmd->add_option("--output", curveOpts.output, "CSV trajectory output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  setThreadCount(threads);
  try {
    if (*inpaintCmd) return runInpaint(inpaint);
    if (*liftCmd) return runLift(liftOpts);
    if (*diffuseCmd) return runDiffuse(diffuseOpts);
    if (*projectCmd) return runProject(projectOpts);
    if (*curveCmd) return runCompleteCurve(curveOpts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace hypo::cli
