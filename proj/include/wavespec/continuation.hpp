#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "wavespec/types.hpp"

namespace wavespec {

/// Underdetermined system F(z) = 0, F: R^{n+1} -> R^n. The continuation
/// parameter is the component `param_index` of z.
struct ContinuationProblem {
  std::function<Vec(const Vec& z)> residual;
  std::function<SpMat(const Vec& z)> jacobian;  // n x (n+1)
  Vec weights;                                   // scaled norm; empty means all ones
  int param_index = 0;
  /// Called on every accepted point (e.g. to move a phase reference).
  std::function<void(const Vec& z)> accept;
  /// Scalar solution measure recorded on the branch; defaults to the parameter.
  std::function<double(const Vec& z)> measure;
  /// Optional structured factorization of [J(z); row^T]; returns an empty
  /// function when singular. Without it the sparse Jacobian is factored by SparseLU.
  std::function<std::function<Vec(const Vec&)>(const Vec& z, const Vec& row)> factor;
};

struct StepControl {
  double h0 = 0.05;
  double hmin = 1e-8;
  double hmax = 1.0;
  int max_steps = 1000;
  double newton_tol = 1e-10;
  int max_newton = 10;
  double growth = 1.5;
  double fold_tol = 1e-6;  // parameter accuracy of refined folds
  double param_min = -std::numeric_limits<double>::infinity();
  double param_max = std::numeric_limits<double>::infinity();
};

struct BranchPoint {
  Vec z;
  double param = 0.0;
  double measure = 0.0;
  Vec tangent;  // unit length in the weighted norm
  double arclength = 0.0;
  std::string stability;  // filled by callers that compute spectra
};

struct BranchEvent {
  std::string type;  // "fold", "boundary", "user"
  int after = 0;     // index of the branch point preceding the event
  double param = 0.0;
  Vec z;
};

struct Branch {
  std::vector<BranchPoint> points;
  std::vector<double> steps;
  std::vector<BranchEvent> events;
  bool truncated = false;
  std::string diagnostic;
};

/// Unit tangent of the branch at z, oriented along `orient` (any vector with
/// a nonzero projection on the tangent).
Vec branch_tangent(const ContinuationProblem& p, const Vec& z, const Vec& orient);

/// Newton corrector for F(z) = 0 together with the parameter pinned to `value`.
Vec correct_at_parameter(const ContinuationProblem& p, const Vec& guess, double value,
                         double tol = 1e-10, int max_iter = 20);

/// Newton corrector for F(z) = 0 together with <row, z - anchor> = 0.
Vec correct_on_hyperplane(const ContinuationProblem& p, const Vec& guess, const Vec& row, const Vec& anchor,
                          double tol = 1e-10, int max_iter = 20);

/// Pseudo-arclength predictor-corrector from a converged z0. `direction`
/// orients the initial tangent (empty: increasing parameter). Stops after
/// max_steps, when the parameter leaves [param_min, param_max] (the last point
/// is then placed on the bound), when `stop` returns true, or when the step
/// underflows hmin (branch marked truncated).
Branch arclength_continue(const ContinuationProblem& p, const Vec& z0, const StepControl& ctl,
                          const Vec& direction = {},
                          const std::function<bool(const BranchPoint&)>& stop = {});

}  // namespace wavespec
