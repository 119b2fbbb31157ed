#pragma once

#include <functional>
#include <vector>

#include "wavespec/types.hpp"

namespace wavespec {

using VecFn = std::function<Vec(const Vec&)>;
using MatFn = std::function<Mat(const Vec&)>;

struct NewtonOptions {
  double tol = 1e-10;       // on ||F||_inf
  int max_iter = 50;
  double fd_step = 1e-7;    // relative step for finite-difference Jacobians
  bool line_search = true;
};

struct NewtonResult {
  Vec x;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

/// Central-difference Jacobian of F at x.
Mat fd_jacobian(const VecFn& F, const Vec& x, double rel_step = 1e-7);

/// Damped Newton iteration with backtracking on ||F||_2. When J is empty the
/// Jacobian is approximated by central differences. Throws ConvergenceError
/// (carrying the residual history) after max_iter iterations.
NewtonResult newton_solve(const VecFn& F, const MatFn& J, const Vec& x0,
                          const NewtonOptions& opts = {});

}  // namespace wavespec
