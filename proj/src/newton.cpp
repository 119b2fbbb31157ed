#include "wavespec/newton.hpp"

#include <cmath>

#include "wavespec/errors.hpp"

namespace wavespec {

Mat fd_jacobian(const VecFn& F, const Vec& x, double rel_step) {
  const Vec f0 = F(x);
  Mat J(f0.size(), x.size());
  Vec xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x(j)));
    xp(j) = x(j) + h;
    const Vec fp = F(xp);
    xp(j) = x(j) - h;
    const Vec fm = F(xp);
    xp(j) = x(j);
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

NewtonResult newton_solve(const VecFn& F, const MatFn& J, const Vec& x0, const NewtonOptions& opts) {
  NewtonResult r;
  r.x = x0;
  Vec f = F(r.x);
  r.residual = f.lpNorm<Eigen::Infinity>();
  r.history.push_back(r.residual);
  while (!(r.residual <= opts.tol)) {
    if (r.iterations >= opts.max_iter || !f.allFinite()) {
      throw ConvergenceError("newton: no convergence after " + std::to_string(r.iterations) +
                                 " iterations (last residual " + std::to_string(r.residual) + ")",
                             r.history);
    }
    const Mat jac = J ? J(r.x) : fd_jacobian(F, r.x, opts.fd_step);
    const Vec dx = jac.fullPivLu().solve(-f);
    if (!dx.allFinite()) throw ConvergenceError("newton: singular Jacobian", r.history);
    double t = 1.0;
    Vec xn = r.x + dx;
    Vec fn = F(xn);
    if (opts.line_search) {
      const double f2 = f.squaredNorm();
      while (t > 1.0 / 1024.0 && !(fn.allFinite() && fn.squaredNorm() <= (1.0 - 1e-4 * t) * f2)) {
        t *= 0.5;
        xn = r.x + t * dx;
        fn = F(xn);
      }
    }
    r.x = xn;
    f = fn;
    r.residual = f.lpNorm<Eigen::Infinity>();
    r.history.push_back(r.residual);
    ++r.iterations;
  }
  return r;
}

}  // namespace wavespec
