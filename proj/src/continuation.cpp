#include "wavespec/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

#include <Eigen/SparseLU>

#include "wavespec/errors.hpp"

namespace wavespec {

namespace {

Vec weights_of(const ContinuationProblem& p, Eigen::Index n) {
  if (p.weights.size() == 0) return Vec::Ones(n);
  if (p.weights.size() != n) throw InvalidArgument("continuation: weight vector has wrong size");
  return p.weights;
}

// [J; row^T] as a square sparse matrix.
SpMat bordered(const SpMat& J, const Vec& row) {
  std::vector<Triplet> trip;
  trip.reserve(J.nonZeros() + row.size());
  for (int k = 0; k < J.outerSize(); ++k)
    for (SpMat::InnerIterator it(J, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index j = 0; j < row.size(); ++j)
    if (row(j) != 0.0) trip.emplace_back(J.rows(), j, row(j));
  SpMat A(J.rows() + 1, J.cols());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

using Solve = std::function<Vec(const Vec&)>;

Solve factor_bordered(const ContinuationProblem& p, const Vec& z, const Vec& row) {
  if (p.factor) return p.factor(z, row);
  auto lu = std::make_shared<Eigen::SparseLU<SpMat>>();
  lu->compute(bordered(p.jacobian(z), row));
  if (lu->info() != Eigen::Success) return {};
  return [lu](const Vec& b) -> Vec { return lu->solve(b); };
}

double wnorm(const Vec& v, const Vec& w) { return std::sqrt((w.array() * v.array().square()).sum()); }

// Newton on F(z) = 0, <row, z - anchor> = 0.
std::optional<Vec> correct(const ContinuationProblem& p, Vec z, const Vec& row, const Vec& anchor, double tol,
                           int max_iter) {
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= max_iter; ++it) {
    Vec F;
    try {
      F = p.residual(z);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (!F.allFinite()) return std::nullopt;
    const double c = row.dot(z - anchor);
    const double r = std::max(F.lpNorm<Eigen::Infinity>(), std::abs(c));
    if (r <= tol) return z;
    if (it == max_iter || (it > 1 && r > 2.0 * prev)) return std::nullopt;
    prev = r;
    Solve lu;
    try {
      lu = factor_bordered(p, z, row);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (!lu) return std::nullopt;
    Vec rhs(F.size() + 1);
    rhs.head(F.size()) = -F;
    rhs(F.size()) = -c;
    const Vec dz = lu(rhs);
    if (!dz.allFinite()) return std::nullopt;
    z += dz;
  }
  return std::nullopt;
}

}  // namespace

Vec branch_tangent(const ContinuationProblem& p, const Vec& z, const Vec& orient) {
  const Vec w = weights_of(p, z.size());
  const Vec row = (w.array() * orient.array()).matrix();
  const Solve lu = factor_bordered(p, z, row);
  if (!lu) throw FoldProximityError("continuation: singular bordered Jacobian");
  Vec e = Vec::Zero(z.size());
  e(z.size() - 1) = 1.0;
  Vec t = lu(e);
  if (!t.allFinite()) throw FoldProximityError("continuation: tangent computation failed");
  t /= wnorm(t, w);
  if (t.dot(row) < 0.0) t = -t;
  return t;
}

Vec correct_at_parameter(const ContinuationProblem& p, const Vec& guess, double value, double tol, int max_iter) {
  Vec row = Vec::Zero(guess.size());
  row(p.param_index) = 1.0;
  Vec anchor = guess;
  anchor(p.param_index) = value;
  Vec z = guess;
  z(p.param_index) = value;
  auto res = correct(p, z, row, anchor, tol, max_iter);
  if (!res) throw ConvergenceError("continuation: corrector at fixed parameter failed");
  return *res;
}

Vec correct_on_hyperplane(const ContinuationProblem& p, const Vec& guess, const Vec& row, const Vec& anchor,
                          double tol, int max_iter) {
  auto res = correct(p, guess, row, anchor, tol, max_iter);
  if (!res) throw ConvergenceError("continuation: corrector on hyperplane failed");
  return *res;
}

Branch arclength_continue(const ContinuationProblem& p, const Vec& z0, const StepControl& ctl, const Vec& direction,
                          const std::function<bool(const BranchPoint&)>& stop) {
  const Eigen::Index n1 = z0.size();
  const Vec w = weights_of(p, n1);
  const int ip = p.param_index;
  auto measure = [&p, ip](const Vec& z) { return p.measure ? p.measure(z) : z(ip); };

  Branch br;
  Vec orient = direction;
  if (orient.size() == 0) {
    orient = Vec::Zero(n1);
    orient(ip) = 1.0;
  }
  {
    const Vec F = p.residual(z0);
    if (F.lpNorm<Eigen::Infinity>() > std::max(ctl.newton_tol, 1e-8) * 10.0) {
      throw InvalidArgument("arclength_continue: start point is not converged");
    }
  }
  BranchPoint bp;
  bp.z = z0;
  bp.param = z0(ip);
  bp.measure = measure(z0);
  bp.tangent = branch_tangent(p, z0, orient);
  br.points.push_back(bp);
  if (p.accept) p.accept(z0);

  double h = ctl.h0;
  while (static_cast<int>(br.points.size()) <= ctl.max_steps) {
    const BranchPoint& cur = br.points.back();
    const Vec& t = cur.tangent;
    const Vec row = (w.array() * t.array()).matrix();
    std::optional<Vec> znew;
    while (!znew) {
      const Vec pred = cur.z + h * t;
      znew = correct(p, pred, row, pred, ctl.newton_tol, ctl.max_newton);
      if (!znew) {
        h *= 0.5;
        if (h < ctl.hmin) {
          br.truncated = true;
          br.diagnostic = "step size fell below hmin at parameter " + std::to_string(cur.param);
          return br;
        }
      }
    }
    Vec tnew;
    try {
      tnew = branch_tangent(p, *znew, t);
    } catch (const Error&) {
      h *= 0.5;
      if (h < ctl.hmin) {
        br.truncated = true;
        br.diagnostic = "singular tangent system at parameter " + std::to_string((*znew)(ip));
        return br;
      }
      continue;
    }
    // reject steps that turn too sharply; they usually jump between branches
    if (t.dot((w.array() * tnew.array()).matrix()) < 0.5 && h > ctl.hmin * 4.0) {
      h *= 0.5;
      continue;
    }

    const double pnew = (*znew)(ip);
    if (pnew > ctl.param_max || pnew < ctl.param_min) {
      const double bound = pnew > ctl.param_max ? ctl.param_max : ctl.param_min;
      const double frac = (bound - cur.param) / (pnew - cur.param);
      const Vec guess = cur.z + frac * (*znew - cur.z);
      BranchPoint last;
      last.z = correct_at_parameter(p, guess, bound, ctl.newton_tol, 2 * ctl.max_newton);
      last.param = bound;
      last.measure = measure(last.z);
      last.tangent = branch_tangent(p, last.z, t);
      last.arclength = cur.arclength + wnorm(last.z - cur.z, w);
      br.events.push_back({"boundary", static_cast<int>(br.points.size()) - 1, bound, last.z});
      br.points.push_back(last);
      br.steps.push_back(h);
      if (p.accept) p.accept(last.z);
      return br;
    }

    if (t(ip) * tnew(ip) < 0.0) {
      // fold between cur and znew: bisect on the step length
      double slo = 0.0, shi = h;
      Vec zlo = cur.z, zhi = *znew;
      for (int it = 0; it < 60 && std::abs(zhi(ip) - zlo(ip)) > ctl.fold_tol; ++it) {
        const double s = 0.5 * (slo + shi);
        const Vec pred = cur.z + s * t;
        auto zm = correct(p, pred, row, pred, ctl.newton_tol, ctl.max_newton);
        if (!zm) break;
        Vec tm;
        try {
          tm = branch_tangent(p, *zm, t);
        } catch (const Error&) {
          zlo = zhi = *zm;
          break;
        }
        if (tm(ip) * t(ip) > 0.0) {
          slo = s;
          zlo = *zm;
        } else {
          shi = s;
          zhi = *zm;
        }
      }
      const Vec& zf = (t(ip) > 0.0) == (zhi(ip) > zlo(ip)) ? zhi : zlo;
      br.events.push_back({"fold", static_cast<int>(br.points.size()) - 1, zf(ip), zf});
    }

    BranchPoint np;
    np.z = *znew;
    np.param = pnew;
    np.measure = measure(np.z);
    np.tangent = tnew;
    np.arclength = cur.arclength + wnorm(np.z - cur.z, w);
    br.points.push_back(np);
    br.steps.push_back(h);
    if (p.accept) p.accept(np.z);
    if (stop && stop(br.points.back())) return br;
    h = std::min(h * ctl.growth, ctl.hmax);
  }
  return br;
}

}  // namespace wavespec
