#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wavespec/errors.hpp"
#include "wavespec/types.hpp"

namespace wavespec {

struct IvpOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h0 = 0.0;  // 0 selects an initial step automatically
  double hmax = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
  bool dense = false;
};

/// Accepted steps of an integration, with cubic Hermite dense output.
template <class V>
struct IvpResult {
  V y;
  long steps = 0;
  long rejected = 0;
  std::vector<double> xs;  // filled when dense output is requested
  std::vector<V> ys;
  std::vector<V> dys;

  V at(double x) const {
    if (xs.size() < 2) return y;
    const bool fwd = xs.back() > xs.front();
    auto cmp = [fwd](double a, double b) { return fwd ? a < b : a > b; };
    auto it = std::upper_bound(xs.begin(), xs.end(), x, cmp);
    size_t i = std::clamp<size_t>(static_cast<size_t>(it - xs.begin()), 1, xs.size() - 1) - 1;
    const double h = xs[i + 1] - xs[i];
    const double t = (x - xs[i]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * ys[i] + (h10 * h) * dys[i] + h01 * ys[i + 1] + (h11 * h) * dys[i + 1];
  }
};

namespace detail {

template <class V>
double error_norm(const V& err, const V& y0, const V& y1, double rtol, double atol) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double e = std::abs(err(i)) / sc;
    s += e * e;
  }
  return std::sqrt(s / std::max<Eigen::Index>(1, err.size()));
}

}  // namespace detail

/// Dormand-Prince 5(4) with PI step-size control. `rhs(x, y)` returns y' for
/// real or complex Eigen vectors. Integrates forward or backward in x.
/// Throws StiffnessError on step-size underflow.
template <class V, class Rhs>
IvpResult<V> integrate_ivp(Rhs&& rhs, double x0, double x1, const V& y0, const IvpOptions& opt = {}) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  IvpResult<V> res;
  res.y = y0;
  if (x1 == x0) return res;
  const double dir = x1 > x0 ? 1.0 : -1.0;
  const double span = std::abs(x1 - x0);
  double x = x0;
  V k1 = rhs(x, res.y);
  if (!k1.allFinite()) throw InvalidArgument("integrate_ivp: right-hand side not finite at start");

  double h = opt.h0;
  if (h <= 0.0) {
    const double d0 = res.y.norm() / std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, res.y.size())));
    const double d1 = k1.norm() / std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, res.y.size())));
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min({h, span, opt.hmax});
    h = std::max(h, 1e-12 * span);
  }
  if (opt.dense) {
    res.xs.push_back(x);
    res.ys.push_back(res.y);
    res.dys.push_back(k1);
  }
  double err_prev = 1e-4;
  bool last_rejected = false;
  while (dir * (x1 - x) > 0.0) {
    if (res.steps + res.rejected >= opt.max_steps) {
      throw StiffnessError("integrate_ivp: maximum number of steps exceeded; the problem looks stiff, use an implicit method");
    }
    if (h < 1e-14 * std::max(1.0, std::abs(x))) {
      throw StiffnessError("integrate_ivp: step size underflow at x = " + std::to_string(x) +
                           "; the problem looks stiff, use an implicit method");
    }
    bool final_step = false;
    if (h >= std::abs(x1 - x)) {
      h = std::abs(x1 - x);
      final_step = true;
    }
    const double s = dir * h;
    const V k2 = rhs(x + c2 * s, (res.y + s * (a21 * k1)).eval());
    const V k3 = rhs(x + c3 * s, (res.y + s * (a31 * k1 + a32 * k2)).eval());
    const V k4 = rhs(x + c4 * s, (res.y + s * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const V k5 = rhs(x + c5 * s, (res.y + s * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const V k6 = rhs(x + s, (res.y + s * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    const V ynew = res.y + s * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const V k7 = rhs(x + s, ynew);
    const V err = s * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = detail::error_norm(err, res.y, ynew, opt.rtol, opt.atol);
    if (!ynew.allFinite() || !k7.allFinite()) en = std::numeric_limits<double>::infinity();

    if (en <= 1.0) {
      x = final_step ? x1 : x + s;
      res.y = ynew;
      k1 = k7;
      ++res.steps;
      if (opt.dense) {
        res.xs.push_back(x);
        res.ys.push_back(res.y);
        res.dys.push_back(k1);
      }
      // PI controller (Gustafsson)
      double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      h = std::min(h * fac, opt.hmax);
      err_prev = std::max(en, 1e-4);
      last_rejected = false;
    } else {
      ++res.rejected;
      const double fac = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.1;
      h *= fac;
      last_rejected = true;
    }
  }
  return res;
}

}  // namespace wavespec
