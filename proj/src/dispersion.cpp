#include "wavespec/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wavespec/equilibria.hpp"
#include "wavespec/errors.hpp"
#include "wavespec/linalg.hpp"

namespace wavespec {

CMat dispersion_matrix(const ModelSpec& m, const Vec& ustar, double c, double kappa) {
  const int n = m.n_species;
  const Vec zero = Vec::Zero(n);
  const PointCoefficients pc = linearize_at(m, ustar, zero, zero, c);
  const cplx ik(0.0, kappa);
  return (-kappa * kappa) * pc.alpha.cast<cplx>() + ik * pc.beta.cast<cplx>() + pc.gamma.cast<cplx>();
}

namespace {

// Assignment of new samples to previous slots minimizing total distance.
std::vector<int> assign(const std::vector<cplx>& pred, const CVec& vals, const std::vector<CVec>& prev_vecs,
                        const CMat* vecs) {
  const int n = static_cast<int>(pred.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  auto overlap = [&](int slot, int j) {
    if (!vecs || prev_vecs.empty() || prev_vecs[slot].size() == 0) return 0.0;
    return std::abs(prev_vecs[slot].dot(vecs->col(j)));
  };
  if (n <= 7) {
    std::vector<int> best = perm;
    double best_d = std::numeric_limits<double>::infinity(), best_o = -1.0;
    do {
      double d = 0.0, o = 0.0;
      for (int s = 0; s < n; ++s) {
        d += std::abs(vals(perm[s]) - pred[s]);
        o += overlap(s, perm[s]);
      }
      const double scale = 1e-12 * (1.0 + d);
      if (d < best_d - scale || (std::abs(d - best_d) <= scale && o > best_o)) {
        best_d = d;
        best_o = o;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  struct Pair {
    double d;
    int s, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<size_t>(n) * n);
  for (int s = 0; s < n; ++s)
    for (int j = 0; j < n; ++j) pairs.push_back({std::abs(vals(j) - pred[s]) - 1e-14 * overlap(s, j), s, j});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.s != b.s) return a.s < b.s;
    return a.j < b.j;
  });
  std::vector<int> out(n, -1);
  std::vector<bool> used(n, false);
  for (const auto& p : pairs) {
    if (out[p.s] >= 0 || used[p.j]) continue;
    out[p.s] = p.j;
    used[p.j] = true;
  }
  return out;
}

}  // namespace

std::vector<SpectralCurve> match_curves(const std::vector<double>& grid, const std::vector<CVec>& values,
                                        const std::vector<CMat>& vectors, double jump_tol,
                                        const std::string& method, std::vector<std::string>* warnings) {
  if (grid.size() != values.size()) throw InvalidArgument("match_curves: grid/value size mismatch");
  const bool with_vecs = vectors.size() == values.size();
  std::vector<SpectralCurve> curves;
  std::vector<int> slot_curve;  // current curve index per slot

  auto start_all = [&](size_t g) {
    const CVec& v = values[g];
    std::vector<int> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (v(a).real() != v(b).real()) return v(a).real() > v(b).real();
      return v(a).imag() > v(b).imag();
    });
    slot_curve.clear();
    for (int j : order) {
      SpectralCurve c;
      c.method = method;
      c.branch = static_cast<int>(curves.size());
      c.kappa.push_back(grid[g]);
      c.lambda.push_back(v(j));
      if (with_vecs) c.vectors.push_back(vectors[g].col(j));
      slot_curve.push_back(static_cast<int>(curves.size()));
      curves.push_back(std::move(c));
    }
  };

  for (size_t g = 0; g < grid.size(); ++g) {
    if (g > 0 && !(grid[g] > grid[g - 1])) throw InvalidArgument("match_curves: grid must be increasing");
    if (g == 0 || values[g].size() != static_cast<Eigen::Index>(slot_curve.size())) {
      if (g > 0 && warnings) warnings->push_back("eigenvalue count changed at grid point " + std::to_string(g));
      start_all(g);
      continue;
    }
    const int n = static_cast<int>(slot_curve.size());
    std::vector<cplx> pred(n);
    std::vector<CVec> prev_vecs;
    for (int s = 0; s < n; ++s) {
      const SpectralCurve& c = curves[slot_curve[s]];
      const size_t k = c.lambda.size();
      if (k >= 2) {
        const double r = (grid[g] - c.kappa[k - 1]) / (c.kappa[k - 1] - c.kappa[k - 2]);
        pred[s] = c.lambda[k - 1] + r * (c.lambda[k - 1] - c.lambda[k - 2]);
      } else {
        pred[s] = c.lambda[k - 1];
      }
      if (with_vecs) prev_vecs.push_back(c.vectors.back());
    }
    const std::vector<int> a = assign(pred, values[g], prev_vecs, with_vecs ? &vectors[g] : nullptr);
    for (int s = 0; s < n; ++s) {
      const cplx lam = values[g](a[s]);
      SpectralCurve* c = &curves[slot_curve[s]];
      const cplx last = c->lambda.back();
      if (std::abs(lam - last) > jump_tol * (1.0 + std::abs(last))) {
        if (warnings) {
          warnings->push_back(method + ": branch " + std::to_string(c->branch) + " split at grid value " +
                              std::to_string(grid[g]));
        }
        SpectralCurve nc;
        nc.method = method;
        nc.branch = static_cast<int>(curves.size());
        slot_curve[s] = nc.branch;
        curves.push_back(std::move(nc));
        c = &curves.back();
      }
      c->kappa.push_back(grid[g]);
      c->lambda.push_back(lam);
      if (with_vecs) c->vectors.push_back(vectors[g].col(a[s]));
    }
  }
  return curves;
}

std::vector<SpectralCurve> spectrum_homogeneous(const ModelSpec& m, const Vec& ustar, double c,
                                                const std::vector<double>& kappa_grid, double jump_tol,
                                                std::vector<std::string>* warnings) {
  if (!check_parabolic(m, ustar)) throw ParabolicityError("spectrum_homogeneous: state is not parabolic");
  std::vector<CVec> vals(kappa_grid.size());
  std::vector<CMat> vecs(kappa_grid.size());
  for (size_t k = 0; k < kappa_grid.size(); ++k) {
    const EigenPairs ep = eig_dense(dispersion_matrix(m, ustar, c, kappa_grid[k]));
    vals[k] = ep.values;
    vecs[k] = ep.vectors;
  }
  auto curves = match_curves(kappa_grid, vals, vecs, jump_tol, "fourier", warnings);
  for (auto& cv : curves) cv.reference = m.name;
  return curves;
}

std::vector<SpectralCurve> conjugate_completion(const std::vector<SpectralCurve>& curves) {
  std::vector<SpectralCurve> out;
  for (const auto& c : curves) {
    SpectralCurve m = c;
    m.kappa.clear();
    m.lambda.clear();
    m.vectors.clear();
    for (size_t j = c.kappa.size(); j-- > 0;) {
      m.kappa.push_back(-c.kappa[j]);
      m.lambda.push_back(std::conj(c.lambda[j]));
      if (!c.vectors.empty()) m.vectors.push_back(c.vectors[j].conjugate());
    }
    out.push_back(std::move(m));
  }
  return out;
}

Growth max_growth(const std::vector<SpectralCurve>& curves) {
  if (curves.empty()) throw InvalidArgument("max_growth: no curves");
  Growth g;
  g.max_re = -std::numeric_limits<double>::infinity();
  const SpectralCurve* best = nullptr;
  size_t bj = 0;
  for (const auto& c : curves) {
    for (size_t j = 0; j < c.lambda.size(); ++j) {
      if (c.lambda[j].real() > g.max_re) {
        g.max_re = c.lambda[j].real();
        g.kappa = c.kappa[j];
        g.branch = c.branch;
        g.lambda = c.lambda[j];
        best = &c;
        bj = j;
      }
    }
  }
  if (!best) throw InvalidArgument("max_growth: curves are empty");
  if (bj > 0 && bj + 1 < best->lambda.size()) {
    const double x0 = best->kappa[bj - 1], x1 = best->kappa[bj], x2 = best->kappa[bj + 1];
    const double y0 = best->lambda[bj - 1].real(), y1 = best->lambda[bj].real(), y2 = best->lambda[bj + 1].real();
    const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    if (a < 0.0) {
      const double b = d01 - a * (x0 + x1);
      const double xs = -b / (2.0 * a);
      if (xs >= x0 && xs <= x2) {
        g.kappa = xs;
        g.max_re = y1 + b * (xs - x1) + a * (xs * xs - x1 * x1);
        const double t = (xs - x1);
        const cplx slope = t >= 0.0 ? (best->lambda[bj + 1] - best->lambda[bj]) / (x2 - x1)
                                    : (best->lambda[bj] - best->lambda[bj - 1]) / (x1 - x0);
        g.lambda = cplx(g.max_re, (best->lambda[bj] + slope * t).imag());
      }
    }
  }
  return g;
}

double growth_at(const ModelSpec& m, const Vec& ustar, double c, double kappa) {
  return eigvals_dense(dispersion_matrix(m, ustar, c, kappa)).real().maxCoeff();
}

std::vector<double> default_kappa_grid(int n, double kmax) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = kmax * i / (n - 1);
  return g;
}

ModelFamily gsk_plus_family(double B, double C, double D) {
  ModelFamily f;
  f.model = [B, C, D](double A) { return make_gsk(A, B, C, D); };
  f.state = [B](double A) {
    auto e = gsk_state(A, B, "plus");
    if (!e) throw InvalidArgument("gsk: no vegetated state for A = " + std::to_string(A) + " < 4B^2");
    return e->u;
  };
  return f;
}

namespace {

Growth family_growth(const ModelFamily& fam, double theta, double c, const std::vector<double>& grid) {
  const ModelSpec m = fam.model(theta);
  return max_growth(spectrum_homogeneous(m, fam.state(theta), c, grid));
}

}  // namespace

OnsetResult detect_turing_hopf(const ModelFamily& fam, double c, double theta_lo, double theta_hi, double tol,
                               const std::vector<double>& kappa_grid) {
  if (!(theta_lo < theta_hi)) throw InvalidArgument("detect_turing_hopf: bracket must be ordered");
  Growth glo = family_growth(fam, theta_lo, c, kappa_grid);
  Growth ghi = family_growth(fam, theta_hi, c, kappa_grid);
  if ((glo.max_re > 0.0) == (ghi.max_re > 0.0)) {
    throw BracketError("detect_turing_hopf: max Re lambda has the same sign at both ends of the bracket");
  }
  OnsetResult r;
  double a = theta_lo, b = theta_hi;
  const bool lo_pos = glo.max_re > 0.0;
  Growth gm = glo;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    gm = family_growth(fam, mid, c, kappa_grid);
    if ((gm.max_re > 0.0) == lo_pos) a = mid;
    else b = mid;
    ++r.iterations;
  }
  r.theta = 0.5 * (a + b);
  const Growth g = family_growth(fam, r.theta, c, kappa_grid);
  r.kappa = g.kappa;
  r.im_lambda = g.lambda.imag();
  const double dk = kappa_grid.size() > 1 ? kappa_grid[1] - kappa_grid[0] : 0.0;
  r.flag = std::abs(r.kappa) > 2.0 * dk ? "turing_hopf" : "hopf_or_steady";
  return r;
}

OnsetResult neutral_point(const ModelFamily& fam, double c, double kappa, double theta_lo, double theta_hi,
                          double tol) {
  auto g = [&](double th) { return growth_at(fam.model(th), fam.state(th), c, kappa); };
  double a = theta_lo, b = theta_hi;
  const double ga = g(a), gb = g(b);
  if ((ga > 0.0) == (gb > 0.0)) throw BracketError("neutral_point: growth has the same sign at both ends");
  OnsetResult r;
  const bool lo_pos = ga > 0.0;
  while (b - a > tol * std::max(1.0, std::abs(a))) {
    const double mid = 0.5 * (a + b);
    if ((g(mid) > 0.0) == lo_pos) a = mid;
    else b = mid;
    ++r.iterations;
    if (r.iterations > 200) break;
  }
  r.theta = 0.5 * (a + b);
  r.kappa = kappa;
  const CVec ev = eigvals_dense(dispersion_matrix(fam.model(r.theta), fam.state(r.theta), c, kappa));
  Eigen::Index i;
  ev.real().maxCoeff(&i);
  r.im_lambda = ev(i).imag();
  r.flag = kappa != 0.0 ? "turing_hopf" : "hopf_or_steady";
  return r;
}

}  // namespace wavespec
