#include "wavespec/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "wavespec/errors.hpp"

namespace wavespec {

CollocationSystem::CollocationSystem(PeriodicBvpFunctions f, std::vector<double> breakpoints)
    : f_(std::move(f)), mesh_(std::move(breakpoints)) {
  if (f_.dim <= 0 || !f_.rhs) throw InvalidArgument("collocation: missing right-hand side");
  if (mesh_.size() < 3) throw InvalidArgument("collocation: need at least two intervals");
  if (mesh_.front() != 0.0 || std::abs(mesh_.back() - 1.0) > 1e-14) {
    throw InvalidArgument("collocation: breakpoints must span [0, 1]");
  }
  for (size_t i = 1; i < mesh_.size(); ++i) {
    if (!(mesh_[i] > mesh_[i - 1])) throw InvalidArgument("collocation: breakpoints must increase");
  }
  mesh_.back() = 1.0;
}

double CollocationSystem::point_s(int k) const {
  const int i = k / 2;
  if (k % 2 == 0) return mesh_[i];
  return 0.5 * (mesh_[i] + mesh_[i + 1]);
}

Mat CollocationSystem::dgdy(double s, const Vec& y, const Vec& p) const {
  if (f_.rhs_dy) return f_.rhs_dy(s, y, p);
  const int n = dim();
  Mat J(n, n);
  Vec yp = y;
  for (int j = 0; j < n; ++j) {
    const double h = 1e-7 * std::max(1.0, std::abs(y(j)));
    yp(j) = y(j) + h;
    const Vec gp = f_.rhs(s, yp, p);
    yp(j) = y(j) - h;
    const Vec gm = f_.rhs(s, yp, p);
    yp(j) = y(j);
    J.col(j) = (gp - gm) / (2.0 * h);
  }
  return J;
}

void CollocationSystem::set_phase_reference(const Vec& Yref, const Vec& p) {
  if (Yref.size() != size()) throw InvalidArgument("collocation: phase reference has wrong size");
  ref_ = Yref;
  ref_deriv_.resize(size());
  const int n = dim();
  for (int k = 0; k < 2 * intervals(); ++k) {
    ref_deriv_.segment(k * n, n) = f_.rhs(point_s(k), Yref.segment(k * n, n), p);
  }
  phase_ = true;
}

Vec CollocationSystem::residual(const Vec& Y, const Vec& p) const {
  const int n = dim();
  const int M = intervals();
  std::vector<Vec> g(2 * M);
  for (int k = 0; k < 2 * M; ++k) g[k] = f_.rhs(point_s(k), Y.segment(k * n, n), p);
  Vec r(equations());
  double phase = 0.0;
  for (int i = 0; i < M; ++i) {
    const int j = (i + 1) % M;
    const double h = mesh_[i + 1] - mesh_[i];
    const auto yi = Y.segment(node_offset(i), n);
    const auto ym = Y.segment(mid_offset(i), n);
    const auto yj = Y.segment(node_offset(j), n);
    const Vec& gi = g[2 * i];
    const Vec& gm = g[2 * i + 1];
    const Vec& gj = g[2 * j];
    r.segment(node_offset(i), n) = yj - yi - (h / 6.0) * (gi + 4.0 * gm + gj);
    r.segment(mid_offset(i), n) = ym - 0.5 * (yi + yj) - (h / 8.0) * (gi - gj);
    if (phase_) {
      auto term = [&](int off) { return (Y.segment(off, n) - ref_.segment(off, n)).dot(ref_deriv_.segment(off, n)); };
      phase += h / 6.0 * (term(node_offset(i)) + 4.0 * term(mid_offset(i)) + term(node_offset(j)));
    }
  }
  if (phase_) r(size()) = phase;
  return r;
}

StructuredJacobian CollocationSystem::structured_jacobian(const Vec& Y, const Vec& p,
                                                          const std::vector<int>& free) const {
  const int n = dim();
  const int M = intervals();
  const int nf = static_cast<int>(free.size());
  std::vector<Mat> G(2 * M);
  std::vector<Mat> gp(2 * M, Mat(n, nf));
  for (int k = 0; k < 2 * M; ++k) {
    const double s = point_s(k);
    const Vec yk = Y.segment(k * n, n);
    G[k] = dgdy(s, yk, p);
    for (int q = 0; q < nf; ++q) {
      Vec pp = p;
      const int idx = free[q];
      const double h = 1e-7 * std::max(1.0, std::abs(p(idx)));
      pp(idx) = p(idx) + h;
      const Vec fp = f_.rhs(s, yk, pp);
      pp(idx) = p(idx) - h;
      const Vec fm = f_.rhs(s, yk, pp);
      gp[k].col(q) = (fp - fm) / (2.0 * h);
    }
  }
  StructuredJacobian J;
  J.n = n;
  J.M = M;
  J.nf = nf;
  J.blocks.resize(M);
  const Mat I = Mat::Identity(n, n);
  for (int i = 0; i < M; ++i) {
    const int j = (i + 1) % M;
    const double h = mesh_[i + 1] - mesh_[i];
    IntervalBlocks& B = J.blocks[i];
    B.A1i = -I - (h / 6.0) * G[2 * i];
    B.A1m = -(4.0 * h / 6.0) * G[2 * i + 1];
    B.A1j = I - (h / 6.0) * G[2 * j];
    B.A2i = -0.5 * I - (h / 8.0) * G[2 * i];
    B.A2j = -0.5 * I + (h / 8.0) * G[2 * j];
    B.d1 = -(h / 6.0) * (gp[2 * i] + 4.0 * gp[2 * i + 1] + gp[2 * j]);
    B.d2 = -(h / 8.0) * (gp[2 * i] - gp[2 * j]);
  }
  J.border = Mat::Zero(phase_ ? 1 : 0, size() + nf);
  if (phase_) {
    for (int i = 0; i < M; ++i) {
      const double hl = mesh_[i + 1] - mesh_[i];
      const double hp = (i == 0) ? mesh_[M] - mesh_[M - 1] : mesh_[i] - mesh_[i - 1];
      J.border.row(0).segment(node_offset(i), n) = (hl + hp) / 6.0 * ref_deriv_.segment(node_offset(i), n).transpose();
      J.border.row(0).segment(mid_offset(i), n) = 4.0 * hl / 6.0 * ref_deriv_.segment(mid_offset(i), n).transpose();
    }
  }
  return J;
}

SpMat StructuredJacobian::to_sparse() const {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(M) * (5 * n * n + 2 * n * nf + n) + border.size());
  auto block = [&trip](int r0, int c0, const Mat& B) {
    for (int a = 0; a < B.rows(); ++a)
      for (int b = 0; b < B.cols(); ++b)
        if (B(a, b) != 0.0) trip.emplace_back(r0 + a, c0 + b, B(a, b));
  };
  for (int i = 0; i < M; ++i) {
    const int j = (i + 1) % M;
    const int r1 = 2 * i * n, r2 = (2 * i + 1) * n;
    const IntervalBlocks& B = blocks[i];
    block(r1, r1, B.A1i);
    block(r1, r2, B.A1m);
    block(r1, 2 * j * n, B.A1j);
    block(r2, r1, B.A2i);
    block(r2, r2, Mat::Identity(n, n));
    block(r2, 2 * j * n, B.A2j);
    block(r1, size(), B.d1);
    block(r2, size(), B.d2);
  }
  block(size(), 0, border);
  SpMat S(size() + border.rows(), size() + nf);
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

SpMat CollocationSystem::jacobian(const Vec& Y, const Vec& p, const std::vector<int>& free) const {
  return structured_jacobian(Y, p, free).to_sparse();
}

// Unknowns: nodes x_0..x_{M-1}, midpoints, parameters q. Midpoints are
// eliminated through E2 (identity coefficient), leaving per interval
// P_i x_i + Q_i x_{i+1} + R_i q = f_i. Nodes x_1..x_{M-1} are eliminated in
// order; (x_0, q) are kept as border unknowns.
BorderedSolver::BorderedSolver(const StructuredJacobian& J, const Mat& extra)
    : n_(J.n), M_(J.M), nf_(J.nf), blk_(J.blocks) {
  const int n = n_, M = M_, nf = nf_;
  const int size = J.size();
  Mat C(J.border.rows() + extra.rows(), size + nf);
  if (J.border.rows() > 0) C.topRows(J.border.rows()) = J.border;
  if (extra.rows() > 0) {
    if (extra.cols() != size + nf) throw InvalidArgument("BorderedSolver: extra rows have wrong width");
    C.bottomRows(extra.rows()) = extra;
  }
  K_ = static_cast<int>(C.rows());
  if (K_ != nf) throw InvalidArgument("BorderedSolver: system is not square");
  if (M < 2) throw InvalidArgument("BorderedSolver: need at least two intervals");
  nb_ = n + nf;
  const int K = K_, nb = nb_;

  // condensed border coefficients on nodes and parameters
  std::vector<Mat> Cn(M, Mat::Zero(K, n));
  Mat Dq = C.rightCols(nf);
  Cm_.resize(M);
  for (int i = 0; i < M; ++i) {
    const int j = (i + 1) % M;
    Cm_[i] = C.middleCols((2 * i + 1) * n, n);
    Cn[i] += C.middleCols(2 * i * n, n) - Cm_[i] * blk_[i].A2i;
    Cn[j] -= Cm_[i] * blk_[i].A2j;
    Dq -= Cm_[i] * blk_[i].d2;
  }
  auto P = [&](int i) -> Mat { return blk_[i].A1i - blk_[i].A1m * blk_[i].A2i; };
  auto Q = [&](int i) -> Mat { return blk_[i].A1j - blk_[i].A1m * blk_[i].A2j; };
  auto R = [&](int i) -> Mat { return blk_[i].d1 - blk_[i].A1m * blk_[i].d2; };

  // carried rows: coefficients on the current chain node and on the border
  Mat Cx = Q(0);
  Mat Cb(n, nb);
  Cb << P(0), R(0);
  Mat Bx = Cn[1];
  Mat Bb(K, nb);
  Bb << Cn[0], Dq;

  T_.resize(M);
  Ujj_.resize(M);
  Ujn_.resize(M);
  Ujb_.resize(M);
  E_.resize(M);
  double scale = 0.0;
  for (int j = 1; j < M; ++j) {
    const bool last = (j == M - 1);
    Mat W = Mat::Zero(2 * n, 2 * n + nb);  // columns: x_j | x_{j+1} | border
    W.block(0, 0, n, n) = Cx;
    W.block(0, 2 * n, n, nb) = Cb;
    W.block(n, 0, n, n) = P(j);
    if (last) {
      W.block(n, 2 * n, n, n) = Q(j);
    } else {
      W.block(n, n, n, n) = Q(j);
    }
    W.block(n, 3 * n, n, nf) = R(j);
    scale = std::max(scale, W.leftCols(n).cwiseAbs().maxCoeff());
    Mat T = Mat::Identity(2 * n, 2 * n);
    for (int c = 0; c < n; ++c) {
      int piv = c;
      for (int r = c + 1; r < 2 * n; ++r)
        if (std::abs(W(r, c)) > std::abs(W(piv, c))) piv = r;
      if (W(piv, c) == 0.0) return;
      if (piv != c) {
        W.row(piv).swap(W.row(c));
        T.row(piv).swap(T.row(c));
      }
      for (int r = c + 1; r < 2 * n; ++r) {
        const double l = W(r, c) / W(c, c);
        if (l == 0.0) continue;
        W.row(r) -= l * W.row(c);
        T.row(r) -= l * T.row(c);
      }
    }
    T_[j] = T;
    Ujj_[j] = W.block(0, 0, n, n).triangularView<Eigen::Upper>();
    Ujn_[j] = W.block(0, n, n, n);
    Ujb_[j] = W.block(0, 2 * n, n, nb);
    Cx = W.block(n, n, n, n);
    Cb = W.block(n, 2 * n, n, nb);
    // eliminate x_j from the border rows
    E_[j] = Ujj_[j].transpose().triangularView<Eigen::Lower>().solve(Bx.transpose()).transpose();
    Bb -= E_[j] * Ujb_[j];
    if (!last) Bx = Cn[j + 1] - E_[j] * Ujn_[j];
  }
  Mat F(n + K, nb);
  F << Cb, Bb;
  final_.compute(F);
  const Mat& LU = final_.matrixLU();
  const double dmax = LU.diagonal().cwiseAbs().maxCoeff();
  const double dmin = LU.diagonal().cwiseAbs().minCoeff();
  ok_ = std::isfinite(dmax) && dmin > 1e-14 * std::max(dmax, scale);
  for (int j = 1; j < M && ok_; ++j) {
    if (!(Ujj_[j].diagonal().cwiseAbs().minCoeff() > 1e-14 * scale)) ok_ = false;
  }
}

Vec BorderedSolver::solve(const Vec& rhs) const {
  const int n = n_, M = M_, nf = nf_;
  const int size = 2 * M * n;
  if (rhs.size() != size + K_) throw InvalidArgument("BorderedSolver: rhs has wrong size");
  auto f1 = [&](int i) { return rhs.segment(2 * i * n, n); };
  auto f2 = [&](int i) { return rhs.segment((2 * i + 1) * n, n); };
  auto fc = [&](int i) -> Vec { return f1(i) - blk_[i].A1m * f2(i); };
  Vec fb = rhs.tail(K_);
  for (int i = 0; i < M; ++i) fb -= Cm_[i] * f2(i);

  std::vector<Vec> u(M);
  Vec cr = fc(0);
  Vec w(2 * n);
  for (int j = 1; j < M; ++j) {
    w << cr, fc(j);
    w = T_[j] * w;
    u[j] = w.head(n);
    cr = w.tail(n);
    fb -= E_[j] * u[j];
  }
  Vec g(n + K_);
  g << cr, fb;
  const Vec b = final_.solve(g);

  std::vector<Vec> x(M);
  x[0] = b.head(n);
  const Vec q = b.tail(nf);
  for (int j = M - 1; j >= 1; --j) {
    Vec r = u[j] - Ujb_[j] * b;
    if (j < M - 1) r -= Ujn_[j] * x[j + 1];
    x[j] = Ujj_[j].triangularView<Eigen::Upper>().solve(r);
  }
  Vec out(size + nf);
  for (int i = 0; i < M; ++i) {
    const int j = (i + 1) % M;
    out.segment(2 * i * n, n) = x[i];
    out.segment((2 * i + 1) * n, n) = f2(i) - blk_[i].A2i * x[i] - blk_[i].A2j * x[j] - blk_[i].d2 * q;
  }
  out.tail(nf) = q;
  return out;
}

Vec CollocationSystem::discretize(const std::function<Vec(double)>& y) const {
  Vec Y(size());
  const int n = dim();
  for (int k = 0; k < 2 * intervals(); ++k) Y.segment(k * n, n) = y(point_s(k));
  return Y;
}

CollocationSystem::Local CollocationSystem::locate(double s) const {
  s -= std::floor(s);
  auto it = std::upper_bound(mesh_.begin(), mesh_.end(), s);
  int i = std::clamp(static_cast<int>(it - mesh_.begin()) - 1, 0, intervals() - 1);
  const double h = mesh_[i + 1] - mesh_[i];
  return {i, (s - mesh_[i]) / h, h};
}

Vec CollocationSystem::sample(const Vec& Y, const Vec& p, double s) const {
  const int n = dim();
  const Local loc = locate(s);
  const int i = loc.interval, j = (i + 1) % intervals();
  const Vec yi = Y.segment(node_offset(i), n), yj = Y.segment(node_offset(j), n);
  const Vec gi = f_.rhs(mesh_[i], yi, p), gj = f_.rhs(mesh_[i + 1], yj, p);
  const double t = loc.t, h = loc.h;
  return (1 + 2 * t) * (1 - t) * (1 - t) * yi + t * (1 - t) * (1 - t) * h * gi + t * t * (3 - 2 * t) * yj +
         t * t * (t - 1) * h * gj;
}

Vec CollocationSystem::sample_derivative(const Vec& Y, const Vec& p, double s) const {
  const int n = dim();
  const Local loc = locate(s);
  const int i = loc.interval, j = (i + 1) % intervals();
  const Vec yi = Y.segment(node_offset(i), n), yj = Y.segment(node_offset(j), n);
  const Vec gi = f_.rhs(mesh_[i], yi, p), gj = f_.rhs(mesh_[i + 1], yj, p);
  const double t = loc.t, h = loc.h;
  return (6 * t * t - 6 * t) / h * yi + (3 * t * t - 4 * t + 1) * gi + (6 * t - 6 * t * t) / h * yj +
         (3 * t * t - 2 * t) * gj;
}

std::vector<double> CollocationSystem::defects(const Vec& Y, const Vec& p) const {
  std::vector<double> d(intervals(), 0.0);
  for (int i = 0; i < intervals(); ++i) {
    const double h = mesh_[i + 1] - mesh_[i];
    for (double t : {0.25, 0.75}) {
      const double s = mesh_[i] + t * h;
      const Vec u = sample(Y, p, s);
      const Vec du = sample_derivative(Y, p, s);
      d[i] = std::max(d[i], (du - f_.rhs(s, u, p)).lpNorm<Eigen::Infinity>());
    }
  }
  return d;
}

namespace {

// Local density of the error constant, d_i ~ C_i h_i^3.
std::vector<double> error_density(const std::vector<double>& mesh, const std::vector<double>& d) {
  const int M = static_cast<int>(d.size());
  std::vector<double> rho(M);
  double mean = 0.0;
  for (int i = 0; i < M; ++i) {
    const double h = mesh[i + 1] - mesh[i];
    rho[i] = std::cbrt(d[i]) / h;
    mean += rho[i] * h;
  }
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<double> sm(M);
    for (int i = 0; i < M; ++i) sm[i] = 0.25 * rho[(i + M - 1) % M] + 0.5 * rho[i] + 0.25 * rho[(i + 1) % M];
    rho = sm;
  }
  for (auto& r : rho) r += 0.15 * mean + 1e-12;
  return rho;
}

}  // namespace

std::vector<double> CollocationSystem::equidistributed_mesh(const Vec& Y, const Vec& p, int n_int) const {
  const std::vector<double> rho = error_density(mesh_, defects(Y, p));
  const int M = intervals();
  std::vector<double> cum(M + 1, 0.0);
  for (int i = 0; i < M; ++i) cum[i + 1] = cum[i] + rho[i] * (mesh_[i + 1] - mesh_[i]);
  std::vector<double> out(n_int + 1);
  out[0] = 0.0;
  out[n_int] = 1.0;
  int i = 0;
  for (int k = 1; k < n_int; ++k) {
    const double target = cum[M] * k / n_int;
    while (i < M - 1 && cum[i + 1] < target) ++i;
    const double frac = (target - cum[i]) / (cum[i + 1] - cum[i]);
    out[k] = mesh_[i] + frac * (mesh_[i + 1] - mesh_[i]);
  }
  for (int k = 1; k <= n_int; ++k) {
    if (!(out[k] > out[k - 1])) out[k] = out[k - 1] + 1e-12;
  }
  out[n_int] = 1.0;
  return out;
}

int CollocationSystem::suggested_intervals(const Vec& Y, const Vec& p, double target, int lo, int hi) const {
  const std::vector<double> d = defects(Y, p);
  double integral = 0.0;
  for (int i = 0; i < intervals(); ++i) integral += std::cbrt(d[i]);  // sum of C_i^{1/3} h_i
  const double n = 1.25 * integral / std::cbrt(target);
  return std::clamp(static_cast<int>(std::ceil(n)), lo, hi);
}

CollocationSolution newton_collocation(const CollocationSystem& sys, Vec Y, Vec p,
                                       const std::vector<int>& free, const BvpOptions& opts) {
  if (sys.equations() != sys.size() + static_cast<int>(free.size())) {
    throw InvalidArgument("newton_collocation: system is not square (check phase condition / free parameters)");
  }
  CollocationSolution sol;
  Vec r = sys.residual(Y, p);
  sol.residual = r.lpNorm<Eigen::Infinity>();
  sol.history.push_back(sol.residual);
  while (!(sol.residual <= opts.tol)) {
    if (sol.iterations >= opts.max_iter || !r.allFinite()) {
      throw ConvergenceError("collocation Newton diverged (residual " + std::to_string(sol.residual) + ")",
                             sol.history);
    }
    const BorderedSolver lu(sys.structured_jacobian(Y, p, free));
    if (!lu.ok()) {
      throw FoldProximityError("collocation Jacobian is singular; the solution is probably near a fold, use arclength continuation");
    }
    const Vec dz = lu.solve(-r);
    if (!dz.allFinite()) throw FoldProximityError("collocation Jacobian is numerically singular");
    double t = 1.0;
    Vec Yn, pn, rn;
    const double r2 = r.squaredNorm();
    for (;;) {
      Yn = Y + t * dz.head(sys.size());
      pn = p;
      for (size_t q = 0; q < free.size(); ++q) pn(free[q]) += t * dz(sys.size() + q);
      bool ok = true;
      try {
        rn = sys.residual(Yn, pn);
        ok = rn.allFinite() && rn.squaredNorm() <= (1.0 - 1e-4 * t) * r2;
      } catch (const ParabolicityError&) {
        ok = false;
      }
      if (ok || t < 1.0 / 256.0) break;
      t *= 0.5;
    }
    if (!rn.allFinite() || rn.size() == 0) {
      throw ConvergenceError("collocation Newton left the admissible region", sol.history);
    }
    Y = std::move(Yn);
    p = std::move(pn);
    r = std::move(rn);
    sol.residual = r.lpNorm<Eigen::Infinity>();
    sol.history.push_back(sol.residual);
    ++sol.iterations;
  }
  sol.Y = std::move(Y);
  sol.p = std::move(p);
  return sol;
}

PeriodicBvpResult solve_periodic_bvp(const std::function<Vec(double x, const Vec& y, double mu)>& rhs,
                                     double period, const MeshFunction& guess,
                                     std::optional<double> mu0, const BvpOptions& opts) {
  guess.validate();
  if (!(period > 0.0)) throw InvalidArgument("solve_periodic_bvp: period must be positive");
  const int n = guess.dim();
  PeriodicBvpFunctions f;
  f.dim = n;
  f.rhs = [&rhs, period](double s, const Vec& y, const Vec& p) -> Vec { return period * rhs(period * s, y, p(0)); };

  // initial mesh from the guess nodes (mapped to [0, 1))
  std::vector<double> mesh;
  const double x0 = guess.nodes.front();
  for (double x : guess.nodes) mesh.push_back((x - x0) / period);
  if (mesh.front() != 0.0) mesh.insert(mesh.begin(), 0.0);
  mesh.push_back(1.0);
  auto cs = std::make_unique<CollocationSystem>(f, mesh);

  Vec p(1);
  p(0) = mu0.value_or(0.0);
  std::vector<int> free;
  Vec Y = cs->discretize([&](double s) { return guess.at(x0 + s * period); });
  if (mu0) {
    cs->set_phase_reference(Y, p);
    free.push_back(0);
  }

  CollocationSolution sol = newton_collocation(*cs, Y, p, free, opts);
  for (int pass = 0; opts.adapt && pass < opts.max_adapt; ++pass) {
    const std::vector<double> d = cs->defects(sol.Y, sol.p);
    const double dmax = *std::max_element(d.begin(), d.end());
    if (dmax <= opts.defect_tol) break;
    const int m_new = cs->suggested_intervals(sol.Y, sol.p, opts.defect_tol, opts.min_intervals, opts.max_intervals);
    auto next = std::make_unique<CollocationSystem>(f, cs->equidistributed_mesh(sol.Y, sol.p, m_new));
    const Vec Yc = sol.Y;
    const Vec pc = sol.p;
    Vec Yn = next->discretize([&](double s) { return cs->sample(Yc, pc, s); });
    if (mu0) next->set_phase_reference(Yn, pc);
    sol = newton_collocation(*next, Yn, pc, free, opts);
    cs = std::move(next);
    if (m_new >= opts.max_intervals) break;
  }

  PeriodicBvpResult out;
  const int M = cs->intervals();
  out.y.nodes.resize(M);
  out.y.values.resize(n, M);
  out.dy = out.y;
  for (int i = 0; i < M; ++i) {
    const double s = cs->mesh()[i];
    out.y.nodes[i] = x0 + period * s;
    out.y.values.col(i) = sol.Y.segment(cs->node_offset(i), n);
    out.dy.values.col(i) = f.rhs(s, out.y.values.col(i), sol.p) / period;
  }
  out.dy.nodes = out.y.nodes;
  out.y.periodic = out.dy.periodic = true;
  out.y.period = out.dy.period = period;
  if (mu0) out.mu = sol.p(0);
  out.residual = sol.residual;
  out.iterations = sol.iterations;
  const std::vector<double> d = cs->defects(sol.Y, sol.p);
  out.max_defect = *std::max_element(d.begin(), d.end());
  return out;
}

}  // namespace wavespec
