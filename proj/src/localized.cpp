#include "wavespec/localized.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "wavespec/bloch.hpp"
#include "wavespec/errors.hpp"
#include "wavespec/linalg.hpp"

namespace wavespec {

namespace {

constexpr double kPi = 3.14159265358979323846;

int count_right(const CVec& mu, double tol, bool& ambiguous) {
  int k = 0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (std::abs(mu(i).real()) <= tol) ambiguous = true;
    if (mu(i).real() > tol) ++k;
  }
  return k;
}

// Eigenvectors (r, mu r) for the selected spatial eigenvalues, scaled so the
// largest component of r is 1, ordered by decreasing real part.
CMat subspace_basis(const CMat& A, bool unstable, CVec& mu_sel, bool& degenerate) {
  const EigenPairs ep = eig_dense(A);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < ep.values.size(); ++i)
    if ((ep.values(i).real() > 0.0) == unstable) idx.push_back(i);
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return ep.values(a).real() > ep.values(b).real();
  });
  CMat V(A.rows(), static_cast<Eigen::Index>(idx.size()));
  mu_sel.resize(static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) {
    CVec v = ep.vectors.col(idx[j]);
    Eigen::Index imax;
    v.head(A.rows() / 2).cwiseAbs().maxCoeff(&imax);
    V.col(j) = v / v(imax);
    mu_sel(j) = ep.values(idx[j]);
  }
  for (Eigen::Index i = 0; i < ep.values.size(); ++i)
    for (Eigen::Index j = i + 1; j < ep.values.size(); ++j)
      if (std::abs(ep.values(i) - ep.values(j)) < 1e-6 * (1.0 + std::abs(ep.values(i)))) degenerate = true;
  return V;
}

struct ProfileCoefficients {
  const ModelSpec& m;
  WaveProfile p;

  CMat at(double x, cplx lambda) const {
    const Vec u = hermite_at(p.u, p.ux, x);
    const Vec ux = hermite_at(p.ux, *p.uxx, x);
    const Vec uxx = p.uxx->at(x);
    return firstorder_matrix(linearize_at(m, u, ux, uxx, p.speed), lambda);
  }
};

// Carries span(Y) from x0 to x1 with fourth-order Magnus steps and QR; returns
// the accumulated log of the removed triangular factors.
cplx transport(const ProfileCoefficients& pc, CMat& Y, double x0, double x1, double step, cplx lambda) {
  cplx logr(0.0, 0.0);
  if (x0 == x1) return logr;
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(x1 - x0) / step)));
  const double h = (x1 - x0) / n;
  const double off = std::sqrt(3.0) / 6.0;
  const double c2 = std::sqrt(3.0) / 12.0 * h * h;
  for (int s = 0; s < n; ++s) {
    const double xs = x0 + s * h;
    const CMat A1 = pc.at(xs + (0.5 - off) * h, lambda);
    const CMat A2 = pc.at(xs + (0.5 + off) * h, lambda);
    const CMat Om = (0.5 * h) * (A1 + A2) + c2 * (A2 * A1 - A1 * A2);
    Y = Om.exp() * Y;
    Eigen::HouseholderQR<CMat> qr(Y);
    const CMat R = qr.matrixQR().topRows(Y.cols()).triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < R.rows(); ++i) logr += std::log(R(i, i));
    Y = qr.householderQ() * CMat::Identity(Y.rows(), Y.cols());
  }
  return logr;
}

}  // namespace

CMat AsymptoticPencil::at(cplx lambda) const { return firstorder_matrix(coeffs, lambda); }

CVec AsymptoticPencil::spatial_eigenvalues(cplx lambda) const { return eigvals_dense(at(lambda)); }

AsymptoticPencil asymptotic_pencil(const ModelSpec& m, const Vec& state, double c, Side side) {
  if (!check_parabolic(m, state)) throw ParabolicityError("asymptotic state is not parabolic");
  const Vec z = Vec::Zero(state.size());
  return {side, state, linearize_at(m, state, z, z, c)};
}

EssentialBoundary essential_boundary(const ModelSpec& m, const Vec& u_minus, const Vec& u_plus, double c,
                                     const std::vector<double>& kappa_grid) {
  if (!check_parabolic(m, u_minus) || !check_parabolic(m, u_plus)) {
    throw ParabolicityError("essential_boundary: asymptotic state is not parabolic");
  }
  EssentialBoundary eb;
  eb.pulse = (u_minus - u_plus).lpNorm<Eigen::Infinity>() <= 1e-12;
  eb.minus = spectrum_homogeneous(m, u_minus, c, kappa_grid);
  eb.plus = eb.pulse ? eb.minus : spectrum_homogeneous(m, u_plus, c, kappa_grid);
  return eb;
}

MorseFredholm morse_fredholm(const AsymptoticPencil& minus, const AsymptoticPencil& plus, cplx lambda,
                             double axis_tol) {
  MorseFredholm r;
  bool amb_m = false, amb_p = false;
  r.i_minus = count_right(minus.spatial_eigenvalues(lambda), axis_tol, amb_m);
  r.i_plus = count_right(plus.spatial_eigenvalues(lambda), axis_tol, amb_p);
  r.hyperbolic_minus = !amb_m;
  r.hyperbolic_plus = !amb_p;
  r.boundary_ambiguous = amb_m || amb_p;
  r.fredholm = r.hyperbolic_minus && r.hyperbolic_plus;
  if (r.fredholm) r.index = r.i_plus - r.i_minus;
  return r;
}

EvansResult evans_function(const ModelSpec& m, const WaveProfile& profile, cplx lambda, const EvansOptions& opts) {
  profile.u.validate();
  const WaveProfile p = with_second_derivative(profile);
  const int npts = p.u.size();
  const int N = p.n_species();
  if (npts < 2) throw InvalidArgument("evans_function: profile needs at least two nodes");
  const Vec um = opts.u_minus.value_or(Vec(p.u.values.col(0)));
  const Vec up = opts.u_plus.value_or(Vec(p.u.values.col(npts - 1)));
  if (!opts.u_minus || !opts.u_plus) {
    const double scale = std::max(p.ux.values.cwiseAbs().maxCoeff(), 1e-300);
    const double tail = std::max(p.ux.values.col(0).cwiseAbs().maxCoeff(),
                                 p.ux.values.col(npts - 1).cwiseAbs().maxCoeff());
    if (tail > 1e-6 * scale) {
      throw InvalidArgument("evans_function: profile has not decayed at the window ends; enlarge the window");
    }
  }

  const AsymptoticPencil Pm = asymptotic_pencil(m, um, p.speed, Side::minus);
  const AsymptoticPencil Pp = asymptotic_pencil(m, up, p.speed, Side::plus);
  const MorseFredholm mf = morse_fredholm(Pm, Pp, lambda);
  if (!mf.fredholm) throw InvalidArgument("evans_function: lambda lies on the essential spectrum boundary (not Fredholm)");
  if (mf.index != 0 || mf.i_minus + (2 * N - mf.i_plus) != 2 * N) {
    throw InvalidArgument("evans_function: Fredholm index " + std::to_string(mf.index) +
                          " is nonzero; subspace dimensions do not match");
  }

  // window: decayed region next to each end, matching point at max |u_x|
  auto dist = [&](int i, const Vec& lim) { return (p.u.values.col(i) - lim).lpNorm<Eigen::Infinity>(); };
  if (dist(0, um) > opts.decay_tol || dist(npts - 1, up) > opts.decay_tol) {
    throw InvalidArgument("evans_function: profile ends are not within decay_tol of the limits");
  }
  int il = 0;
  while (il + 1 < npts && dist(il + 1, um) <= opts.decay_tol) ++il;
  int ir = npts - 1;
  while (ir - 1 >= 0 && dist(ir - 1, up) <= opts.decay_tol) --ir;
  Eigen::Index imid;
  p.ux.values.colwise().lpNorm<Eigen::Infinity>().maxCoeff(&imid);
  const double xm = p.u.nodes[imid];
  const double xl = std::min(p.u.nodes[il], xm);
  const double xr = std::max(p.u.nodes[ir], xm);

  EvansResult res;
  res.x_match = xm;
  res.dim_unstable = mf.i_minus;
  CVec mu_u, mu_s;
  CMat Ym = subspace_basis(Pm.at(lambda), true, mu_u, res.basis_degenerate);
  CMat Yp = subspace_basis(Pp.at(lambda), false, mu_s, res.basis_degenerate);
  const ProfileCoefficients pc{m, p};
  cplx logr = transport(pc, Ym, xl, xm, opts.step, lambda) + transport(pc, Yp, xr, xm, opts.step, lambda);
  // remove the asymptotic exponential growth
  logr -= mu_u.sum() * (xm - xl) + mu_s.sum() * (xm - xr);
  CMat F(2 * N, 2 * N);
  F << Ym, Yp;
  const cplx d = F.determinant();
  res.value = d * std::exp(logr);
  return res;
}

std::vector<cplx> circle_contour(cplx center, double radius, int n) {
  if (n < 3 || !(radius > 0.0)) throw InvalidArgument("circle_contour: need n >= 3 and radius > 0");
  std::vector<cplx> z(n);
  for (int k = 0; k < n; ++k) z[k] = center + std::polar(radius, 2.0 * kPi * k / n);
  return z;
}

int winding_number(const std::vector<cplx>& values) {
  if (values.size() < 3) throw InvalidArgument("winding_number: need at least three samples");
  double total = 0.0;
  for (size_t k = 0; k < values.size(); ++k) {
    const cplx a = values[k], b = values[(k + 1) % values.size()];
    if (a == 0.0 || b == 0.0) throw InvalidArgument("winding_number: function vanishes on the contour");
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

FrontFixture nagumo_front_fixture(double a, double X, int nodes) {
  if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("nagumo_front_fixture: need 0 < a < 1");
  if (nodes < 3 || !(X > 0.0)) throw InvalidArgument("nagumo_front_fixture: bad window");
  ScalarCoefficients k;
  k.r1 = -a;
  k.r2 = 1.0 + a;
  k.r3 = -1.0;
  FrontFixture f;
  f.model = make_scalar(k);
  const double s = 1.0 / std::sqrt(2.0);
  WaveProfile& p = f.profile;
  p.kind = WaveKind::front;
  p.length = 2.0 * X;
  p.speed = std::sqrt(2.0) * (0.5 - a);
  p.u.nodes.resize(nodes);
  p.u.values.resize(1, nodes);
  p.ux = p.u;
  MeshFunction uxx = p.u;
  for (int i = 0; i < nodes; ++i) {
    const double x = -X + 2.0 * X * i / (nodes - 1);
    const double U = 1.0 / (1.0 + std::exp(s * x));
    p.u.nodes[i] = p.ux.nodes[i] = uxx.nodes[i] = x;
    p.u.values(0, i) = U;
    p.ux.values(0, i) = -s * U * (1.0 - U);
    uxx.values(0, i) = s * s * U * (1.0 - U) * (1.0 - 2.0 * U);
  }
  p.uxx = uxx;
  p.params = f.model.params;
  return f;
}

}  // namespace wavespec
