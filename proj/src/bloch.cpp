#include "wavespec/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <unsupported/Eigen/MatrixFunctions>

#include "wavespec/errors.hpp"
#include "wavespec/fourier.hpp"
#include "wavespec/linalg.hpp"

namespace wavespec {

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat inverse_alpha(const Mat& alpha) {
  Eigen::FullPivLU<Mat> lu(alpha);
  if (!lu.isInvertible()) throw ParabolicityError("firstorder_matrix: alpha is singular");
  return lu.inverse();
}

double wrap_pi(double a) { return a - 2.0 * kPi * std::round(a / (2.0 * kPi)); }

cplx log_det(const Eigen::PartialPivLU<CMat>& lu) {
  const CMat& U = lu.matrixLU();
  cplx s(0.0, 0.0);
  for (Eigen::Index i = 0; i < U.rows(); ++i) s += std::log(U(i, i));
  if (lu.permutationP().determinant() < 0) s += cplx(0.0, kPi);
  return {s.real(), wrap_pi(s.imag())};
}

// Linear interpolation of a periodic sampled field.
Mat interp(const std::vector<double>& x, const std::vector<Mat>& f, double period, double xq) {
  const size_t n = x.size();
  if (period > 0.0) {
    xq = x.front() + std::fmod(xq - x.front(), period);
    if (xq < x.front()) xq += period;
    if (xq >= x.back()) {
      const double span = x.front() + period - x.back();
      const double t = span > 0.0 ? (xq - x.back()) / span : 0.0;
      return (1.0 - t) * f.back() + t * f.front();
    }
  } else {
    xq = std::clamp(xq, x.front(), x.back());
  }
  auto it = std::upper_bound(x.begin(), x.end(), xq);
  size_t i = std::min(static_cast<size_t>(std::max<long>(it - x.begin() - 1, 0)), n - 2);
  const double t = (xq - x[i]) / (x[i + 1] - x[i]);
  return (1.0 - t) * f[i] + t * f[i + 1];
}

// Magnus generator at the two Gauss points of one step.
CMat first_order(const std::array<Mat, 6>& g, int k, cplx lambda) {
  const Mat& ai = g[3 * k];
  const Mat& ab = g[3 * k + 1];
  const Mat& ag = g[3 * k + 2];
  const int n = static_cast<int>(ai.rows());
  CMat A = CMat::Zero(2 * n, 2 * n);
  A.topRightCorner(n, n).setIdentity();
  A.bottomLeftCorner(n, n) = -ag.cast<cplx>() + lambda * ai.cast<cplx>();
  A.bottomRightCorner(n, n) = -ab.cast<cplx>();
  return A;
}

}  // namespace

CMat firstorder_matrix(const PointCoefficients& pc, cplx lambda) {
  const int n = static_cast<int>(pc.alpha.rows());
  const Mat ai = inverse_alpha(pc.alpha);
  CMat A = CMat::Zero(2 * n, 2 * n);
  A.topRightCorner(n, n).setIdentity();
  A.bottomLeftCorner(n, n) = -(ai * pc.gamma).cast<cplx>() + lambda * ai.cast<cplx>();
  A.bottomRightCorner(n, n) = -(ai * pc.beta).cast<cplx>();
  return A;
}

CMat firstorder_matrix(const LinearizationCoefficients& co, double x, cplx lambda) {
  if (co.x.size() < 2) throw InvalidArgument("firstorder_matrix: need at least two coefficient samples");
  if (co.period <= 0.0 && (x < co.x.front() || x > co.x.back())) {
    throw InvalidArgument("firstorder_matrix: x outside the coefficient mesh");
  }
  PointCoefficients pc{interp(co.x, co.alpha, co.period, x), interp(co.x, co.beta, co.period, x),
                       interp(co.x, co.gamma, co.period, x)};
  return firstorder_matrix(pc, lambda);
}

WavetrainSpectrum::WavetrainSpectrum(const ModelSpec& m, const WaveProfile& profile)
    : WavetrainSpectrum(m, profile, Options{}) {}

WavetrainSpectrum::WavetrainSpectrum(const ModelSpec& m, const WaveProfile& profile, Options opts) {
  if (!profile.u.periodic || !(profile.length > 0.0)) {
    throw InvalidArgument("WavetrainSpectrum: profile must be a periodic wavetrain");
  }
  if (opts.segments < 1) throw InvalidArgument("WavetrainSpectrum: segments must be positive");
  model_ = m;
  init_profile(m, profile, opts);
  segments_ = opts.segments;
  const int M = grid_points();
  int steps = opts.steps > 0 ? opts.steps : std::max(4096, 16 * M);
  steps = segments_ * ((steps + segments_ - 1) / segments_);
  build_steps(steps);
}

void WavetrainSpectrum::init_profile(const ModelSpec& m, const WaveProfile& profile, const Options& opts) {
  n_ = profile.n_species();
  L_ = profile.length;
  const double var = (profile.u.values.rowwise().maxCoeff() - profile.u.values.rowwise().minCoeff()).maxCoeff();
  const bool flat = profile.trivial || var < 1e-12;

  auto sample = [&](int M) {
    WaveProfile q = profile;
    Mat U(n_, M);
    const double x0 = profile.u.nodes.front();
    for (int j = 0; j < M; ++j) U.col(j) = hermite_at(profile.u, profile.ux, x0 + L_ * j / M);
    q.u = uniform_periodic(U, L_);
    q.ux = uniform_periodic(spectral_derivative(U, L_, 1), L_);
    q.uxx = uniform_periodic(spectral_derivative(U, L_, 2), L_);
    return q;
  };

  if (opts.M_grid > 0) {
    const int M = opts.M_grid % 2 == 0 ? opts.M_grid + 1 : opts.M_grid;
    profile_ = (opts.polish && !flat) ? polish_spectral(m, profile, M) : sample(M);
  } else if (flat || !opts.polish) {
    profile_ = sample(129);
  } else {
    for (int M : {129, 257, 513, 1025}) {
      profile_ = polish_spectral(m, profile, M);
      if (off_grid_residual(m, profile_) <= 1e-8) break;
    }
  }
  if (flat) profile_.trivial = true;
  has_profile_ = true;
  coeffs_ = linearization_coefficients(m, profile_);
  const int M = profile_.u.size();
  D_ = fourier_diff_matrix(M, L_);
  double tr = 0.0;
  for (int j = 0; j < M; ++j) tr -= (inverse_alpha(coeffs_.alpha[j]) * coeffs_.beta[j]).trace();
  trace_integral_ = tr * L_ / M;
}

WavetrainSpectrum::WavetrainSpectrum(const LinearizationCoefficients& co, int steps, int segments) {
  if (!(co.period > 0.0)) throw InvalidArgument("WavetrainSpectrum: coefficients must be periodic");
  if (co.x.size() < 2) throw InvalidArgument("WavetrainSpectrum: need at least two coefficient samples");
  if (segments < 1 || steps < segments) throw InvalidArgument("WavetrainSpectrum: bad step or segment count");
  coeffs_ = co;
  n_ = static_cast<int>(co.alpha.front().rows());
  L_ = co.period;
  segments_ = segments;
  // trapezoid over the periodic samples
  const size_t m = co.x.size();
  double tr = 0.0;
  for (size_t j = 0; j < m; ++j) {
    const double xl = j == 0 ? co.x.back() - L_ : co.x[j - 1];
    const double xr = j + 1 == m ? co.x.front() + L_ : co.x[j + 1];
    tr -= 0.5 * (xr - xl) * (inverse_alpha(co.alpha[j]) * co.beta[j]).trace();
  }
  trace_integral_ = tr;
  build_steps(segments_ * ((steps + segments_ - 1) / segments_));
}

void WavetrainSpectrum::build_steps(int steps) {
  steps_ = steps;
  gauss_.resize(steps);
  const double h = L_ / steps;
  const double x0 = coeffs_.x.front();
  const double off = std::sqrt(3.0) / 6.0;
  TrigInterpolant trig;
  if (has_profile_) trig = TrigInterpolant(profile_.u.values, L_);
  for (int k = 0; k < steps; ++k) {
    for (int q = 0; q < 2; ++q) {
      const double x = (k + 0.5 + (q == 0 ? -off : off)) * h;
      PointCoefficients pc;
      if (has_profile_) {
        const Mat d = trig.eval_with_derivatives(x);
        pc = linearize_at(model_, d.col(0), d.col(1), d.col(2), profile_.speed);
      } else {
        pc = {interp(coeffs_.x, coeffs_.alpha, L_, x0 + x), interp(coeffs_.x, coeffs_.beta, L_, x0 + x),
              interp(coeffs_.x, coeffs_.gamma, L_, x0 + x)};
      }
      const Mat ai = inverse_alpha(pc.alpha);
      gauss_[k][3 * q] = ai;
      gauss_[k][3 * q + 1] = ai * pc.beta;
      gauss_[k][3 * q + 2] = ai * pc.gamma;
    }
  }
}

CMat WavetrainSpectrum::segment_map(int k, cplx lambda) const {
  const int per = steps_ / segments_;
  const double h = L_ / steps_;
  const double c2 = std::sqrt(3.0) / 12.0 * h * h;
  CMat Phi = CMat::Identity(2 * n_, 2 * n_);
  for (int s = k * per; s < (k + 1) * per; ++s) {
    const CMat A1 = first_order(gauss_[s], 0, lambda);
    const CMat A2 = first_order(gauss_[s], 1, lambda);
    const CMat Om = (0.5 * h) * (A1 + A2) + c2 * (A2 * A1 - A1 * A2);
    Phi = Om.exp() * Phi;
  }
  return Phi;
}

MonodromyResult WavetrainSpectrum::monodromy(cplx lambda) const {
  MonodromyResult r;
  r.lambda = lambda;
  const int K = segments_;
  const int m = 2 * n_;
  r.segments.resize(K);
  r.Pi = CMat::Identity(m, m);
  cplx ld(0.0, 0.0);
  for (int k = 0; k < K; ++k) {
    r.segments[k] = segment_map(k, lambda);
    r.Pi = r.segments[k] * r.Pi;
    ld += log_det(Eigen::PartialPivLU<CMat>(r.segments[k]));
  }
  r.log_det_actual = {ld.real(), wrap_pi(ld.imag())};
  r.log_det_predicted = {trace_integral_, 0.0};

  // multipliers from the cyclic lift: zeta^K runs over the eigenvalues of Pi
  CMat C = CMat::Zero(m * K, m * K);
  for (int k = 0; k < K; ++k) C.block(((k + 1) % K) * m, k * m, m, m) = r.segments[k];
  const CVec zeta = eigvals_dense(C);
  std::vector<cplx> mu(zeta.size());
  for (Eigen::Index i = 0; i < zeta.size(); ++i) mu[i] = std::pow(zeta(i), K);
  std::vector<bool> used(mu.size(), false);
  std::vector<cplx> reps;
  auto rel = [](cplx a, cplx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); };
  for (size_t i = 0; i < mu.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::vector<std::pair<double, size_t>> d;
    for (size_t j = 0; j < mu.size(); ++j)
      if (!used[j]) d.emplace_back(rel(mu[i], mu[j]), j);
    std::sort(d.begin(), d.end());
    cplx sum = mu[i];
    for (int q = 0; q < K - 1 && q < static_cast<int>(d.size()); ++q) {
      used[d[q].second] = true;
      sum += mu[d[q].second];
    }
    reps.push_back(sum / static_cast<double>(K));
  }
  std::sort(reps.begin(), reps.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
  r.multipliers = Eigen::Map<CVec>(reps.data(), static_cast<Eigen::Index>(reps.size()));
  return r;
}

// det of the block matrix with rows  -Phi_k w_k + w_{k+1} (k < K) and
// e^{i gamma} w_1 - Phi_K w_K equals det(Pi - e^{i gamma} I) (even block size).
cplx WavetrainSpectrum::log_dispersion(cplx lambda, double gamma) const {
  const int K = segments_;
  const int m = 2 * n_;
  const CMat Im = CMat::Identity(m, m);
  CMat E = CMat::Zero(m * K, m * K);
  for (int k = 0; k < K; ++k) {
    const CMat Phi = segment_map(k, lambda);
    if (k + 1 < K) {
      E.block(k * m, k * m, m, m) = -Phi;
      E.block(k * m, (k + 1) * m, m, m) = Im;
    } else {
      E.block(k * m, 0, m, m) = std::polar(1.0, gamma) * Im;
      E.block(k * m, k * m, m, m) = -Phi;
    }
  }
  return log_det(Eigen::PartialPivLU<CMat>(E));
}

CMat WavetrainSpectrum::bloch_matrix(double gamma) const {
  if (!has_profile_) throw InvalidArgument("bloch_matrix: requires a profile-based spectrum");
  const int M = grid_points();
  const double kappa = gamma / L_;
  const CMat Dk = D_.cast<cplx>() + cplx(0.0, kappa) * CMat::Identity(M, M);
  const CMat Dk2 = Dk * Dk;
  CMat B(n_ * M, n_ * M);
  for (int r = 0; r < n_; ++r) {
    for (int s = 0; s < n_; ++s) {
      CVec a(M), b(M), g(M);
      for (int j = 0; j < M; ++j) {
        a(j) = coeffs_.alpha[j](r, s);
        b(j) = coeffs_.beta[j](r, s);
        g(j) = coeffs_.gamma[j](r, s);
      }
      CMat blk = a.asDiagonal() * Dk2 + b.asDiagonal() * Dk;
      blk.diagonal() += g;
      B.block(r * M, s * M, M, M) = blk;
    }
  }
  return B;
}

MonodromyResult monodromy(const ModelSpec& m, const WaveProfile& profile, cplx lambda) {
  return WavetrainSpectrum(m, profile).monodromy(lambda);
}

cplx wavetrain_dispersion(const WavetrainSpectrum& ws, cplx lambda, double gamma) {
  return ws.dispersion(lambda, gamma);
}

std::vector<SpectralCurve> bloch_matrix_spectrum(const WavetrainSpectrum& ws, const std::vector<double>& gamma_grid,
                                                 int n_modes, double jump_tol, std::vector<std::string>* warnings) {
  if (gamma_grid.empty()) throw InvalidArgument("bloch_matrix_spectrum: empty gamma grid");
  std::vector<double> kappa;
  std::vector<CVec> values;
  for (size_t i = 0; i < gamma_grid.size(); ++i) {
    const double g = gamma_grid[i];
    // spectra at gamma and 2 pi - gamma are conjugate
    int mirror = -1;
    for (size_t j = 0; j < kappa.size(); ++j) {
      const double gj = kappa[j] * ws.period();
      if (std::abs(wrap_pi(g + gj)) < 1e-12) mirror = static_cast<int>(j);
    }
    CVec ev;
    if (mirror >= 0) {
      ev = values[mirror].conjugate();
    } else {
      try {
        ev = eigvals_dense(ws.bloch_matrix(g));
      } catch (const ConvergenceError&) {
        if (warnings) warnings->push_back("eigensolver failed at gamma = " + std::to_string(g));
        continue;
      }
    }
    std::vector<cplx> v(ev.data(), ev.data() + ev.size());
    const int k = std::min<int>(n_modes, static_cast<int>(v.size()));
    std::partial_sort(v.begin(), v.begin() + k, v.end(), [](cplx a, cplx b) { return a.real() > b.real(); });
    kappa.push_back(g / ws.period());
    values.push_back(Eigen::Map<CVec>(v.data(), k));
  }
  auto curves = match_curves(kappa, values, {}, jump_tol, "bloch_matrix", warnings);
  return curves;
}

BlochPoint bloch_eigenpair_near(const WavetrainSpectrum& ws, double gamma, cplx shift) {
  const EigenPairs ep = eig_dense(ws.bloch_matrix(gamma));
  Eigen::Index best;
  (ep.values.array() - shift).abs().minCoeff(&best);
  BlochPoint bp;
  bp.gamma = gamma;
  bp.lambda = ep.values(best);
  bp.eigenfunction = ep.vectors.col(best);
  bp.method = "bloch_matrix";
  return bp;
}

SpectralCurve origin_curve_from_matrix(const std::vector<SpectralCurve>& curves) {
  const SpectralCurve* best = nullptr;
  for (const auto& c : curves) {
    if (c.kappa.empty() || std::abs(c.kappa.front()) > 1e-14) continue;
    if (!best || std::abs(c.lambda.front()) < std::abs(best->lambda.front())) best = &c;
  }
  if (!best) throw InvalidArgument("origin_curve_from_matrix: no curve starts at gamma = 0");
  return *best;
}

namespace {

// Newton on d(., gamma); the forward difference is taken on the ratio
// d(lambda + h) / d(lambda), which stays O(1) whatever the scale of d.
std::optional<cplx> dispersion_root(const WavetrainSpectrum& ws, double gamma, cplx lambda, double max_move) {
  const cplx start = lambda;
  for (int it = 0; it < 40; ++it) {
    const double h = 1e-7 * std::max(1.0, std::abs(lambda));
    const cplx l0 = ws.log_dispersion(lambda, gamma);
    const cplx l1 = ws.log_dispersion(lambda + h, gamma);
    const cplx ratio = std::exp(cplx(l1.real() - l0.real(), wrap_pi(l1.imag() - l0.imag())));
    if (ratio == 1.0) return std::nullopt;
    const cplx delta = -h / (ratio - 1.0);
    lambda += delta;
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()) || std::abs(lambda - start) > max_move) {
      return std::nullopt;
    }
    if (std::abs(delta) <= 1e-11 * std::max(1.0, std::abs(lambda))) return lambda;
  }
  return std::nullopt;
}

}  // namespace

SpectralCurve trace_origin_curve(const WavetrainSpectrum& ws, const std::vector<double>& gamma_grid,
                                 double jump_tol) {
  if (gamma_grid.empty() || gamma_grid.front() != 0.0) {
    throw InvalidArgument("trace_origin_curve: gamma grid must start at 0");
  }
  SpectralCurve out;
  out.method = "monodromy";
  out.kappa.push_back(0.0);
  out.lambda.push_back(0.0);
  double g_prev = 0.0, g_prev2 = 0.0;
  cplx l_prev = 0.0, l_prev2 = 0.0;
  bool have2 = false;
  for (size_t i = 1; i < gamma_grid.size(); ++i) {
    const double target = gamma_grid[i];
    // advance from g_prev to target, halving the substep on failure
    double g_cur = g_prev;
    double sub = target - g_prev;
    int halvings = 0;
    while (std::abs(target - g_cur) > 1e-15) {
      const double g_next = std::abs(sub) >= std::abs(target - g_cur) ? target : g_cur + sub;
      cplx pred = l_prev;
      if (have2 && g_prev != g_prev2) pred = l_prev + (l_prev - l_prev2) * ((g_next - g_prev) / (g_prev - g_prev2));
      auto root = dispersion_root(ws, g_next, pred, jump_tol);
      if (root && std::abs(*root - l_prev) <= jump_tol) {
        g_prev2 = g_prev;
        l_prev2 = l_prev;
        g_prev = g_cur = g_next;
        l_prev = *root;
        have2 = true;
        continue;
      }
      sub *= 0.5;
      if (++halvings > 12) {
        throw ConvergenceError("trace_origin_curve: lost the root near gamma = " + std::to_string(g_cur) +
                               "; use denser gamma steps");
      }
    }
    out.kappa.push_back(target / ws.period());
    out.lambda.push_back(l_prev);
  }
  return out;
}

std::vector<double> gamma_grid(int n, double gamma_max) {
  if (n < 2) throw InvalidArgument("gamma_grid: need at least two points");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = gamma_max * i / (n - 1);
  return g;
}

double sideband_curvature(const SpectralCurve& curve, double kappa_fit, int degree, bool check_fit) {
  if (degree != 2 && degree != 4) throw InvalidArgument("sideband_curvature: degree must be 2 or 4");
  std::vector<double> k, y;
  for (size_t i = 0; i < curve.kappa.size(); ++i) {
    const double kk = curve.kappa[i];
    if (std::abs(kk) > kappa_fit * (1.0 + 1e-12)) continue;
    k.push_back(kk);
    y.push_back(curve.lambda[i].real());
    if (std::abs(kk) > 1e-14) {
      k.push_back(-kk);
      y.push_back(curve.lambda[i].real());
    }
  }
  std::vector<double> distinct = k;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end(),
                             [](double a, double b) { return std::abs(a - b) <= 1e-14; }),
                 distinct.end());
  if (distinct.size() < 5) throw InvalidArgument("sideband_curvature: need at least 5 samples near kappa = 0");
  Mat X(k.size(), 3);
  Vec Y(k.size());
  for (size_t i = 0; i < k.size(); ++i) {
    X(i, 0) = 1.0;
    if (degree == 2) {
      X(i, 1) = k[i];
      X(i, 2) = k[i] * k[i];
    } else {
      X(i, 1) = k[i] * k[i];
      X(i, 2) = k[i] * k[i] * k[i] * k[i];
    }
    Y(i) = y[i];
  }
  const Vec a = X.colPivHouseholderQr().solve(Y);
  const double a2 = degree == 2 ? a(2) : a(1);
  if (check_fit) {
    const double resid = (X * a - Y).cwiseAbs().maxCoeff();
    if (resid > 0.1 * std::abs(a2) * kappa_fit * kappa_fit) {
      throw UnreliableFitError("sideband_curvature: fit residual exceeds 10% of the quadratic term; densify the gamma grid");
    }
  }
  return 2.0 * a2;
}

double sideband_curvature_at(const ModelSpec& m, const WaveProfile& guess, double L, int M_grid) {
  const WaveProfile p = solve_wavetrain(m, L, guess, SpeedMode::free);
  WavetrainSpectrum::Options o;
  o.M_grid = M_grid;
  const WavetrainSpectrum ws(m, p, o);
  const SpectralCurve c = trace_origin_curve(ws, gamma_grid(11, 0.5), 0.1);
  return sideband_curvature(c, 0.5 / L, 4, false);
}

SidebandScan detect_sideband(const std::function<double(double)>& curvature, double L_lo, double L_hi,
                             double tol) {
  if (!(L_lo < L_hi)) throw InvalidArgument("detect_sideband: bracket must be ordered");
  SidebandScan s;
  double a = L_lo, b = L_hi;
  double fa = curvature(a), fb = curvature(b);
  s.L = {a, b};
  s.curvature = {fa, fb};
  if (fa == 0.0) {
    s.L_star = a;
    return s;
  }
  if (fb == 0.0) {
    s.L_star = b;
    return s;
  }
  if ((fa > 0.0) == (fb > 0.0)) {
    throw BracketError("detect_sideband: curvature has the same sign at both ends of the bracket");
  }
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < 60; ++it) {
    double x = b - fb * (b - a) / (fb - fa);
    const double margin = 0.05 * (b - a);
    if (!(x > a + margin && x < b - margin)) x = 0.5 * (a + b);
    const double fx = curvature(x);
    ++s.iterations;
    s.L.push_back(x);
    s.curvature.push_back(fx);
    const bool done = std::abs(x - prev) <= tol || fx == 0.0;
    prev = x;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    if (done || b - a <= tol) break;
  }
  s.L_star = prev;
  return s;
}

SidebandScan detect_sideband(const ModelSpec& m, const WaveBranch& branch, double L_lo, double L_hi, double tol,
                             int M_grid) {
  if (branch.size() < 2) throw InvalidArgument("detect_sideband: branch has fewer than two points");
  auto guess_for = [&branch](double L) -> const WaveProfile& {
    for (size_t k = 0; k + 1 < branch.size(); ++k) {
      const double a = branch.L[k], b = branch.L[k + 1];
      if ((L - a) * (L - b) <= 0.0) return std::abs(L - a) <= std::abs(L - b) ? branch.profiles[k] : branch.profiles[k + 1];
    }
    size_t best = 0;
    for (size_t k = 1; k < branch.size(); ++k)
      if (std::abs(branch.L[k] - L) < std::abs(branch.L[best] - L)) best = k;
    return branch.profiles[best];
  };
  return detect_sideband([&](double L) { return sideband_curvature_at(m, guess_for(L), L, M_grid); }, L_lo, L_hi,
                         tol);
}

}  // namespace wavespec
