#include "wavespec/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

#include "wavespec/dispersion.hpp"
#include "wavespec/errors.hpp"
#include "wavespec/fourier.hpp"
#include "wavespec/linalg.hpp"

namespace wavespec {

namespace {

constexpr double kPi = 3.14159265358979323846;

using FlatMap = Eigen::Map<Vec>;
using ConstFlatMap = Eigen::Map<const Vec>;

Mat rhs_unchecked(const ModelSpec& m, double c, const Mat& u, double length) {
  const int N = static_cast<int>(u.rows());
  const int M = static_cast<int>(u.cols());
  const double h = length / M;
  Mat flux(N, M);  // flux(:, i) at the face between i and i + 1
  for (int i = 0; i < M; ++i) {
    const int ip = (i + 1) % M;
    flux.col(i) = m.diffusion(0.5 * (u.col(i) + u.col(ip))) * (u.col(ip) - u.col(i));
  }
  Mat out(N, M);
  for (int i = 0; i < M; ++i) {
    const int ip = (i + 1) % M, im = (i + M - 1) % M;
    const Vec p = (u.col(ip) - u.col(im)) / (2.0 * h);
    out.col(i) = (flux.col(i) - flux.col(im)) / (h * h) + c * p + m.reaction(u.col(i), p);
  }
  return out;
}

void check_grid(const Mat& u, double length) {
  if (u.cols() < 3) throw InvalidArgument("simulation grid needs at least 3 points");
  if (!(length > 0.0)) throw InvalidArgument("simulation domain length must be positive");
}

void check_parabolic_field(const ModelSpec& m, const Mat& u, double length) {
  for (int i = 0; i < u.cols(); ++i) {
    if (!check_parabolic(m, u.col(i))) {
      throw ParabolicityError("parabolicity lost at x = " + std::to_string(i * length / u.cols()),
                              i * length / u.cols());
    }
  }
}

double l2(const Mat& u, double h) { return std::sqrt(h * u.squaredNorm()); }

}  // namespace

Mat semidiscrete_rhs(const ModelSpec& m, double c, const Mat& u, double length) {
  check_grid(u, length);
  check_parabolic_field(m, u, length);
  return rhs_unchecked(m, c, u, length);
}

SpMat semidiscrete_jacobian(const ModelSpec& m, double c, const Mat& u, double length) {
  check_grid(u, length);
  const int N = static_cast<int>(u.rows());
  const int M = static_cast<int>(u.cols());
  const double h = length / M;
  std::vector<Triplet> tr;
  tr.reserve(static_cast<size_t>(7) * M * N * N);
  auto add = [&](int row_node, int col_node, const Mat& B) {
    for (int r = 0; r < N; ++r)
      for (int s = 0; s < N; ++s)
        if (B(r, s) != 0.0) tr.emplace_back(row_node * N + r, col_node * N + s, B(r, s));
  };
  Vec e = Vec::Zero(N);
  for (int i = 0; i < M; ++i) {
    const int ip = (i + 1) % M;
    const Vec mid = 0.5 * (u.col(i) + u.col(ip));
    const Vec d = u.col(ip) - u.col(i);
    const Mat a = m.diffusion(mid);
    Mat G(N, N);
    for (int k = 0; k < N; ++k) {
      e.setZero();
      e(k) = 1.0;
      G.col(k) = m.diffusion_jacobian(mid, e) * d;
    }
    const Mat Jl = (-a + 0.5 * G) / (h * h);
    const Mat Jr = (a + 0.5 * G) / (h * h);
    add(i, i, Jl);
    add(i, ip, Jr);
    add(ip, i, -Jl);
    add(ip, ip, -Jr);
  }
  for (int i = 0; i < M; ++i) {
    const int ip = (i + 1) % M, im = (i + M - 1) % M;
    const Vec p = (u.col(ip) - u.col(im)) / (2.0 * h);
    add(i, i, m.reaction_du(u.col(i), p));
    const Mat adv = (c * Mat::Identity(N, N) + m.reaction_dp(u.col(i), p)) / (2.0 * h);
    add(i, ip, adv);
    add(i, im, -adv);
  }
  SpMat J(N * M, N * M);
  J.setFromTriplets(tr.begin(), tr.end());
  return J;
}

struct Integrator::Cache {
  Eigen::SparseLU<SpMat> lu;
  double k = -1.0;
  bool valid = false;
};

Integrator::Integrator(ModelSpec m, SimOptions opts)
    : m_(std::move(m)), opts_(opts), cache_(std::make_unique<Cache>()) {}
Integrator::~Integrator() = default;
Integrator::Integrator(Integrator&&) noexcept = default;
Integrator& Integrator::operator=(Integrator&&) noexcept = default;

bool Integrator::implicit_solve(const SimState& s, double k, const Mat& b, Mat& u, int& iters) {
  const int n = static_cast<int>(u.size());
  auto refactor = [&]() {
    SpMat A = -k * semidiscrete_jacobian(m_, s.c, u, s.length);
    for (int i = 0; i < n; ++i) A.coeffRef(i, i) += 1.0;
    A.makeCompressed();
    cache_->lu.compute(A);
    ++factorizations_;
    cache_->k = k;
    cache_->valid = cache_->lu.info() == Eigen::Success;
    return cache_->valid;
  };
  bool fresh = false;
  if (!cache_->valid || cache_->k != k) {
    if (!refactor()) return false;
    fresh = true;
  }
  const Mat u_start = u;
  for (int pass = 0; pass < 2; ++pass) {
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts_.newton_max; ++it) {
      ++iters;
      const Mat r = u - k * rhs_unchecked(m_, s.c, u, s.length) - b;
      const Vec du = cache_->lu.solve(-ConstFlatMap(r.data(), n));
      if (!du.allFinite()) break;
      FlatMap(u.data(), n) += du;
      const double nd = du.lpNorm<Eigen::Infinity>();
      if (nd <= opts_.newton_tol * (1.0 + u.lpNorm<Eigen::Infinity>())) return true;
      if (it > 0 && nd > 0.5 * prev && !fresh) break;
      prev = nd;
    }
    if (fresh) return false;
    u = u_start;
    if (!refactor()) return false;
    fresh = true;
  }
  return false;
}

bool Integrator::try_step(SimState& s, double dt, Mat& out, int& iters) {
  iters = 0;
  if (opts_.scheme == TimeScheme::implicit_euler) {
    out = s.u;
    return implicit_solve(s, dt, s.u, out, iters);
  }
  const double g = 2.0 - std::sqrt(2.0);
  const double k = 0.5 * g * dt;
  const Mat b1 = s.u + k * rhs_unchecked(m_, s.c, s.u, s.length);
  Mat ustar = s.u;
  if (!implicit_solve(s, k, b1, ustar, iters)) return false;
  const double w = 1.0 / (g * (2.0 - g));
  const Mat b2 = w * ustar - w * (1.0 - g) * (1.0 - g) * s.u;
  out = ustar;
  return implicit_solve(s, k, b2, out, iters);
}

void Integrator::check_positive(const SimState& s) const {
  const int k = opts_.positive_species;
  if (k < 0) return;
  Eigen::Index i;
  const double mn = s.u.row(k).minCoeff(&i);
  if (!(mn > 0.0)) {
    throw PositivityError("species " + std::to_string(k) + " reached " + std::to_string(mn) + " at t = " +
                              std::to_string(s.t) + ", x = " + std::to_string(i * s.h()),
                          s.t, i * s.h());
  }
}

void Integrator::step(SimState& s, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
  check_grid(s.u, s.length);
  const double t_end = s.t + dt;
  double h = dt;
  while (s.t < t_end - 1e-14 * std::max(1.0, std::abs(t_end))) {
    h = std::min(h, t_end - s.t);
    Mat out;
    int iters = 0;
    if (try_step(s, h, out, iters)) {
      s.u = std::move(out);
      s.t = (h == t_end - s.t) ? t_end : s.t + h;
      ++steps_;
      check_positive(s);
      check_parabolic_field(m_, s.u, s.length);
    } else {
      h *= 0.5;
      if (h < opts_.dt_min) {
        throw StiffnessError("Newton failed after reducing dt below " + std::to_string(opts_.dt_min) +
                             " at t = " + std::to_string(s.t));
      }
    }
  }
  s.t = t_end;
}

void Integrator::advance(SimState& s, double t_end, const std::function<void(const SimState&)>& monitor) {
  check_grid(s.u, s.length);
  const int order = opts_.scheme == TimeScheme::implicit_euler ? 1 : 2;
  while (s.t < t_end - 1e-12 * std::max(1.0, std::abs(t_end))) {
    const double h = std::min(s.dt, t_end - s.t);
    Mat out;
    int iters = 0;
    bool ok = try_step(s, h, out, iters);
    double fac = 1.0;
    if (ok && opts_.lte_tol > 0.0) {
      SimState half = s;
      Mat mid, fine;
      int i2 = 0;
      ok = try_step(half, 0.5 * h, mid, i2);
      if (ok) {
        half.u = mid;
        half.t += 0.5 * h;
        ok = try_step(half, 0.5 * h, fine, i2);
      }
      if (ok) {
        const double err = (fine - out).lpNorm<Eigen::Infinity>() / ((1 << order) - 1) /
                           (1.0 + fine.lpNorm<Eigen::Infinity>());
        fac = std::clamp(0.9 * std::pow(opts_.lte_tol / std::max(err, 1e-300), 1.0 / (order + 1)), 0.2, 2.0);
        if (err > opts_.lte_tol) {
          s.dt = std::max(h * fac, opts_.dt_min);
          if (h <= opts_.dt_min) throw StiffnessError("local error control: dt underflow at t = " + std::to_string(s.t));
          continue;
        }
        out = fine;
      }
    }
    if (!ok) {
      s.dt = 0.5 * h;
      if (s.dt < opts_.dt_min) {
        throw StiffnessError("Newton failed after reducing dt below " + std::to_string(opts_.dt_min) +
                             " at t = " + std::to_string(s.t));
      }
      continue;
    }
    s.u = std::move(out);
    s.t += h;
    ++steps_;
    check_positive(s);
    check_parabolic_field(m_, s.u, s.length);
    if (opts_.adaptive) {
      double grow = opts_.lte_tol > 0.0 ? fac : (iters <= 3 * order ? 1.25 : (iters > 6 * order ? 0.7 : 1.0));
      if (h < s.dt) grow = 1.0;  // last partial step
      s.dt = std::clamp(s.dt * grow, opts_.dt_min, opts_.dt_max);
    }
    if (monitor) monitor(s);
  }
}

SimState step(const ModelSpec& m, const SimState& s, double dt, const SimOptions& opts) {
  Integrator integ(m, opts);
  SimState out = s;
  integ.step(out, dt);
  return out;
}

DiscreteWave discrete_wavetrain(const ModelSpec& m, const WaveProfile& profile, int M, double tol) {
  if (M < 8) throw InvalidArgument("discrete_wavetrain: need at least 8 points");
  if (!profile.u.periodic) throw InvalidArgument("discrete_wavetrain: profile must be periodic");
  const int N = profile.n_species();
  const double L = profile.length;
  const double h = L / M;
  const double x0 = profile.u.nodes.front();
  Mat U(N, M), Ux(N, M);
  for (int i = 0; i < M; ++i) {
    U.col(i) = hermite_at(profile.u, profile.ux, x0 + i * h);
    Ux.col(i) = profile.ux.at(x0 + i * h);
  }
  const Mat U0 = U;
  double c = profile.speed;
  const int n = N * M;
  std::vector<double> hist;
  for (int it = 0; it < 40; ++it) {
    const Mat r = rhs_unchecked(m, c, U, L);
    Vec R(n + 1);
    R.head(n) = ConstFlatMap(r.data(), n);
    R(n) = h * (Ux.cwiseProduct(U - U0)).sum();
    const SpMat J = semidiscrete_jacobian(m, c, U, L);
    std::vector<Triplet> tr;
    tr.reserve(J.nonZeros() + 2 * n);
    for (int k = 0; k < J.outerSize(); ++k)
      for (SpMat::InnerIterator itj(J, k); itj; ++itj) tr.emplace_back(itj.row(), itj.col(), itj.value());
    for (int i = 0; i < M; ++i) {
      const Vec p = (U.col((i + 1) % M) - U.col((i + M - 1) % M)) / (2.0 * h);
      for (int r2 = 0; r2 < N; ++r2) {
        tr.emplace_back(i * N + r2, n, p(r2));
        tr.emplace_back(n, i * N + r2, h * Ux(r2, i));
      }
    }
    SpMat B(n + 1, n + 1);
    B.setFromTriplets(tr.begin(), tr.end());
    Eigen::SparseLU<SpMat> lu(B);
    if (lu.info() != Eigen::Success) throw ConvergenceError("discrete_wavetrain: singular Jacobian", hist);
    const Vec d = lu.solve(-R);
    FlatMap(U.data(), n) += d.head(n);
    c += d(n);
    hist.push_back(d.lpNorm<Eigen::Infinity>());
    if (!d.allFinite()) break;
    if (hist.back() <= tol * (1.0 + U.lpNorm<Eigen::Infinity>())) return {U, L, c};
  }
  throw ConvergenceError("discrete_wavetrain: Newton did not converge", hist);
}

GrowthSetup homogeneous_setup(const ModelSpec& m, const Vec& ustar, double kappa, double c, int periods,
                              int points_per_period) {
  if (!(kappa > 0.0) || periods < 1 || points_per_period < 4) {
    throw InvalidArgument("homogeneous_setup: need kappa > 0, periods >= 1, points_per_period >= 4");
  }
  const int N = static_cast<int>(ustar.size());
  const int M = periods * points_per_period;
  GrowthSetup g;
  g.length = periods * 2.0 * kPi / kappa;
  g.c = c;
  g.base = ustar.replicate(1, M);
  g.base_period_points = 1;
  const EigenPairs ep = eig_dense(dispersion_matrix(m, ustar, c, kappa));
  Eigen::Index best;
  ep.values.real().maxCoeff(&best);
  g.predicted = ep.values(best);
  const CVec phi = ep.vectors.col(best);
  const double h = g.length / M;
  g.mode.resize(N, M);
  for (int i = 0; i < M; ++i) g.mode.col(i) = (phi * std::polar(1.0, kappa * i * h)).real();
  g.gamma = kappa;
  return g;
}

GrowthSetup wavetrain_setup(const ModelSpec& m, const WavetrainSpectrum& ws, int periods, int j,
                            int points_per_period) {
  if (!ws.has_profile()) throw InvalidArgument("wavetrain_setup: spectrum has no profile");
  if (periods < 1 || points_per_period < 8) throw InvalidArgument("wavetrain_setup: bad grid");
  const WaveProfile& prof = ws.profile();
  const int N = prof.n_species();
  const double L = ws.period();
  const DiscreteWave dw = discrete_wavetrain(m, prof, points_per_period);
  const int M = periods * points_per_period;
  GrowthSetup g;
  g.length = periods * L;
  g.c = dw.c;
  g.base = dw.u.replicate(1, periods);
  g.base_period_points = points_per_period;
  g.gamma = 2.0 * kPi * j / periods;

  const CVec ev = eigvals_dense(ws.bloch_matrix(g.gamma));
  Eigen::Index best;
  ev.real().maxCoeff(&best);
  const BlochPoint bp = bloch_eigenpair_near(ws, g.gamma, ev(best));
  g.predicted = bp.lambda;
  const int Mg = ws.grid_points();
  Mat parts(2 * N, Mg);
  for (int r = 0; r < N; ++r) {
    for (int k = 0; k < Mg; ++k) {
      parts(r, k) = bp.eigenfunction(r * Mg + k).real();
      parts(N + r, k) = bp.eigenfunction(r * Mg + k).imag();
    }
  }
  const TrigInterpolant psi(parts, L);
  const double kap = g.gamma / L;
  const double h = g.length / M;
  g.mode.resize(N, M);
  for (int i = 0; i < M; ++i) {
    const double x = i * h;
    const Vec v = psi.eval(std::fmod(x, L));
    const cplx ph = std::polar(1.0, kap * x);
    for (int r = 0; r < N; ++r) g.mode(r, i) = (cplx(v(r), v(N + r)) * ph).real();
  }
  return g;
}

double orbital_distance(const Mat& u, const Mat& base, int base_period_points, double h) {
  const int M = static_cast<int>(u.cols());
  const int P = std::max(1, base_period_points);
  if (base.cols() != M || M % P != 0) throw InvalidArgument("orbital_distance: grid mismatch");
  std::vector<double> d2(P);
  for (int s = 0; s < P; ++s) {
    double acc = 0.0;
    for (int i = 0; i < M; ++i) acc += (u.col(i) - base.col((i + s) % M)).squaredNorm();
    d2[s] = h * acc;
  }
  const int s = static_cast<int>(std::min_element(d2.begin(), d2.end()) - d2.begin());
  double best = d2[s];
  if (P >= 3) {
    const double dm = d2[(s + P - 1) % P], dp = d2[(s + 1) % P];
    const double curv = dp - 2.0 * best + dm;
    if (curv > 0.0) best -= (dp - dm) * (dp - dm) / (8.0 * curv);
  }
  return std::sqrt(std::max(best, 0.0));
}

GrowthResult growth_experiment(const ModelSpec& m, const GrowthSetup& setup, const GrowthOptions& opts) {
  if (!(opts.epsilon > 0.0) || !(opts.T > 0.0) || !(opts.dt > 0.0) || !(opts.record_every >= opts.dt)) {
    throw InvalidArgument("growth_experiment: need epsilon, T, dt > 0 and record_every >= dt");
  }
  const int M = static_cast<int>(setup.base.cols());
  const double h = setup.length / M;
  const double base_norm = l2(setup.base, h);
  const double mode_norm = l2(setup.mode, h);
  if (!(mode_norm > 0.0)) throw InvalidArgument("growth_experiment: zero mode");

  SimState s;
  s.length = setup.length;
  s.c = setup.c;
  s.dt = opts.dt;
  s.u = setup.base + (opts.epsilon * base_norm / mode_norm) * setup.mode;
  SimOptions so;
  so.scheme = opts.scheme;
  so.adaptive = false;
  Integrator integ(m, so);

  GrowthResult res;
  auto record = [&]() {
    const double q = orbital_distance(s.u, setup.base, setup.base_period_points, h);
    res.history.t.push_back(s.t);
    res.history.q.push_back(q);
    res.history.min_first.push_back(s.min_species(0));
    if (opts.on_record) opts.on_record(s);
    return q;
  };
  res.q0 = record();
  const double top = opts.window_top * base_norm;
  const int per_record = std::max(1, static_cast<int>(std::lround(opts.record_every / opts.dt)));
  try {
    while (s.t < opts.T - 1e-9) {
      for (int k = 0; k < per_record && s.t < opts.T - 1e-9; ++k) integ.step(s, std::min(opts.dt, opts.T - s.t));
      const double q = record();
      if (!std::isfinite(q)) break;
      if (opts.stop_after_window && q > top) break;
      if (opts.stop_ratio > 0.0 && q > opts.stop_ratio * res.q0) break;
    }
  } catch (const PositivityError& e) {
    res.diagnostic = std::string("positivity: ") + e.what();
  } catch (const StiffnessError& e) {
    res.diagnostic = std::string("stiff-failure: ") + e.what();
  }
  res.min_first = *std::min_element(res.history.min_first.begin(), res.history.min_first.end());
  for (double q : res.history.q) res.max_ratio = std::max(res.max_ratio, q / res.q0);

  // log q against t on the window [2 q0, top]
  double st = 0, sq = 0, stt = 0, stq = 0;
  int cnt = 0;
  res.t_lo = std::numeric_limits<double>::infinity();
  res.t_hi = -res.t_lo;
  for (size_t i = 0; i < res.history.t.size(); ++i) {
    const double q = res.history.q[i];
    if (!(q >= 2.0 * res.q0 && q <= top)) continue;
    const double t = res.history.t[i], lq = std::log(q);
    st += t;
    sq += lq;
    stt += t * t;
    stq += t * lq;
    ++cnt;
    res.t_lo = std::min(res.t_lo, t);
    res.t_hi = std::max(res.t_hi, t);
  }
  if (cnt >= 3 && res.diagnostic.empty()) {
    res.sigma = (cnt * stq - st * sq) / (cnt * stt - st * st);
    res.ok = true;
  } else if (res.diagnostic.empty()) {
    res.diagnostic = "no growth window: q stayed below 2 q0 or jumped past the window";
  }
  return res;
}

}  // namespace wavespec
