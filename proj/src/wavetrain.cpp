#include "wavespec/wavetrain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>

#include "wavespec/equilibria.hpp"
#include "wavespec/errors.hpp"
#include "wavespec/fourier.hpp"
#include "wavespec/linalg.hpp"

namespace wavespec {

Vec comoving_rhs(const ModelSpec& m, double c, const Vec& y) {
  const int n = m.n_species;
  if (y.size() != 2 * n) throw InvalidArgument("comoving_rhs: state must have 2N components");
  const Vec u = y.head(n);
  const Vec v = y.tail(n);
  if (!m.domain_predicate(u)) {
    throw ParabolicityError("comoving_rhs: profile left the parabolic region (first component " +
                            std::to_string(u(0)) + ")");
  }
  const Mat a = m.diffusion(u);
  const Vec rhs = -(m.diffusion_jacobian(u, v) * v) - c * v - m.reaction(u, v);
  Vec out(2 * n);
  out.head(n) = v;
  if (n == 1) {
    if (a(0, 0) == 0.0) throw ParabolicityError("comoving_rhs: a(u) is singular");
    out(1) = rhs(0) / a(0, 0);
    return out;
  }
  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible()) throw ParabolicityError("comoving_rhs: a(u) is singular");
  out.tail(n) = lu.solve(rhs);
  return out;
}

BvpOptions wavetrain_bvp_defaults() {
  BvpOptions o;
  o.tol = 1e-10;
  o.max_iter = 30;
  o.defect_tol = 1e-7;
  o.min_intervals = 64;
  o.max_intervals = 3000;
  o.max_adapt = 5;
  return o;
}

namespace {

constexpr int kC = 0, kL = 1, kTheta = 2;

// Model with one parameter exposed to the collocation layer, p = (c, L, theta).
class WaveSystem {
 public:
  WaveSystem(ModelSpec base, std::string key) : base_(std::move(base)), key_(std::move(key)) {
    if (key_ != "L" && !key_.empty()) base_.param(key_);
    cache_ = std::make_shared<Cache>();
  }
  int n() const { return base_.n_species; }
  const std::string& key() const { return key_; }
  bool model_param() const { return !key_.empty() && key_ != "L"; }
  double theta0() const { return model_param() ? base_.param(key_) : 0.0; }

  const ModelSpec& model(double theta) const {
    if (!model_param()) return base_;
    if (!cache_->valid || cache_->theta != theta) {
      cache_->model = with_param(base_, key_, theta);
      cache_->theta = theta;
      cache_->valid = true;
    }
    return cache_->model;
  }

  PeriodicBvpFunctions functions() const {
    PeriodicBvpFunctions f;
    f.dim = 2 * n();
    WaveSystem self = *this;
    f.rhs = [self](double, const Vec& y, const Vec& p) -> Vec {
      return p(kL) * comoving_rhs(self.model(p(kTheta)), p(kC), y);
    };
    return f;
  }

 private:
  struct Cache {
    bool valid = false;
    double theta = 0.0;
    ModelSpec model;
  };
  ModelSpec base_;
  std::string key_;
  std::shared_ptr<Cache> cache_;
};

bool is_uniform_periodic(const MeshFunction& f) { return f.periodic && f.uniform(1e-9); }

// y(x) = (u, u_x) of a profile at arbitrary x.
class ProfileSampler {
 public:
  explicit ProfileSampler(const WaveProfile& p) : p_(with_second_derivative(p)) {
    if (is_uniform_periodic(p_.u)) {
      Mat all(2 * p_.n_species(), p_.u.size());
      all << p_.u.values, p_.ux.values;
      trig_ = TrigInterpolant(all, p_.u.period);
      x0_ = p_.u.nodes.front();
      spectral_ = true;
    }
  }
  Vec operator()(double x) const {
    const int n = p_.n_species();
    Vec y(2 * n);
    if (spectral_) return trig_.eval(x - x0_);
    y.head(n) = hermite_at(p_.u, p_.ux, x);
    y.tail(n) = hermite_at(p_.ux, *p_.uxx, x);
    return y;
  }
  const WaveProfile& profile() const { return p_; }

 private:
  WaveProfile p_;
  TrigInterpolant trig_;
  double x0_ = 0.0;
  bool spectral_ = false;
};

std::vector<double> uniform_breakpoints(int M) {
  std::vector<double> b(M + 1);
  for (int i = 0; i <= M; ++i) b[i] = static_cast<double>(i) / M;
  return b;
}

Vec make_p(double c, double L, double theta) {
  Vec p(3);
  p << c, L, theta;
  return p;
}

WaveProfile to_profile(const WaveSystem& ws, const CollocationSystem& sys, const Vec& Y, const Vec& p) {
  const int n = ws.n();
  const int M = sys.intervals();
  const double L = p(kL);
  const ModelSpec& m = ws.model(p(kTheta));
  WaveProfile w;
  w.kind = WaveKind::wavetrain;
  w.length = L;
  w.speed = p(kC);
  w.params = m.params;
  MeshFunction u, ux, uxx;
  u.nodes.resize(M);
  u.values.resize(n, M);
  ux.values.resize(n, M);
  uxx.values.resize(n, M);
  for (int i = 0; i < M; ++i) {
    u.nodes[i] = L * sys.mesh()[i];
    const Vec y = Y.segment(sys.node_offset(i), 2 * n);
    u.values.col(i) = y.head(n);
    ux.values.col(i) = y.tail(n);
    uxx.values.col(i) = comoving_rhs(m, p(kC), y).tail(n);
  }
  u.periodic = true;
  u.period = L;
  ux.nodes = uxx.nodes = u.nodes;
  ux.periodic = uxx.periodic = true;
  ux.period = uxx.period = L;
  w.u = std::move(u);
  w.ux = std::move(ux);
  w.uxx = std::move(uxx);
  const Vec span = w.u.values.rowwise().maxCoeff() - w.u.values.rowwise().minCoeff();
  w.trivial = span.maxCoeff() < 1e-8;
  return w;
}

Vec discretize_profile(const CollocationSystem& sys, const WaveProfile& p) {
  ProfileSampler smp(p);
  const double x0 = p.u.nodes.front();
  const double L = p.length;
  return sys.discretize([&](double s) { return smp(x0 + s * L); });
}

struct Solved {
  std::shared_ptr<CollocationSystem> sys;
  Vec Y;
  Vec p;
};

// Collocation solve with mesh adaptation; the phase reference follows the iterate.
Solved adapt_solve(const WaveSystem& ws, const WaveProfile& guess, Vec p, const std::vector<int>& free,
                   bool phase, const BvpOptions& opts) {
  const PeriodicBvpFunctions f = ws.functions();
  const int M0 = std::clamp(guess.u.size(), opts.min_intervals, opts.max_intervals);
  auto sys = std::make_shared<CollocationSystem>(f, uniform_breakpoints(M0));
  Vec Y = discretize_profile(*sys, guess);
  if (phase) sys->set_phase_reference(Y, p);
  CollocationSolution sol = newton_collocation(*sys, Y, p, free, opts);
  for (int pass = 0; opts.adapt && pass < opts.max_adapt; ++pass) {
    const std::vector<double> d = sys->defects(sol.Y, sol.p);
    if (*std::max_element(d.begin(), d.end()) <= opts.defect_tol) break;
    const int m_new =
        sys->suggested_intervals(sol.Y, sol.p, opts.defect_tol, opts.min_intervals, opts.max_intervals);
    auto next = std::make_shared<CollocationSystem>(f, sys->equidistributed_mesh(sol.Y, sol.p, m_new));
    const Vec Yc = sol.Y, pc = sol.p;
    Vec Yn = next->discretize([&](double s) { return sys->sample(Yc, pc, s); });
    if (phase) next->set_phase_reference(Yn, pc);
    sol = newton_collocation(*next, Yn, pc, free, opts);
    sys = next;
    if (m_new >= opts.max_intervals) break;
  }
  return {sys, sol.Y, sol.p};
}

}  // namespace

WaveProfile solve_wavetrain(const ModelSpec& m, double L, const WaveProfile& guess, SpeedMode mode,
                            const BvpOptions& opts) {
  if (!(L > 0.0)) throw InvalidArgument("solve_wavetrain: wavelength must be positive");
  guess.u.validate();
  if (guess.ux.size() != guess.u.size()) throw InvalidArgument("solve_wavetrain: guess lacks u_x samples");
  if (!(guess.length > 0.0)) throw InvalidArgument("solve_wavetrain: guess has no wavelength");
  const WaveSystem ws(m, "L");
  const Vec span = guess.u.values.rowwise().maxCoeff() - guess.u.values.rowwise().minCoeff();
  const bool constant = span.maxCoeff() <= 1e-10 * (1.0 + guess.u.values.cwiseAbs().maxCoeff()) &&
                        guess.ux.values.cwiseAbs().maxCoeff() <= 1e-10;
  Vec p = make_p(guess.speed, L, 0.0);
  try {
    if (constant) {
      BvpOptions o = opts;
      o.adapt = false;
      WaveProfile g = guess;
      Solved s = adapt_solve(ws, g, p, {}, false, o);
      WaveProfile w = to_profile(ws, *s.sys, s.Y, s.p);
      w.trivial = true;
      return w;
    }
    const std::vector<int> free = mode == SpeedMode::free ? std::vector<int>{kC} : std::vector<int>{kL};
    Solved s = adapt_solve(ws, guess, p, free, true, opts);
    return to_profile(ws, *s.sys, s.Y, s.p);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string(e.what()) +
                               "; no wavetrain near the guess, continue from a Turing-Hopf onset instead",
                           e.history());
  }
}

double measure_max(const WaveProfile& p) { return p.u.values.row(0).maxCoeff(); }

double measure_l2(const WaveProfile& p) {
  const int M = p.u.size();
  double s = 0.0;
  for (int i = 0; i < M; ++i) {
    const double xl = p.u.nodes[i];
    const double xr = i + 1 < M ? p.u.nodes[i + 1] : p.u.nodes.front() + p.length;
    const int j = (i + 1) % M;
    s += 0.5 * (xr - xl) * (p.u.values.col(i).squaredNorm() + p.u.values.col(j).squaredNorm());
  }
  return std::sqrt(s / p.length);
}

namespace {

struct EngineStart {
  std::shared_ptr<CollocationSystem> sys;
  Vec z;       // (Y, c, parameter)
  Vec orient;  // same layout
  Vec p;       // full (c, L, theta) at the start
};

int slot_of(const WaveSystem& ws) { return ws.model_param() ? kTheta : kL; }

Vec full_p(const Vec& base, const Vec& z, int n, int slot) {
  Vec p = base;
  p(kC) = z(n);
  p(slot) = z(n + 1);
  return p;
}

Vec weights_for(int n) {
  Vec w = Vec::Constant(n + 2, 1.0 / n);
  w(n) = 1.0;
  w(n + 1) = 1.0;
  return w;
}

ContinuationProblem make_problem(const WaveSystem& ws, std::shared_ptr<CollocationSystem> sys, const Vec& pbase) {
  const int n = sys->size();
  const int slot = slot_of(ws);
  ContinuationProblem prob;
  prob.param_index = n + 1;
  prob.weights = weights_for(n);
  prob.residual = [sys, pbase, n, slot](const Vec& z) {
    return sys->residual(z.head(n), full_p(pbase, z, n, slot));
  };
  prob.jacobian = [sys, pbase, n, slot](const Vec& z) {
    return sys->jacobian(z.head(n), full_p(pbase, z, n, slot), {kC, slot});
  };
  prob.factor = [sys, pbase, n, slot](const Vec& z, const Vec& row) -> std::function<Vec(const Vec&)> {
    auto lu = std::make_shared<BorderedSolver>(sys->structured_jacobian(z.head(n), full_p(pbase, z, n, slot), {kC, slot}),
                                               Mat(row.transpose()));
    if (!lu->ok()) return {};
    return [lu](const Vec& b) { return lu->solve(b); };
  };
  prob.accept = [sys, pbase, n, slot](const Vec& z) {
    sys->set_phase_reference(z.head(n), full_p(pbase, z, n, slot));
  };
  prob.measure = [sys, n](const Vec& z) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < sys->intervals(); ++i) mx = std::max(mx, z(sys->node_offset(i)));
    return mx;
  };
  return prob;
}

double min_first(const CollocationSystem& sys, const Vec& z) {
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sys.intervals(); ++i) {
    mn = std::min(mn, z(sys.node_offset(i)));
    mn = std::min(mn, z(sys.mid_offset(i)));
  }
  return mn;
}

void push_point(WaveBranch& out, const WaveSystem& ws, const CollocationSystem& sys, const Vec& z, const Vec& pbase) {
  const int n = sys.size();
  const Vec p = full_p(pbase, z, n, slot_of(ws));
  WaveProfile w = to_profile(ws, sys, z.head(n), p);
  out.values.push_back(z(n + 1));
  out.L.push_back(p(kL));
  out.c.push_back(p(kC));
  out.s_max_w.push_back(measure_max(w));
  out.s_l2.push_back(measure_l2(w));
  out.fold_flag.push_back(false);
  out.profiles.push_back(std::move(w));
}

WaveBranch run_engine(const WaveSystem& ws, EngineStart st, double lo, double hi, const BranchOptions& opts) {
  WaveBranch out;
  out.param = ws.model_param() ? ws.key() : "L";
  const PeriodicBvpFunctions f = ws.functions();
  StepControl ctl = opts.step;
  ctl.param_min = lo;
  ctl.param_max = hi;
  ctl.max_steps = opts.chunk;
  const int slot = slot_of(ws);
  Vec pbase = st.p;
  bool first = true;
  for (;;) {
    const int n = st.sys->size();
    ContinuationProblem prob = make_problem(ws, st.sys, pbase);
    auto sysp = st.sys;
    bool low = false;
    auto stop = [&](const BranchPoint& bp) {
      low = min_first(*sysp, bp.z) < opts.min_first;
      return low || static_cast<int>(out.size()) + 1 >= opts.max_points;
    };
    Branch br;
    try {
      br = arclength_continue(prob, st.z, ctl, st.orient, stop);
    } catch (const Error& e) {
      out.truncated = true;
      out.diagnostic = e.what();
      return out;
    }
    const int offset = static_cast<int>(out.size()) - (first ? 0 : 1);
    for (size_t k = first ? 0 : 1; k < br.points.size(); ++k) push_point(out, ws, *st.sys, br.points[k].z, pbase);
    for (const auto& ev : br.events) {
      if (ev.type != "fold") continue;
      const int idx = offset + ev.after;
      FoldPoint fp;
      fp.param = ev.param;
      fp.index = idx;
      fp.profile = to_profile(ws, *st.sys, ev.z.head(n), full_p(pbase, ev.z, n, slot));
      out.folds.push_back(std::move(fp));
      if (idx >= 0 && idx < static_cast<int>(out.size())) out.fold_flag[idx] = true;
    }
    first = false;
    if (opts.log) {
      opts.log(out.param + " = " + std::to_string(out.values.back()) + ", c = " + std::to_string(out.c.back()) +
               ", max u1 = " + std::to_string(out.s_max_w.back()) + ", intervals " +
               std::to_string(st.sys->intervals()) + ", points " + std::to_string(out.size()));
    }
    const bool boundary = std::any_of(br.events.begin(), br.events.end(),
                                      [](const BranchEvent& e) { return e.type == "boundary"; });
    if (br.truncated) {
      out.truncated = true;
      out.diagnostic = br.diagnostic;
      return out;
    }
    if (boundary || low || static_cast<int>(out.size()) >= opts.max_points) {
      if (low) out.diagnostic = "first species approached the parabolicity boundary";
      return out;
    }
    if (br.points.size() < 2) {
      out.truncated = true;
      out.diagnostic = "continuation made no progress";
      return out;
    }

    // remesh around the last point and re-correct on the tangent hyperplane
    const BranchPoint& last = br.points.back();
    const BranchPoint& prev = br.points[br.points.size() - 2];
    const Vec p_last = full_p(pbase, last.z, n, slot);
    const Vec p_prev = full_p(pbase, prev.z, n, slot);
    const Vec Yl = last.z.head(n), Yp = prev.z.head(n);
    const int m_new = st.sys->suggested_intervals(Yl, p_last, opts.bvp.defect_tol, opts.bvp.min_intervals,
                                                  opts.bvp.max_intervals);
    auto next = std::make_shared<CollocationSystem>(f, st.sys->equidistributed_mesh(Yl, p_last, m_new));
    const int nn = next->size();
    Vec zl(nn + 2), zp(nn + 2);
    zl.head(nn) = next->discretize([&](double s) { return st.sys->sample(Yl, p_last, s); });
    zp.head(nn) = next->discretize([&](double s) { return st.sys->sample(Yp, p_prev, s); });
    zl.tail(2) = last.z.tail(2);
    zp.tail(2) = prev.z.tail(2);
    next->set_phase_reference(zl.head(nn), p_last);
    Vec dir = zl - zp;
    const Vec w = weights_for(nn);
    dir /= std::sqrt((w.array() * dir.array().square()).sum());
    ContinuationProblem np = make_problem(ws, next, pbase);
    const Vec row = (w.array() * dir.array()).matrix();
    Vec zc;
    try {
      zc = correct_on_hyperplane(np, zl, row, zl, ctl.newton_tol, 2 * ctl.max_newton);
    } catch (const Error& e) {
      out.truncated = true;
      out.diagnostic = std::string("remeshing failed: ") + e.what();
      return out;
    }
    next->set_phase_reference(zc.head(nn), full_p(pbase, zc, nn, slot));
    st.sys = next;
    st.z = zc;
    st.orient = dir;
    ctl.h0 = br.steps.empty() ? ctl.h0 : std::min(br.steps.back() * ctl.growth, ctl.hmax);
    // the re-corrected point replaces the last stored one
    out.values.pop_back();
    out.L.pop_back();
    out.c.pop_back();
    out.s_max_w.pop_back();
    out.s_l2.pop_back();
    const bool flag = out.fold_flag.back();
    out.fold_flag.pop_back();
    out.profiles.pop_back();
    push_point(out, ws, *st.sys, st.z, pbase);
    out.fold_flag.back() = flag;
  }
}

}  // namespace

WaveBranch continue_branch(const ModelSpec& m, const WaveProfile& start, const std::string& param, double lo,
                           double hi, int dir, const BranchOptions& opts) {
  if (!(lo < hi)) throw InvalidArgument("continue_branch: parameter range must be ordered");
  if (start.trivial) throw InvalidArgument("continue_branch: start profile is trivial");
  const WaveSystem ws(m, param);
  const int slot = slot_of(ws);
  Vec p = make_p(start.speed, start.length, ws.theta0());
  Solved s = adapt_solve(ws, start, p, {kC}, true, opts.bvp);
  const int n = s.sys->size();
  EngineStart st;
  st.sys = s.sys;
  st.p = s.p;
  st.z.resize(n + 2);
  st.z.head(n) = s.Y;
  st.z(n) = s.p(kC);
  st.z(n + 1) = s.p(slot);
  st.orient = Vec::Zero(n + 2);
  st.orient(n + 1) = dir >= 0 ? 1.0 : -1.0;
  return run_engine(ws, st, lo, hi, opts);
}

std::vector<FoldPoint> detect_fold(const WaveBranch& b) {
  std::vector<FoldPoint> out = b.folds;
  const int n = static_cast<int>(b.values.size());
  for (int i = 1; i + 1 < n; ++i) {
    const double d1 = b.values[i] - b.values[i - 1], d2 = b.values[i + 1] - b.values[i];
    if (!(d1 * d2 < 0.0)) continue;
    bool covered = false;
    for (const auto& f : b.folds) covered = covered || (f.index == i - 1 || f.index == i);
    if (covered) continue;
    // parametrize by the solution measure when monotone, else by arclength
    std::array<double, 3> t{}, y{b.values[i - 1], b.values[i], b.values[i + 1]};
    const double s0 = b.s_max_w[i - 1], s1 = b.s_max_w[i], s2 = b.s_max_w[i + 1];
    if ((s1 - s0) * (s2 - s1) > 0.0) {
      t = {s0, s1, s2};
    } else {
      t[0] = 0.0;
      t[1] = std::hypot(d1, s1 - s0);
      t[2] = t[1] + std::hypot(d2, s2 - s1);
    }
    const double a01 = (y[1] - y[0]) / (t[1] - t[0]), a12 = (y[2] - y[1]) / (t[2] - t[1]);
    const double a = (a12 - a01) / (t[2] - t[0]);
    const double bb = a01 - a * (t[0] + t[1]);
    const double ts = -bb / (2.0 * a);
    FoldPoint fp;
    fp.param = y[1] + bb * (ts - t[1]) + a * (ts * ts - t[1] * t[1]);
    fp.index = (ts < t[1]) ? i - 1 : i;
    if (i < static_cast<int>(b.profiles.size())) fp.profile = b.profiles[i];
    out.push_back(std::move(fp));
  }
  std::sort(out.begin(), out.end(), [](const FoldPoint& a, const FoldPoint& b) { return a.index < b.index; });
  return out;
}

SeedResult seed_wavetrain(const ModelFamily& fam, const std::string& key, double L, double theta_target,
                          double scan_lo, double scan_hi, double amplitude, const BranchOptions& opts) {
  if (!(scan_lo < scan_hi)) throw InvalidArgument("seed_wavetrain: scan interval must be ordered");
  const double kappa = 2.0 * std::numbers::pi / L;
  // neutral point: first sign change of the growth scanning down from scan_hi
  const int n_scan = 400;
  double hi = scan_hi;
  double g_hi = growth_at(fam.model(hi), fam.state(hi), 0.0, kappa);
  double lo = hi;
  bool found = false;
  for (int k = 1; k <= n_scan; ++k) {
    const double th = scan_hi - (scan_hi - scan_lo) * k / n_scan;
    const double g = growth_at(fam.model(th), fam.state(th), 0.0, kappa);
    if ((g > 0.0) != (g_hi > 0.0)) {
      lo = th;
      found = true;
      break;
    }
    hi = th;
    g_hi = g;
  }
  if (!found) throw BracketError("seed_wavetrain: no neutral point for this wavelength in the scan interval");
  SeedResult res;
  res.neutral = neutral_point(fam, 0.0, kappa, lo, hi);
  const double th = res.neutral.theta;
  const ModelSpec m = fam.model(th);
  const Vec ustar = fam.state(th);
  const int N = m.n_species;

  const CMat Dm = dispersion_matrix(m, ustar, 0.0, kappa);
  const EigenPairs ep = eig_dense(Dm);
  Eigen::Index imax;
  ep.values.real().maxCoeff(&imax);
  CVec phi = ep.vectors.col(imax);
  phi /= phi.cwiseAbs().maxCoeff();
  const double c0 = -ep.values(imax).imag() / kappa;

  const WaveSystem ws(m, key);
  const PeriodicBvpFunctions f = ws.functions();
  auto sys = std::make_shared<CollocationSystem>(f, uniform_breakpoints(std::max(64, opts.bvp.min_intervals)));
  const Vec p = make_p(c0, L, th);
  const int n = sys->size();
  const Vec Y0 = sys->discretize([&](double) {
    Vec y = Vec::Zero(2 * N);
    y.head(N) = ustar;
    return y;
  });
  const Vec dY = sys->discretize([&](double s) {
    const cplx e = std::polar(1.0, kappa * L * s);
    Vec y(2 * N);
    y.head(N) = (phi * e).real();
    y.tail(N) = (cplx(0.0, kappa) * phi * e).real();
    return y;
  });
  Vec z0(n + 2), dz = Vec::Zero(n + 2);
  z0.head(n) = Y0;
  z0(n) = c0;
  z0(n + 1) = th;
  dz.head(n) = amplitude * dY;
  sys->set_phase_reference(Y0 + dz.head(n), p);
  ContinuationProblem prob = make_problem(ws, sys, p);
  const Vec w = weights_for(n);
  const Vec row = (w.array() * dz.array()).matrix();
  const Vec z1 = correct_on_hyperplane(prob, z0 + dz, row, z0 + dz, 1e-10, 30);
  sys->set_phase_reference(z1.head(n), full_p(p, z1, n, kTheta));

  EngineStart st;
  st.sys = sys;
  st.z = z1;
  st.orient = z1 - z0;
  st.p = p;
  BranchOptions po = opts;
  po.bvp.defect_tol = std::max(po.bvp.defect_tol, 1e-5);
  res.path = run_engine(ws, st, std::min(theta_target, th), scan_hi, po);
  if (res.path.size() == 0 || std::abs(res.path.values.back() - theta_target) > 1e-9) {
    throw ConvergenceError("seed_wavetrain: continuation in " + key + " did not reach the target (" +
                           res.path.diagnostic + ")");
  }
  res.profile = solve_wavetrain(fam.model(theta_target), L, res.path.profiles.back(), SpeedMode::free, opts.bvp);
  return res;
}

SeedResult gsk_seed_wavetrain(double A, double B, double C, double D, double L, const BranchOptions& opts) {
  const double asn = saddle_node_threshold(B);
  const ModelFamily fam = gsk_plus_family(B, C, D);
  BranchOptions o = opts;
  o.step.hmax = std::min(o.step.hmax, 0.2);
  o.step.h0 = std::min(o.step.h0, 0.01);
  o.max_points = std::max(o.max_points, 2000);
  return seed_wavetrain(fam, "A", L, A, asn * (1.0 + 1e-3), asn + 4.0, 1e-2, o);
}

WaveProfile polish_spectral(const ModelSpec& m, const WaveProfile& profile, int M, double tol) {
  if (M < 9) throw InvalidArgument("polish_spectral: need at least 9 points");
  if (M % 2 == 0) ++M;
  const int N = m.n_species;
  const double L = profile.length;
  ProfileSampler smp(profile);
  const double x0 = profile.u.nodes.front();
  Mat U(N, M);
  for (int j = 0; j < M; ++j) U.col(j) = smp(x0 + L * j / M).head(N);
  const Mat D = fourier_diff_matrix(M, L);
  const Mat D2 = D * D;
  const Mat Uref = U;
  const Mat dref = U * D.transpose();
  double c = profile.speed;
  const int size = N * M;

  auto residual = [&](const Mat& Uc, double cc, Mat& Ux, Mat& Uxx) {
    Ux = Uc * D.transpose();
    Uxx = Uc * D2.transpose();
    Vec G(size + 1);
    for (int j = 0; j < M; ++j) {
      const Vec u = Uc.col(j), ux = Ux.col(j), uxx = Uxx.col(j);
      if (!m.domain_predicate(u)) throw ParabolicityError("polish_spectral: profile left the parabolic region");
      const Vec g = m.diffusion(u) * uxx + m.diffusion_jacobian(u, ux) * ux + cc * ux + m.reaction(u, ux);
      for (int q = 0; q < N; ++q) G(q * M + j) = g(q);
    }
    G(size) = ((Uc - Uref).array() * dref.array()).sum() * L / M;
    return G;
  };

  Mat Ux, Uxx;
  Vec G = residual(U, c, Ux, Uxx);
  double res = G.lpNorm<Eigen::Infinity>();
  std::vector<double> hist{res};
  for (int it = 0; it < 30 && res > tol; ++it) {
    Mat J = Mat::Zero(size + 1, size + 1);
    for (int j = 0; j < M; ++j) {
      const PointCoefficients pc = linearize_at(m, U.col(j), Ux.col(j), Uxx.col(j), c);
      for (int a = 0; a < N; ++a) {
        for (int b = 0; b < N; ++b) {
          const double al = pc.alpha(a, b), be = pc.beta(a, b), ga = pc.gamma(a, b);
          auto rowblk = J.row(a * M + j).segment(b * M, M);
          if (al != 0.0) rowblk += al * D2.row(j);
          if (be != 0.0) rowblk += be * D.row(j);
          J(a * M + j, b * M + j) += ga;
        }
        J(a * M + j, size) = Ux(a, j);
      }
    }
    for (int b = 0; b < N; ++b) J.row(size).segment(b * M, M) = dref.row(b) * (L / M);
    const Vec dx = J.partialPivLu().solve(-G);
    double t = 1.0;
    for (;;) {
      Mat Un = U;
      for (int b = 0; b < N; ++b) Un.row(b) += t * dx.segment(b * M, M).transpose();
      const double cn = c + t * dx(size);
      Mat Uxn, Uxxn;
      Vec Gn;
      bool ok = true;
      try {
        Gn = residual(Un, cn, Uxn, Uxxn);
        ok = Gn.allFinite() && Gn.lpNorm<Eigen::Infinity>() < std::max(res, 1e-300) * (1.0 - 1e-4 * t);
      } catch (const ParabolicityError&) {
        ok = false;
      }
      if (ok) {
        U = Un;
        c = cn;
        Ux = Uxn;
        Uxx = Uxxn;
        G = Gn;
        break;
      }
      t *= 0.5;
      if (t < 1e-3) break;
    }
    const double rn = G.lpNorm<Eigen::Infinity>();
    hist.push_back(rn);
    if (t < 1e-3) break;  // stagnation at rounding level
    res = rn;
  }
  res = G.lpNorm<Eigen::Infinity>();
  if (!(res <= std::max(tol, 1e-8))) {
    throw ConvergenceError("polish_spectral: Fourier collocation Newton did not converge (increase M)", hist);
  }
  WaveProfile out = profile;
  out.speed = c;
  out.u = uniform_periodic(U, L);
  out.ux = uniform_periodic(Ux, L);
  out.uxx = uniform_periodic(Uxx, L);
  for (int j = 0; j < M; ++j) out.u.nodes[j] = out.ux.nodes[j] = out.uxx->nodes[j] = x0 + L * j / M;
  return out;
}

double off_grid_residual(const ModelSpec& m, const WaveProfile& profile) {
  if (!is_uniform_periodic(profile.u)) throw InvalidArgument("off_grid_residual: needs a uniform periodic profile");
  const TrigInterpolant ti(profile.u.values, profile.length);
  const int M = profile.u.size();
  const double h = profile.length / M;
  double r = 0.0;
  for (int j = 0; j < M; ++j) {
    const Mat d = ti.eval_with_derivatives((j + 0.5) * h);
    const Vec u = d.col(0), ux = d.col(1), uxx = d.col(2);
    const Vec g = eval_diffusion(m, u) * uxx + m.diffusion_jacobian(u, ux) * ux + profile.speed * ux +
                  m.reaction(u, ux);
    r = std::max(r, g.lpNorm<Eigen::Infinity>());
  }
  return r;
}

WaveProfile shifted(const WaveProfile& p, double delta) {
  WaveProfile q = with_second_derivative(p);
  const int M = p.u.size();
  const int N = p.n_species();
  if (is_uniform_periodic(p.u)) {
    const double x0 = p.u.nodes.front();
    Mat all(3 * N, M);
    all << q.u.values, q.ux.values, q.uxx->values;
    const TrigInterpolant ti(all, p.length);
    Mat out(3 * N, M);
    for (int j = 0; j < M; ++j) out.col(j) = ti.eval(p.u.nodes[j] - x0 + delta);
    q.u.values = out.topRows(N);
    q.ux.values = out.middleRows(N, N);
    q.uxx->values = out.bottomRows(N);
    return q;
  }
  const WaveProfile src = q;
  for (int j = 0; j < M; ++j) {
    const double x = p.u.nodes[j] + delta;
    q.u.values.col(j) = hermite_at(src.u, src.ux, x);
    q.ux.values.col(j) = hermite_at(src.ux, *src.uxx, x);
    q.uxx->values.col(j) = src.uxx->at(x);
  }
  return q;
}

}  // namespace wavespec
