#include <Eigen/SparseLU>
#include <algorithm>
#include <complex>

#include "doctest.h"
#include "support.hpp"
#include "wavespec/collocation.hpp"
#include "wavespec/continuation.hpp"
#include "wavespec/ivp.hpp"
#include "wavespec/linalg.hpp"
#include "wavespec/newton.hpp"

using namespace wst;

namespace {

std::vector<cplx> sorted(const CVec& v) {
  std::vector<cplx> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end(), [](cplx a, cplx b) { return std::abs(a.real() - b.real()) > 1e-9 ? a.real() < b.real() : a.imag() < b.imag(); });
  return s;
}

// planar cycle of radius 1 and period 2 pi: (cos x, -sin x) up to phase
Vec cycle_rhs(const Vec& y, double mu) {
  const double g = 1.0 - y.squaredNorm();
  return (1.0 + mu) * vec2(y(1) + g * y(0), -y(0) + g * y(1));
}

// y1' = y2, y2' = y1 + y1^3 - g(x) with exact solution y1 = 1 + 0.5 cos x + 0.2 sin 2x
double exact_y(double x) { return 1.0 + 0.5 * std::cos(x) + 0.2 * std::sin(2 * x); }
double exact_dy(double x) { return -0.5 * std::sin(x) + 0.4 * std::cos(2 * x); }
double exact_ddy(double x) { return -0.5 * std::cos(x) - 0.8 * std::sin(2 * x); }

Vec forced_rhs(double x, const Vec& y) {
  const double g = exact_y(x) + std::pow(exact_y(x), 3) - exact_ddy(x);
  return vec2(y(1), y(0) + std::pow(y(0), 3) - g);
}

MeshFunction periodic_guess(int nodes, double period, const std::function<Vec(double)>& f) {
  MeshFunction m;
  m.periodic = true;
  m.period = period;
  m.values.resize(2, nodes);
  for (int i = 0; i < nodes; ++i) {
    m.nodes.push_back(period * i / nodes);
    m.values.col(i) = f(m.nodes.back());
  }
  return m;
}

double forced_error(int nodes) {
  BvpOptions o;
  o.adapt = false;
  o.tol = 1e-13;
  const auto guess = periodic_guess(nodes, 2 * M_PI, [](double x) { return vec2(exact_y(x) + 0.05, exact_dy(x)); });
  const auto r = solve_periodic_bvp([](double x, const Vec& y, double) { return forced_rhs(x, y); }, 2 * M_PI, guess,
                                    std::nullopt, o);
  double err = 0.0;
  for (int i = 0; i < r.y.size(); ++i) err = std::max(err, std::abs(r.y.values(0, i) - exact_y(r.y.nodes[i])));
  return err;
}

ContinuationProblem scalar_problem(std::function<double(double, double)> F, std::function<Vec(double, double)> dF) {
  ContinuationProblem p;
  p.residual = [F](const Vec& z) {
    Vec r(1);
    r(0) = F(z(0), z(1));
    return r;
  };
  p.jacobian = [dF](const Vec& z) {
    const Vec g = dF(z(0), z(1));
    SpMat J(1, 2);
    J.insert(0, 0) = g(0);
    J.insert(0, 1) = g(1);
    return J;
  };
  p.param_index = 1;
  return p;
}

std::vector<double> fold_params(const Branch& b) {
  std::vector<double> f;
  for (const auto& e : b.events)
    if (e.type == "fold") f.push_back(e.param);
  std::sort(f.begin(), f.end());
  return f;
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("eig_dense examples") {
    CMat d = CMat::Zero(3, 3);
    d.diagonal() << 1.0, 2.0, 3.0;
    const auto e = sorted(eig_dense(d).values);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(e[i] - cplx(i + 1.0)) <= 1e-14);

    CMat r(2, 2);
    r << 0.0, 1.0, -1.0, 0.0;
    const auto er = sorted(eig_dense(r).values);
    CHECK(std::abs(er[0] - cplx(0, -1)) <= 1e-14);
    CHECK(std::abs(er[1] - cplx(0, 1)) <= 1e-14);
  }

  TEST_CASE("eig_dense trace identity and residuals") {
    CMat M(50, 50);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) M(i, j) = cplx(uniform(-1, 1), uniform(-1, 1));
    const EigenPairs ep = eig_dense(M);
    CHECK(std::abs(ep.values.sum() - M.trace()) <= 1e-8);
    CHECK(ep.max_residual <= 1e-12);
    for (int j = 0; j < 50; ++j) CHECK(std::abs(ep.vectors.col(j).norm() - 1.0) <= 1e-12);
    CHECK((eigvals_dense(M) - ep.values).cwiseAbs().maxCoeff() <= 1e-10);
    const CVec v = eigvec_near(M, ep.values(7) + cplx(1e-3, 0));
    CHECK((M * v - ep.values(7) * v).norm() <= 1e-8 * M.norm());
  }

  TEST_CASE("eigenvalues of real matrices come in conjugate pairs") {
    for (int trial = 0; trial < 10; ++trial) {
      CMat M(30, 30);
      for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) M(i, j) = uniform(-1, 1);
      const CVec ev = eig_dense(M).values;
      for (int i = 0; i < ev.size(); ++i) {
        double best = 1e300;
        for (int j = 0; j < ev.size(); ++j) best = std::min(best, std::abs(ev(j) - std::conj(ev(i))));
        CHECK(best <= 1e-10);
      }
    }
  }

  TEST_CASE("newton examples") {
    auto sq = [](const Vec& x) {
      Vec r(1);
      r(0) = x(0) * x(0) - 2.0;
      return r;
    };
    Vec x0(1);
    x0(0) = 1.0;
    CHECK(std::abs(newton_solve(sq, {}, x0).x(0) - std::sqrt(2.0)) <= 1e-10);

    auto id = [](const Vec& x) { return x; };
    x0(0) = 5.0;
    CHECK(std::abs(newton_solve(id, {}, x0).x(0)) <= 1e-10);

    const ModelSpec m = make_gsk(0.5, 0.2, 0.2, 0.001);
    const auto F = [&](const Vec& u) { return eval_reaction(m, u, Vec::Zero(2)); };
    const auto J = [&](const Vec& u) { return Mat(m.reaction_du(u, Vec::Zero(2))); };
    const Vec u = newton_solve(F, J, vec2(0.5, 0.5)).x;
    double best = 1e300;
    for (const auto& e : gsk_equilibria(0.5, 0.2)) best = std::min(best, (u - e.u).norm());
    CHECK(best <= 1e-9);

    auto none = [](const Vec& x) {
      Vec r(1);
      r(0) = x(0) * x(0) + 1.0;
      return r;
    };
    NewtonOptions o;
    o.max_iter = 20;
    try {
      newton_solve(none, {}, x0, o);
      FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
      CHECK(!e.history().empty());
    }
  }

  TEST_CASE("integrate_ivp examples") {
    Vec y0(1);
    y0(0) = 1.0;
    const auto r = integrate_ivp([](double, const Vec& y) { return Vec(y); }, 0.0, 1.0, y0);
    CHECK(std::abs(r.y(0) - std::exp(1.0)) <= 1e-8);

    CVec z0(1);
    z0(0) = 1.0;
    const auto rz = integrate_ivp([](double, const CVec& y) { return CVec(cplx(0, 1) * y); }, 0.0, M_PI, z0);
    CHECK(std::abs(rz.y(0) - cplx(-1.0)) <= 1e-8);

    const auto back = integrate_ivp([](double, const Vec& y) { return Vec(y); }, 1.0, 0.0, r.y);
    CHECK(std::abs(back.y(0) - 1.0) <= 1e-8);

    IvpOptions o;
    o.rtol = 1e-9;
    o.atol = 1e-12;
    o.dense = true;
    const auto osc = integrate_ivp([](double, const Vec& y) { return vec2(y(1), -y(0)); }, 0.0, 20 * M_PI, vec2(1, 0), o);
    double drift = 0.0;
    for (const auto& y : osc.ys) drift = std::max(drift, std::abs(0.5 * y.squaredNorm() - 0.5));
    CHECK(drift <= 1e-7);
    CHECK(std::abs(osc.at(0.5)(0) - std::cos(0.5)) <= 1e-6);
  }

  TEST_CASE("periodic bvp recovers the unit cycle from a perturbed guess") {
    const auto guess = periodic_guess(40, 2 * M_PI, [](double x) {
      return vec2(1.1 * std::cos(x) + 0.05 * std::cos(3 * x), -0.9 * std::sin(x));
    });
    const auto r = solve_periodic_bvp([](double, const Vec& y, double mu) { return cycle_rhs(y, mu); }, 2 * M_PI, guess, 0.1);
    REQUIRE(r.mu);
    CHECK(std::abs(*r.mu) <= 1e-8);
    double phase = std::atan2(-r.y.values(1, 0), r.y.values(0, 0));
    double err = 0.0;
    for (int i = 0; i < r.y.size(); ++i) {
      const double x = r.y.nodes[i] + phase;
      err = std::max(err, (r.y.column(i) - vec2(std::cos(x), -std::sin(x))).cwiseAbs().maxCoeff());
    }
    CHECK(err <= 1e-6);
  }

  TEST_CASE("periodic bvp keeps a constant solution fixed") {
    MeshFunction g = periodic_guess(16, 3.0, [](double) { return vec2(0.0, 0.0); });
    const auto r = solve_periodic_bvp([](double, const Vec& y, double) { return vec2(y(1), -y(0) - y(1)); }, 3.0, g,
                                      std::nullopt);
    CHECK(r.y.values.cwiseAbs().maxCoeff() <= 1e-14);
  }

  TEST_CASE("periodic bvp converges with order at least 3.5") {
    const double e1 = forced_error(16), e2 = forced_error(32), e3 = forced_error(64);
    CHECK(std::log2(e1 / e2) >= 3.5);
    CHECK(std::log2(e2 / e3) >= 3.5);
  }

  TEST_CASE("bordered solver agrees with sparse LU") {
    PeriodicBvpFunctions f;
    f.dim = 2;
    f.rhs = [](double, const Vec& y, const Vec& p) { return Vec(2 * M_PI * cycle_rhs(y, p(0))); };
    std::vector<double> mesh;
    for (int i = 0; i <= 30; ++i) mesh.push_back(std::pow(i / 30.0, 1.3));
    CollocationSystem sys(f, mesh);
    Vec p(1);
    p(0) = 0.05;
    const Vec Y = sys.discretize([](double s) { return vec2(1.2 * std::cos(2 * M_PI * s), -std::sin(2 * M_PI * s) + 0.1); });
    sys.set_phase_reference(Y, p);
    const SpMat J = sys.jacobian(Y, p, {0});
    REQUIRE(J.rows() == J.cols());
    const BorderedSolver bs(sys.structured_jacobian(Y, p, {0}));
    REQUIRE(bs.ok());
    Eigen::SparseLU<SpMat> lu(J);
    Vec rhs(J.rows());
    for (int i = 0; i < rhs.size(); ++i) rhs(i) = uniform(-1, 1);
    const Vec a = bs.solve(rhs), b = lu.solve(rhs);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + b.cwiseAbs().maxCoeff()));
  }

  TEST_CASE("continuation around the unit circle") {
    auto prob = scalar_problem([](double y, double x) { return x * x + y * y - 1.0; },
                               [](double y, double x) { return vec2(2 * y, 2 * x); });
    StepControl ctl;
    ctl.h0 = 0.05;
    ctl.hmax = 0.1;
    ctl.max_steps = 400;
    const Vec z0 = vec2(0.0, 1.0);  // (y, x) = (0, 1)
    bool lapped = false;
    const Branch b = arclength_continue(prob, z0, ctl, vec2(1.0, 0.0), [&](const BranchPoint& p) {
      lapped = p.arclength > 2 * M_PI - 0.05 && (p.z - z0).norm() < 0.1;
      return lapped;
    });
    REQUIRE(lapped);
    CHECK(std::abs(b.points.back().arclength - 2 * M_PI) <= 0.1);
    for (const auto& p : b.points) CHECK(std::abs(p.z.squaredNorm() - 1.0) <= 1e-9);
    const auto folds = fold_params(b);
    REQUIRE(folds.size() >= 1);
    for (double f : folds) CHECK(std::abs(std::abs(f) - 1.0) <= 1e-6);
    CHECK(std::abs(folds.front() + 1.0) <= 1e-6);
  }

  TEST_CASE("fold of x^2 = p") {
    auto prob = scalar_problem([](double x, double p) { return x * x - p; }, [](double x, double) { return vec2(2 * x, -1.0); });
    StepControl ctl;
    ctl.hmax = 0.2;
    ctl.max_steps = 100;
    ctl.param_max = 1.5;
    const Branch b = arclength_continue(prob, vec2(1.0, 1.0), ctl, vec2(-1.0, -1.0));
    const auto folds = fold_params(b);
    REQUIRE(folds.size() == 1);
    CHECK(std::abs(folds[0]) <= 1e-6);
  }

  TEST_CASE("reversed tangent traces the same solution set") {
    auto prob = scalar_problem([](double x, double p) { return x * x * x - x - p; },
                               [](double x, double) { return vec2(3 * x * x - 1.0, -1.0); });
    StepControl ctl;
    ctl.hmax = 0.1;
    ctl.max_steps = 500;
    ctl.param_min = -6.0;
    ctl.param_max = 6.0;
    const Branch fwd = arclength_continue(prob, vec2(-2.0, -6.0), ctl, vec2(1.0, 1.0));
    const Branch rev = arclength_continue(prob, vec2(2.0, 6.0), ctl, vec2(-1.0, -1.0));
    for (const Branch* b : {&fwd, &rev}) {
      for (const auto& p : b->points) CHECK(std::abs(std::pow(p.z(0), 3) - p.z(0) - p.z(1)) <= 1e-10);
      CHECK(std::abs(b->points.back().param - (b == &fwd ? 6.0 : -6.0)) <= 1e-9);
    }
    const auto ff = fold_params(fwd), fr = fold_params(rev);
    REQUIRE(ff.size() == 2);
    REQUIRE(fr.size() == 2);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(ff[i] - fr[i]) <= 1e-6);
    CHECK(std::abs(ff[1] - 2.0 / (3.0 * std::sqrt(3.0))) <= 1e-6);
  }
}
