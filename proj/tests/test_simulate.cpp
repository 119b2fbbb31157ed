#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "wavespec/dispersion.hpp"
#include "wavespec/fourier.hpp"
#include "wavespec/simulate.hpp"

using namespace wst;

namespace {

Mat sine_field(int M, double ell, double offset, double amp, int mode = 1) {
  Mat u(1, M);
  for (int i = 0; i < M; ++i) u(0, i) = offset + amp * std::sin(2 * M_PI * mode * i / M);
  (void)ell;
  return u;
}

double heat_rhs_error(int M) {
  const double ell = 3.0, k = 2 * M_PI / ell;
  const Mat u = sine_field(M, ell, 0.0, 1.0);
  const Mat r = semidiscrete_rhs(make_scalar({}), 0.0, u, ell);
  return (r + k * k * u).cwiseAbs().maxCoeff();
}

double porous_error(int M) {
  const ModelSpec m = make_gsk(0.0, kB, 0.0, kD);
  Mat u(2, M);
  for (int i = 0; i < M; ++i) u.col(i) << 1.0 + 0.1 * std::sin(2 * M_PI * i / M), 0.0;
  const Mat r = semidiscrete_rhs(m, 0.0, u, 2 * M_PI);
  const Mat w2 = u.row(0).array().square().matrix();
  return (r.row(0) - spectral_derivative(w2, 2 * M_PI, 2)).cwiseAbs().maxCoeff();
}

// u_t = u_xx - u with u = sin(2 pi x / ell); compared with the exact semidiscrete decay
double euler_error(double dt) {
  const double ell = 2 * M_PI, T = 1.0;
  const int M = 64;
  ScalarCoefficients k;
  k.r1 = -1.0;
  SimState s;
  s.length = ell;
  s.u = sine_field(M, ell, 0.0, 1.0);
  SimOptions o;
  o.adaptive = false;
  o.positive_species = -1;
  Integrator it(make_scalar(k), o);
  const int n = static_cast<int>(std::lround(T / dt));
  for (int i = 0; i < n; ++i) it.step(s, dt);
  const double h = ell / M;
  const double rate = -4.0 / (h * h) * std::pow(std::sin(h / 2), 2) - 1.0;
  return (s.u - std::exp(rate * T) * sine_field(M, ell, 0.0, 1.0)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("rhs vanishes at an equilibrium") {
    const ModelSpec m = make_gsk(0.5, kB, kC, kD);
    const Mat u = gsk_plus(0.5).replicate(1, 64);
    CHECK(semidiscrete_rhs(m, 0.3, u, 7.0).cwiseAbs().maxCoeff() <= 1e-14);
  }

  TEST_CASE("heat rhs is second-order accurate") {
    const double e1 = heat_rhs_error(32), e2 = heat_rhs_error(64);
    CHECK(e2 <= 1e-2);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
  }

  TEST_CASE("porous-medium term matches spectral (w^2)_xx to second order") {
    const double e1 = porous_error(64), e2 = porous_error(128);
    CHECK(e2 <= 1e-3);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
  }

  TEST_CASE("loss of parabolicity is reported with its position") {
    const ModelSpec m = make_gsk(0.5, kB, kC, kD);
    Mat u = gsk_plus(0.5).replicate(1, 10);
    u(0, 7) = -0.01;
    try {
      semidiscrete_rhs(m, 0.0, u, 10.0);
      FAIL("expected a parabolicity error");
    } catch (const ParabolicityError& e) {
      CHECK(e.location() == doctest::Approx(7.0));
    }
  }

  TEST_CASE("analytic jacobian matches finite differences of the rhs") {
    const ModelSpec m = make_gsk(0.43, kB, kC, kD);
    const int M = 12;
    Mat u(2, M);
    for (int i = 0; i < M; ++i) u.col(i) << 0.4 + 0.2 * std::sin(i), 1.0 + 0.3 * std::cos(2.0 * i);
    const double c = 0.2, ell = 4.0;
    const Mat J = Mat(semidiscrete_jacobian(m, c, u, ell));
    double worst = 0.0;
    for (int i = 0; i < M; ++i) {
      for (int r = 0; r < 2; ++r) {
        Mat up = u, dn = u;
        up(r, i) += 1e-6;
        dn(r, i) -= 1e-6;
        const Mat d = (semidiscrete_rhs(m, c, up, ell) - semidiscrete_rhs(m, c, dn, ell)) / 2e-6;
        for (int j = 0; j < M; ++j)
          for (int q = 0; q < 2; ++q)
            worst = std::max(worst, std::abs(J(j * 2 + q, i * 2 + r) - d(q, j)) / (1 + std::abs(d(q, j))));
      }
    }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("an equilibrium is a fixed point of the step") {
    const ModelSpec m = make_gsk(0.5, kB, kC, kD);
    SimState s;
    s.length = 6.0;
    s.u = gsk_plus(0.5).replicate(1, 128);
    for (TimeScheme sch : {TimeScheme::implicit_euler, TimeScheme::tr_bdf2}) {
      SimOptions o;
      o.scheme = sch;
      const SimState t = step(m, s, 0.1, o);
      CHECK((t.u - s.u).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(t.t == doctest::Approx(0.1));
    }
  }

  TEST_CASE("heat mode decays with the exact e-folding time") {
    const double ell = 2 * M_PI;
    const int M = 128;
    SimState s;
    s.length = ell;
    s.u = sine_field(M, ell, 1.0, 1.0);
    SimOptions o;
    o.adaptive = false;
    o.positive_species = -1;
    Integrator it(make_scalar({}), o);
    for (int i = 0; i < 1000; ++i) it.step(s, 1e-3);
    const double amp = s.u(0, M / 4) - 1.0;
    const double efold = 1.0 / std::log(1.0 / amp);
    CHECK(efold == doctest::Approx(1.0 / std::pow(2 * M_PI / ell, 2)).epsilon(0.02));
  }

  TEST_CASE("implicit euler is first order in time") {
    const double e1 = euler_error(0.02), e2 = euler_error(0.01), e3 = euler_error(0.005);
    CHECK(std::log2(e1 / e2) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(std::log2(e2 / e3) == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("co-moving and lab frames agree after the shift c t") {
    const double ell = 2 * M_PI, c = 0.5, T = 1.0;
    const int M = 512;
    ScalarCoefficients k;
    k.r1 = 0.5;
    k.r2 = -0.5;
    const ModelSpec m = make_scalar(k);
    Mat u0(1, M);
    for (int i = 0; i < M; ++i) u0(0, i) = 0.5 + 0.3 * std::sin(ell * i / M) + 0.1 * std::cos(2 * ell * i / M);
    SimOptions o;
    o.adaptive = false;
    o.scheme = TimeScheme::tr_bdf2;
    o.positive_species = -1;
    SimState lab{ell, u0, 0.0, 0.0, 1e-3}, mov{ell, u0, 0.0, c, 1e-3};
    Integrator a(m, o), b(m, o);
    for (int i = 0; i < 1000; ++i) {
      a.step(lab, T / 1000);
      b.step(mov, T / 1000);
    }
    const TrigInterpolant ti(lab.u, ell);
    double err = 0.0;
    for (int i = 0; i < M; ++i) err = std::max(err, std::abs(mov.u(0, i) - ti.eval(ell * i / M + c * T)(0)));
    CHECK(err <= 1e-4);
  }

  TEST_CASE("orbital distance ignores translations of the base") {
    const int P = 64, q = 3;
    Mat base(1, P * q);
    for (int i = 0; i < P * q; ++i) base(0, i) = std::exp(std::sin(2 * M_PI * i / P));
    const double h = 6.0 / P;
    Mat moved(1, P * q);
    for (int i = 0; i < P * q; ++i) moved(0, i) = base(0, (i + 5) % (P * q));
    CHECK(orbital_distance(moved, base, P, h) <= 1e-12);
    Mat bumped = moved;
    bumped(0, 10) += 1e-3;
    CHECK(orbital_distance(bumped, base, P, h) == doctest::Approx(1e-3 * std::sqrt(h)).epsilon(1e-3));
  }

  TEST_CASE("discrete wavetrain is a steady state of the semidiscrete system") {
    const ModelSpec m = make_gsk(kWaveA, kB, kC, kD);
    const WaveProfile& p = gsk_wavetrain(6.0);
    const DiscreteWave dw = discrete_wavetrain(m, p, 256);
    CHECK(dw.u.cols() == 256);
    CHECK(std::abs(dw.c - p.speed) <= 1e-3);
    CHECK(semidiscrete_rhs(m, dw.c, dw.u, dw.length).cwiseAbs().maxCoeff() <= 1e-9);
  }

  TEST_CASE("homogeneous growth: rate matches dispersion and is insensitive to epsilon") {
    const double A = 0.43;
    const ModelSpec m = make_gsk(A, kB, kC, kD);
    const Vec u = gsk_plus(A);
    const Growth g = max_growth(spectrum_homogeneous(m, u, 0.0, default_kappa_grid()));
    const GrowthSetup setup = homogeneous_setup(m, u, g.kappa, 0.0, 4, 128);
    CHECK(setup.predicted.real() == doctest::Approx(g.max_re).epsilon(1e-6));
    GrowthOptions o;
    o.T = 1000;
    const GrowthResult r1 = growth_experiment(m, setup, o);
    o.epsilon = 5e-5;
    const GrowthResult r2 = growth_experiment(m, setup, o);
    REQUIRE(r1.ok);
    REQUIRE(r2.ok);
    CHECK(r1.sigma == doctest::Approx(g.max_re).epsilon(0.10));
    CHECK(std::abs(r2.sigma - r1.sigma) <= 0.02 * std::abs(r1.sigma));
    CHECK(r1.min_first > 0.0);
    CHECK(r2.min_first > 0.0);
    for (double w : r1.history.min_first) CHECK(w > 0.0);
  }

  TEST_CASE("stable equilibrium: perturbation decays, no fit window") {
    const double A = 0.63;
    const ModelSpec m = make_gsk(A, kB, kC, kD);
    const GrowthSetup setup = homogeneous_setup(m, gsk_plus(A), 8.9, 0.0, 2, 64);
    GrowthOptions o;
    o.T = 50;
    const GrowthResult r = growth_experiment(m, setup, o);
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.diagnostic.empty());
    CHECK(r.history.q.back() < r.q0);
  }
}
