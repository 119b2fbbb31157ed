#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "wavespec/dispersion.hpp"
#include "wavespec/linalg.hpp"

using namespace wst;

namespace {

// max over i of the distance from a_i to the nearest b_j (both ways)
double multiset_distance(const CVec& a, const CVec& b) {
  double worst = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    const CVec& x = pass ? b : a;
    const CVec& y = pass ? a : b;
    for (int i = 0; i < x.size(); ++i) {
      double best = 1e300;
      for (int j = 0; j < y.size(); ++j) best = std::min(best, std::abs(x(i) - y(j)));
      worst = std::max(worst, best);
    }
  }
  return worst;
}

SpectralCurve synthetic_curve(const std::function<double(double)>& f, double lo, double hi, int n) {
  SpectralCurve c;
  for (int i = 0; i < n; ++i) {
    const double k = lo + (hi - lo) * i / (n - 1);
    c.kappa.push_back(k);
    c.lambda.push_back(f(k));
  }
  return c;
}

ModelSpec scalar_growth(double theta) {
  ScalarCoefficients k;
  k.r1 = theta;
  return make_scalar(k);
}

}  // namespace

TEST_SUITE("dispersion") {
  TEST_CASE("dispersion matrix examples") {
    const ModelSpec m = make_gsk(0.63, kB, kC, kD);
    const Vec u = gsk_plus(0.63);
    const CMat d0 = dispersion_matrix(m, u, 0.3, 0.0);
    const Mat fu = m.reaction_du(u, Vec::Zero(2));
    CHECK((d0 - fu.cast<cplx>()).cwiseAbs().maxCoeff() == 0.0);

    const CMat d1 = dispersion_matrix(m, u, 0.0, 1.0);
    const double w = u(0), v = u(1);
    CHECK(std::abs(d1(1, 1) - cplx(-kD - kB + 2 * w * v, 0.0)) <= 1e-14);

    ScalarCoefficients k;
    k.a0 = 2.0;
    Vec z(1);
    z(0) = 0.0;
    CHECK(std::abs(dispersion_matrix(make_scalar(k), z, 0.0, 1.0)(0, 0) - cplx(-2.0)) <= 1e-15);
  }

  TEST_CASE("scalar heat has the single branch -D kappa^2") {
    ScalarCoefficients k;
    k.a0 = 2.0;
    Vec z(1);
    z(0) = 0.0;
    const auto curves = spectrum_homogeneous(make_scalar(k), z, 0.0, default_kappa_grid(101, 2.0));
    REQUIRE(curves.size() == 1);
    for (size_t i = 0; i < curves[0].kappa.size(); ++i) {
      const double kap = curves[0].kappa[i];
      CHECK(std::abs(curves[0].lambda[i] - cplx(-2 * kap * kap)) <= 1e-13);
    }
    CHECK(std::abs(curves[0].lambda[50] - cplx(-2.0)) <= 1e-13);
  }

  TEST_CASE("figure 1 signs on (w+, v+)") {
    const auto grid = default_kappa_grid();
    const Growth g63 = max_growth(spectrum_homogeneous(make_gsk(0.63, kB, kC, kD), gsk_plus(0.63), 0.0, grid));
    const Growth g43 = max_growth(spectrum_homogeneous(make_gsk(0.43, kB, kC, kD), gsk_plus(0.43), 0.0, grid));
    const Growth g53 = max_growth(spectrum_homogeneous(make_gsk(0.53, kB, kC, kD), gsk_plus(0.53), 0.0, grid));
    CHECK(g63.max_re < 0.0);
    CHECK(g43.max_re > 0.0);
    CHECK(g43.kappa > 0.1);
    CHECK(std::abs(g53.max_re) < 0.02);
    CHECK(std::abs(g53.max_re) < std::abs(g43.max_re));
    CHECK(growth_at(make_gsk(0.43, kB, kC, kD), gsk_plus(0.43), 0.0, g43.kappa) == doctest::Approx(g43.max_re).epsilon(1e-6));
  }

  TEST_CASE("max_growth on analytic curves") {
    const Growth a = max_growth({synthetic_curve([](double k) { return -k * k; }, -2, 2, 401)});
    CHECK(std::abs(a.max_re) <= 1e-12);
    CHECK(std::abs(a.kappa) <= 1e-12);
    const Growth b = max_growth({synthetic_curve([](double k) { return 1 - (k - 1) * (k - 1); }, -2, 3, 333)});
    CHECK(std::abs(b.max_re - 1.0) <= 1e-6);
    CHECK(std::abs(b.kappa - 1.0) <= 1e-6);
  }

  TEST_CASE("conjugation symmetry of the dispersion matrix") {
    for (int trial = 0; trial < 50; ++trial) {
      const double A = uniform(0.17, 1.0), c = uniform(-1, 1), kap = uniform(0, 15);
      const ModelSpec m = make_gsk(A, kB, kC, kD);
      for (const auto& e : gsk_equilibria(A, kB)) {
        const CVec lp = eigvals_dense(dispersion_matrix(m, e.u, c, kap));
        const CVec lm = eigvals_dense(dispersion_matrix(m, e.u, c, -kap));
        CHECK(multiset_distance(lp, lm.conjugate()) <= 1e-10);
      }
    }
  }

  TEST_CASE("frame shift adds i kappa c") {
    for (int trial = 0; trial < 50; ++trial) {
      const double A = uniform(0.17, 1.0), c = uniform(-1, 1), kap = uniform(-15, 15);
      const ModelSpec m = make_gsk(A, kB, kC, kD);
      for (const auto& e : gsk_equilibria(A, kB)) {
        const CVec l0 = eigvals_dense(dispersion_matrix(m, e.u, 0.0, kap));
        const CVec lc = eigvals_dense(dispersion_matrix(m, e.u, c, kap));
        CHECK(multiset_distance(lc, (l0.array() + cplx(0, kap * c)).matrix()) <= 1e-10);
      }
    }
    const auto grid = default_kappa_grid(601, 15);
    const Growth g0 = max_growth(spectrum_homogeneous(make_gsk(0.43, kB, kC, kD), gsk_plus(0.43), 0.0, grid));
    const Growth gc = max_growth(spectrum_homogeneous(make_gsk(0.43, kB, kC, kD), gsk_plus(0.43), 0.7, grid));
    CHECK(std::abs(g0.max_re - gc.max_re) <= 1e-10);
    CHECK(std::abs(g0.kappa - gc.kappa) <= 1e-8);
  }

  TEST_CASE("curves account for every eigenvalue and match the pointwise spectrum") {
    const auto grid = default_kappa_grid(301, 15);
    const Vec u = gsk_plus(0.43);
    const ModelSpec m = make_gsk(0.43, kB, kC, kD);
    const auto curves = spectrum_homogeneous(m, u, 0.2, grid);
    size_t total = 0;
    for (const auto& c : curves) {
      total += c.lambda.size();
      for (size_t i = 0; i < c.kappa.size(); ++i) {
        const CVec ev = eigvals_dense(dispersion_matrix(m, u, 0.2, c.kappa[i]));
        double best = 1e300;
        for (int j = 0; j < ev.size(); ++j) best = std::min(best, std::abs(ev(j) - c.lambda[i]));
        CHECK(best <= 1e-12);
      }
    }
    CHECK(total == 2 * grid.size());

    const auto full = conjugate_completion(curves);
    REQUIRE(full.size() == curves.size());
    for (size_t b = 0; b < full.size(); ++b) {
      for (size_t i = 0; i < full[b].kappa.size(); ++i) {
        const double k = full[b].kappa[i];
        const CVec ev = eigvals_dense(dispersion_matrix(m, u, 0.2, k));
        double best = 1e300;
        for (int j = 0; j < ev.size(); ++j) best = std::min(best, std::abs(ev(j) - full[b].lambda[i]));
        CHECK(best <= 1e-10);
      }
    }
  }

  TEST_CASE("turing-hopf onset for GSK lies strictly inside the bracket") {
    const OnsetResult o = detect_turing_hopf(gsk_plus_family(kB, kC, kD), 0.0, 0.43, 0.63, 1e-6);
    CHECK(o.theta > 0.43);
    CHECK(o.theta < 0.63);
    CHECK(o.kappa > 0.1);
    CHECK(o.flag == "turing_hopf");
  }

  TEST_CASE("onset of the scalar family theta - kappa^2") {
    ModelFamily fam;
    fam.model = scalar_growth;
    fam.state = [](double) { return Vec::Zero(1).eval(); };
    const OnsetResult o = detect_turing_hopf(fam, 0.0, -0.05, 0.15, 1e-4, default_kappa_grid(201, 2));
    CHECK(std::abs(o.theta) <= 1e-4);
    CHECK(std::abs(o.kappa) <= 1e-12);
    CHECK(o.iterations <= 11);

    const OnsetResult n = neutral_point(fam, 0.0, 1.5, 0.0, 4.0);
    CHECK(std::abs(n.theta - 2.25) <= 1e-10);
  }
}
