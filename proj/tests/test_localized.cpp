#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "wavespec/dispersion.hpp"
#include "wavespec/localized.hpp"

using namespace wst;

namespace {

ModelSpec linear_scalar(double r1) {
  ScalarCoefficients k;
  k.r1 = r1;
  return make_scalar(k);
}

Vec scalar_state(double u) { return Vec::Constant(1, u); }

std::vector<cplx> evans_on(const FrontFixture& f, const WaveProfile& p, const std::vector<cplx>& contour) {
  std::vector<cplx> out;
  for (cplx z : contour) out.push_back(evans_function(f.model, p, z).value);
  return out;
}

}  // namespace

TEST_SUITE("localized") {
  TEST_CASE("essential boundary of the GSK desert pulse") {
    const double A = 0.3;
    const ModelSpec m = make_gsk(A, kB, kC, kD);
    const auto grid = default_kappa_grid(201, 5);
    const EssentialBoundary eb = essential_boundary(m, vec2(1, 0), vec2(1, 0), 0.0, grid);
    CHECK(eb.pulse);
    REQUIRE(eb.minus.size() == 2);
    REQUIRE(eb.plus.size() == 2);
    int exact = 0;
    for (const auto& c : eb.minus) {
      bool v_branch = true, w_branch = true;
      for (size_t i = 0; i < c.kappa.size(); ++i) {
        const double k = c.kappa[i];
        v_branch = v_branch && std::abs(c.lambda[i] - cplx(-kD * k * k - kB)) <= 1e-14;
        w_branch = w_branch && std::abs(c.lambda[i] - cplx(-2 * k * k - A, k * kC)) <= 1e-13;
      }
      exact += v_branch;
      CHECK((v_branch || w_branch));
    }
    CHECK(exact == 1);
  }

  TEST_CASE("scalar essential boundary -1 - kappa^2 and conjugation symmetry") {
    const ModelSpec m = linear_scalar(-1.0);
    const auto grid = default_kappa_grid(101, 3);
    const EssentialBoundary eb = essential_boundary(m, scalar_state(0), scalar_state(0), 0.0, grid);
    REQUIRE(eb.minus.size() == 1);
    double max_re = -1e300;
    for (size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(eb.minus[0].lambda[i] - cplx(-1 - grid[i] * grid[i])) <= 1e-14);
      max_re = std::max(max_re, eb.minus[0].lambda[i].real());
    }
    CHECK(max_re == doctest::Approx(-1.0));

    const ModelSpec g = make_gsk(0.5, kB, kC, kD);
    const auto curves = essential_boundary(g, gsk_plus(0.5), vec2(1, 0), 0.4, grid);
    for (const auto* side : {&curves.minus, &curves.plus}) {
      for (const auto& c : conjugate_completion(*side)) {
        for (size_t i = 0; i < c.kappa.size(); ++i) {
          const CMat d = dispersion_matrix(g, side == &curves.minus ? gsk_plus(0.5) : vec2(1, 0), 0.4, c.kappa[i]);
          const Eigen::VectorXcd ev = d.eigenvalues();
          double best = 1e300;
          for (int j = 0; j < ev.size(); ++j) best = std::min(best, std::abs(ev(j) - c.lambda[i]));
          CHECK(best <= 1e-10);
        }
      }
    }
  }

  TEST_CASE("morse indices and fredholm index of the heat pencil") {
    const ModelSpec m = linear_scalar(0.0);
    const AsymptoticPencil lo = asymptotic_pencil(m, scalar_state(0), 0.0, Side::minus);
    const AsymptoticPencil hi = asymptotic_pencil(m, scalar_state(0), 0.0, Side::plus);
    const CMat a = lo.at(1.0);
    CHECK(std::abs(a(0, 1) - cplx(1)) == 0.0);
    CHECK(std::abs(a(1, 0) - cplx(1)) == 0.0);
    const MorseFredholm h = morse_fredholm(lo, hi, 1.0);
    CHECK(h.hyperbolic_minus);
    CHECK(h.hyperbolic_plus);
    CHECK(h.fredholm);
    CHECK(h.i_minus == 1);
    CHECK(h.i_plus == 1);
    CHECK(h.index == 0);

    const MorseFredholm e = morse_fredholm(lo, hi, -1.0);
    CHECK_FALSE(e.fredholm);
    CHECK(e.boundary_ambiguous);
  }

  TEST_CASE("pulse pencils have index 0 wherever hyperbolic") {
    const ModelSpec m = make_gsk(0.3, kB, kC, kD);
    const AsymptoticPencil lo = asymptotic_pencil(m, vec2(1, 0), 0.1, Side::minus);
    const AsymptoticPencil hi = asymptotic_pencil(m, vec2(1, 0), 0.1, Side::plus);
    int hyperbolic = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const MorseFredholm r = morse_fredholm(lo, hi, cplx(uniform(-1, 1), uniform(-1, 1)));
      if (r.fredholm) {
        ++hyperbolic;
        CHECK(r.index == 0);
      }
    }
    CHECK(hyperbolic > 0);
  }

  TEST_CASE("evans function of the nagumo front") {
    const FrontFixture f = nagumo_front_fixture(0.25);
    double scale = 0.0;
    for (cplx z : circle_contour(0.1, 0.2, 16)) scale = std::max(scale, std::abs(evans_function(f.model, f.profile, z).value));
    REQUIRE(scale > 0.0);
    const EvansResult e0 = evans_function(f.model, f.profile, 0.0);
    CHECK(std::abs(e0.value) <= 1e-6 * scale);
    CHECK(e0.dim_unstable == 1);
    CHECK_FALSE(e0.basis_degenerate);

    for (cplx z : {cplx(0.3, 0.2), cplx(-0.05, 0.4), cplx(1.0, -0.7)}) {
      const cplx a = evans_function(f.model, f.profile, z).value;
      const cplx b = evans_function(f.model, f.profile, std::conj(z)).value;
      CHECK(std::abs(std::abs(a) - std::abs(b)) <= 1e-8 * std::abs(a));
    }
  }

  TEST_CASE("evans values do not depend on the window length") {
    const FrontFixture a = nagumo_front_fixture(0.25, 30.0, 1201);
    const FrontFixture b = nagumo_front_fixture(0.25, 40.0, 1601);
    for (cplx z : {cplx(0.1), cplx(0.4, 0.3)}) {
      const cplx ea = evans_function(a.model, a.profile, z).value;
      const cplx eb = evans_function(b.model, b.profile, z).value;
      CHECK(std::abs(ea - eb) <= 1e-4 * std::abs(ea));
    }
  }

  TEST_CASE("evans rejects profiles that have not decayed") {
    const FrontFixture f = nagumo_front_fixture(0.25, 5.0, 201);
    CHECK_THROWS_AS(evans_function(f.model, f.profile, 0.1), InvalidArgument);
  }

  TEST_CASE("winding numbers: one zero at the translation eigenvalue, stable under refinement") {
    const FrontFixture f = nagumo_front_fixture(0.25);
    const int w64 = winding_number(evans_on(f, f.profile, circle_contour(0.1, 0.2, 64)));
    const int w128 = winding_number(evans_on(f, f.profile, circle_contour(0.1, 0.2, 128)));
    CHECK(w64 == 1);
    CHECK(w128 == w64);
    CHECK(winding_number(evans_on(f, f.profile, circle_contour(0.5, 0.3, 64))) == 0);
  }

  TEST_CASE("constant profile at a stable equilibrium has no zeros") {
    const FrontFixture f = nagumo_front_fixture(0.25);
    const WaveProfile flat = homogeneous_profile(scalar_state(0), 10.0, 64);
    // max Re of the dispersion relation at u = 0 is -a = -0.25
    for (int n : {64, 128}) {
      CHECK(winding_number(evans_on(f, flat, circle_contour(0.1, 0.2, n))) == 0);
      CHECK(winding_number(evans_on(f, flat, circle_contour(0.375, 0.5, n))) == 0);
    }
  }

  TEST_CASE("winding number of sampled analytic functions") {
    std::vector<cplx> z2, none;
    for (cplx z : circle_contour(0.0, 1.0, 64)) {
      z2.push_back(z * z);
      none.push_back(z - 3.0);
    }
    CHECK(winding_number(z2) == 2);
    CHECK(winding_number(none) == 0);
  }
}
