#include <algorithm>

#include "doctest.h"
#include "support.hpp"

using namespace wst;

namespace {

// closed form from the quadratic w v = B, A (1 - w) = B v
void closed_form(double A, double B, Vec& plus, Vec& minus) {
  const double sq = std::sqrt(A * A - 4 * A * B * B);
  plus = vec2((A - sq) / (2 * A), (A + sq) / (2 * B));
  minus = vec2((A + sq) / (2 * A), (A - sq) / (2 * B));
}

double set_distance(const std::vector<Equilibrium>& a, const std::vector<Equilibrium>& b) {
  double worst = 0.0;
  for (const auto* s : {&a, &b}) {
    const auto& other = s == &a ? b : a;
    for (const auto& e : *s) {
      double best = 1e300;
      for (const auto& f : other) best = std::min(best, (e.u - f.u).norm());
      worst = std::max(worst, best);
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("equilibria") {
  TEST_CASE("closed-form states at A=0.5, B=0.2") {
    const auto eq = gsk_equilibria(0.5, 0.2);
    REQUIRE(eq.size() == 3);
    const auto plus = gsk_state(0.5, 0.2, "plus");
    const auto minus = gsk_state(0.5, 0.2, "minus");
    REQUIRE(plus);
    REQUIRE(minus);
    CHECK(plus->u(0) == doctest::Approx(0.087689).epsilon(1e-5));
    CHECK(plus->u(1) == doctest::Approx(2.280778).epsilon(1e-6));
    CHECK(minus->u(0) == doctest::Approx(0.912311).epsilon(1e-6));
    CHECK(minus->u(1) == doctest::Approx(0.219224).epsilon(1e-5));
    const auto desert = gsk_state(0.5, 0.2, "desert");
    REQUIRE(desert);
    CHECK((desert->u - vec2(1, 0)).norm() == 0.0);
  }

  TEST_CASE("below the saddle-node only the desert remains") {
    const auto eq = gsk_equilibria(0.1, 0.2);
    REQUIRE(eq.size() == 1);
    CHECK((eq[0].u - vec2(1, 0)).norm() == 0.0);
    CHECK_FALSE(gsk_state(0.1, 0.2, "plus"));
  }

  TEST_CASE("B = 0 degenerates to the desert with a note") {
    const auto eq = gsk_equilibria(0.5, 0.0);
    REQUIRE(eq.size() == 1);
    CHECK((eq[0].u - vec2(1, 0)).norm() == 0.0);
    CHECK_FALSE(eq[0].note.empty());
  }

  TEST_CASE("saddle-node threshold") {
    CHECK(saddle_node_threshold(0.2) == doctest::Approx(0.16).epsilon(1e-15));
    CHECK(saddle_node_threshold(0.0) == 0.0);
    const auto eq = gsk_equilibria(0.16 + 1e-12, 0.2);
    REQUIRE(eq.size() == 3);
    const auto p = gsk_state(0.16 + 1e-12, 0.2, "plus"), m = gsk_state(0.16 + 1e-12, 0.2, "minus");
    CHECK(std::abs(p->u(0) - m->u(0)) <= 2e-5);
    const auto at = gsk_equilibria(saddle_node_threshold(0.2), 0.2);
    int degenerate = 0;
    for (const auto& e : at) degenerate += e.fold_degenerate;
    CHECK(at.size() == 2);
    CHECK(degenerate == 1);
  }

  TEST_CASE("substitution residuals and the closed form for sampled A >= 4B^2") {
    for (int trial = 0; trial < 200; ++trial) {
      const double B = uniform(0.01, 1.0);
      const double A = 4 * B * B + uniform(1e-6, 2.0);
      Vec plus, minus;
      closed_form(A, B, plus, minus);
      const auto p = gsk_state(A, B, "plus"), m = gsk_state(A, B, "minus");
      REQUIRE(p);
      REQUIRE(m);
      CHECK((p->u - plus).norm() <= 1e-10 * (1 + plus.norm()));
      CHECK((m->u - minus).norm() <= 1e-10 * (1 + minus.norm()));
      for (const auto& e : gsk_equilibria(A, B)) {
        const double w = e.u(0), v = e.u(1);
        CHECK(std::abs(A * (1 - w) - w * v * v) <= 1e-10);
        CHECK(std::abs(-B * v + w * v * v) <= 1e-10);
      }
    }
  }

  TEST_CASE("find_equilibria reproduces the closed form") {
    SearchBox box{vec2(0, 0), vec2(2, 2)};
    const auto found = find_equilibria(make_gsk(0.5, 0.2, 0.2, 0.001), box);
    REQUIRE(found.size() == 3);
    CHECK(set_distance(found, gsk_equilibria(0.5, 0.2)) <= 1e-8);

    const auto low = find_equilibria(make_gsk(0.1, 0.2, 0.2, 0.001), box);
    REQUIRE(low.size() == 1);
    CHECK((low[0].u - vec2(1, 0)).norm() <= 1e-8);

    // sorted lexicographically
    for (size_t i = 1; i < found.size(); ++i) CHECK(found[i - 1].u(0) <= found[i].u(0));
  }

  TEST_CASE("find_equilibria of the logistic scalar model") {
    ScalarCoefficients k;
    k.r1 = 1.0;
    k.r2 = -1.0;
    Vec lo(1), hi(1);
    lo(0) = -0.5;
    hi(0) = 1.5;
    const auto found = find_equilibria(make_scalar(k), {lo, hi});
    REQUIRE(found.size() == 2);
    CHECK(std::abs(found[0].u(0)) <= 1e-10);
    CHECK(std::abs(found[1].u(0) - 1.0) <= 1e-10);
  }

  TEST_CASE("find_equilibria is stable under doubling the starts") {
    for (double A : {0.2, 0.43, 0.9}) {
      const ModelSpec m = make_gsk(A, 0.2, 0.2, 0.001);
      SearchBox box{vec2(0, 0), vec2(2, 6)};
      const auto a = find_equilibria(m, box, 64), b = find_equilibria(m, box, 128);
      CHECK(a.size() == b.size());
      CHECK(set_distance(a, b) <= 1e-8);
    }
  }
}
