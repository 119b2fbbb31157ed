#include <Eigen/SVD>
#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "wavespec/bloch.hpp"
#include "wavespec/dispersion.hpp"
#include "wavespec/linalg.hpp"

using namespace wst;

namespace {

LinearizationCoefficients constant_scalar(double alpha, double beta, double gamma, double L, int samples = 9) {
  LinearizationCoefficients co;
  co.period = L;
  for (int i = 0; i < samples; ++i) {
    co.x.push_back(L * i / samples);
    co.alpha.push_back(Mat::Constant(1, 1, alpha));
    co.beta.push_back(Mat::Constant(1, 1, beta));
    co.gamma.push_back(Mat::Constant(1, 1, gamma));
  }
  return co;
}

double alignment(const CVec& a, const CVec& b) { return std::abs(a.dot(b)) / (a.norm() * b.norm()); }

const WavetrainSpectrum& spectrum(double L) {
  static std::map<double, std::unique_ptr<WavetrainSpectrum>> cache;
  auto& slot = cache[L];
  if (!slot) slot = std::make_unique<WavetrainSpectrum>(make_gsk(kWaveA, kB, kC, kD), gsk_wavetrain(L));
  return *slot;
}

double nearest(const CVec& v, cplx z) {
  double best = 1e300;
  for (int i = 0; i < v.size(); ++i) best = std::min(best, std::abs(v(i) - z));
  return best;
}

SpectralCurve curve_from(const std::function<cplx(double)>& f, double kmax, int n) {
  SpectralCurve c;
  for (int i = 0; i < n; ++i) {
    const double k = kmax * i / (n - 1);
    c.kappa.push_back(k);
    c.lambda.push_back(f(k));
  }
  return c;
}

}  // namespace

TEST_SUITE("bloch") {
  TEST_CASE("firstorder_matrix examples") {
    PointCoefficients pc{Mat::Constant(1, 1, 1.0), Mat::Zero(1, 1), Mat::Zero(1, 1)};
    const CMat a1 = firstorder_matrix(pc, 1.0);
    CHECK(a1(0, 0) == cplx(0));
    CHECK(a1(0, 1) == cplx(1));
    CHECK(a1(1, 0) == cplx(1));
    CHECK(a1(1, 1) == cplx(0));
    const CMat am = firstorder_matrix(pc, -1.0);
    CHECK(am(1, 0) == cplx(-1));
    const CVec ev = eig_dense(am).values;
    CHECK(nearest(ev, cplx(0, 1)) <= 1e-14);
    CHECK(nearest(ev, cplx(0, -1)) <= 1e-14);

    const ModelSpec m = make_gsk(0.3, kB, kC, kD);
    for (int trial = 0; trial < 10; ++trial) {
      const PointCoefficients g = linearize_at(m, vec2(uniform(0.1, 1), uniform(0, 2)), vec2(uniform(-1, 1), uniform(-1, 1)),
                                               vec2(uniform(-1, 1), uniform(-1, 1)), uniform(-1, 1));
      const cplx lam(uniform(-1, 1), uniform(-2, 2));
      const CMat A = firstorder_matrix(g, lam);
      CHECK(std::abs(A.trace() - cplx(-(g.alpha.inverse() * g.beta).trace())) <= 1e-10);
    }
  }

  TEST_CASE("constant coefficients: multipliers e and 1/e, unit determinant") {
    const WavetrainSpectrum ws(constant_scalar(1, 0, 0, 1.0));
    const MonodromyResult r = ws.monodromy(1.0);
    CHECK(nearest(r.multipliers, std::exp(1.0)) <= 1e-8);
    CHECK(nearest(r.multipliers, std::exp(-1.0)) <= 1e-8);
    CHECK(std::abs(r.Pi.determinant() - cplx(1.0)) <= 1e-10);
    CHECK(std::abs(r.log_det_predicted - r.log_det_actual) <= 1e-10);
  }

  TEST_CASE("constant coefficients: closed-form dispersion relation") {
    const double L = 2 * M_PI;
    const WavetrainSpectrum ws(constant_scalar(1, 0, 0, L, 17), 4096, 32);
    CHECK(std::abs(ws.dispersion(-1.0, 0.0)) <= 1e-8);
    for (int trial = 0; trial < 10; ++trial) {
      const cplx lam(uniform(-1, 0.5), uniform(-1, 1));
      const double g = uniform(0, 2 * M_PI);
      const cplx s = std::sqrt(lam) * L, e = std::exp(cplx(0, g));
      const cplx want = (std::exp(s) - e) * (std::exp(-s) - e);
      CHECK(std::abs(ws.dispersion(lam, g) - want) <= 1e-8 * (1.0 + std::abs(want)));
    }
  }

  TEST_CASE("dispersion equals det(Pi - e^{i gamma})") {
    // Pi itself is too ill-conditioned for a direct determinant, so the oracle is the
    // product over the multipliers
    const WavetrainSpectrum& ws = spectrum(5.9);
    for (int trial = 0; trial < 5; ++trial) {
      const cplx lam(uniform(-0.5, 0.5), uniform(-1, 1));
      const double g = uniform(0, 2 * M_PI);
      const MonodromyResult r = ws.monodromy(lam);
      cplx log_want = 0.0;
      for (int i = 0; i < r.multipliers.size(); ++i) log_want += std::log(r.multipliers(i) - std::exp(cplx(0, g)));
      CHECK(std::abs(std::exp(ws.log_dispersion(lam, g) - log_want) - 1.0) <= 1e-6);
    }
    const WavetrainSpectrum small(constant_scalar(1, 0.3, -0.2, 1.5));
    const cplx lam(0.2, 0.1);
    const CMat P = small.monodromy(lam).Pi - std::exp(cplx(0, 0.4)) * CMat::Identity(2, 2);
    CHECK(std::abs(small.dispersion(lam, 0.4) - P.determinant()) <= 1e-10);
  }

  TEST_CASE("translation mode of the L = 5.9 wavetrain") {
    const WavetrainSpectrum& ws = spectrum(5.9);
    const WaveProfile& p = ws.profile();
    const MonodromyResult r = ws.monodromy(0.0);
    int k = 0;
    (r.multipliers.array() - 1.0).abs().minCoeff(&k);
    CHECK(std::abs(r.multipliers(k) - cplx(1.0)) <= 1e-6);
    // periodic solution of the segment chain y_{k+1} = S_k y_k, y_K = y_0
    const int K = static_cast<int>(r.segments.size());
    CMat chain = CMat::Zero(4 * K, 4 * K);
    for (int s = 0; s < K; ++s) {
      chain.block(4 * s, 4 * s, 4, 4) = -r.segments[s];
      chain.block(4 * s, 4 * ((s + 1) % K), 4, 4) += CMat::Identity(4, 4);
    }
    Eigen::JacobiSVD<CMat> svd(chain, Eigen::ComputeFullV);
    const CVec y0 = svd.matrixV().col(4 * K - 1).head(4);
    CVec tangent(4);
    tangent << p.ux.column(0).cast<cplx>(), p.uxx->column(0).cast<cplx>();
    CHECK(alignment(y0, tangent) >= 1 - 1e-6);

    double scale = 1.0;
    for (int i = 0; i < r.multipliers.size(); ++i)
      if (i != k) scale *= std::abs(r.multipliers(i) - 1.0);
    CHECK(std::abs(ws.dispersion(0.0, 0.0)) <= 1e-6 * scale);
    CHECK(std::abs(ws.dispersion(10.0, 0.0)) > 0.0);
    CHECK(std::abs(ws.dispersion(10.0, 1.0)) > 0.0);

    const CMat B = ws.bloch_matrix(0.0);
    const EigenPairs eb = eig_dense(B);
    int z = 0;
    eb.values.cwiseAbs().minCoeff(&z);
    CHECK(std::abs(eb.values(z)) <= 1e-6);
    const int Mg = ws.grid_points();
    CVec ux(2 * Mg);
    ux << p.ux.values.row(0).transpose().cast<cplx>(), p.ux.values.row(1).transpose().cast<cplx>();
    CHECK(alignment(eb.vectors.col(z), ux) >= 1 - 1e-6);
  }

  TEST_CASE("abel certificate on random lambda") {
    const WavetrainSpectrum& ws = spectrum(5.9);
    for (int trial = 0; trial < 10; ++trial) {
      const MonodromyResult r = ws.monodromy(cplx(uniform(-1, 1), uniform(-2, 2)));
      CHECK(std::abs(r.log_det_predicted - r.log_det_actual) <= 1e-6);
      CHECK(std::abs(r.log_det_predicted.real() - ws.trace_integral()) <= 1e-12 * (1 + std::abs(ws.trace_integral())));
    }
  }

  TEST_CASE("multipliers are invariant under shifting the coefficient origin") {
    const ModelSpec m = make_gsk(kWaveA, kB, kC, kD);
    const WavetrainSpectrum& ws = spectrum(5.9);
    WavetrainSpectrum::Options o;
    o.M_grid = ws.grid_points();
    o.polish = false;
    const WavetrainSpectrum moved(m, shifted(ws.profile(), 1.234), o);
    const WavetrainSpectrum same(m, ws.profile(), o);
    const cplx lam(0.05, 0.3);
    const CVec a = same.monodromy(lam).multipliers, b = moved.monodromy(lam).multipliers;
    for (int i = 0; i < a.size(); ++i) CHECK(nearest(b, a(i)) <= 1e-8 * std::max(1.0, std::abs(a(i))));
  }

  TEST_CASE("bloch matrix size and stability of the top modes") {
    const ModelSpec m = make_gsk(kWaveA, kB, kC, kD);
    const WavetrainSpectrum& ws = spectrum(5.9);
    REQUIRE(ws.grid_points() % 2 == 1);
    const CMat B = ws.bloch_matrix(0.7);
    CHECK(B.rows() == 2 * ws.grid_points());
    WavetrainSpectrum::Options o;
    o.M_grid = 2 * ws.grid_points() - 1;
    const WavetrainSpectrum fine(m, gsk_wavetrain(5.9), o);
    auto top = [](const CMat& M, int n) {
      CVec ev = eigvals_dense(M);
      std::vector<cplx> v(ev.data(), ev.data() + ev.size());
      std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return a.real() > b.real(); });
      v.resize(n);
      return v;
    };
    const auto a = top(B, 40);
    const CVec b = eigvals_dense(fine.bloch_matrix(0.7));
    for (const cplx z : a) CHECK(nearest(b, z) <= 1e-7);
  }

  TEST_CASE("trivial wavetrain: bloch eigenvalues equal the dispersion relation") {
    const double A = 0.5, L = 5.0;
    const ModelSpec m = make_gsk(A, kB, kC, kD);
    const Vec u = gsk_plus(A);
    WavetrainSpectrum::Options o;
    o.M_grid = 65;
    o.polish = false;
    const WavetrainSpectrum ws(m, with_second_derivative(homogeneous_profile(u, L, 65, 0.1)), o);
    for (double g : {0.0, 0.9, 2.5}) {
      const CVec ev = eigvals_dense(ws.bloch_matrix(g));
      for (int mm = -10; mm <= 10; ++mm) {
        const CVec d = eigvals_dense(dispersion_matrix(m, u, 0.1, (g + 2 * M_PI * mm) / L));
        for (int i = 0; i < d.size(); ++i) CHECK(nearest(ev, d(i)) <= 1e-8 * (1 + std::abs(d(i))));
      }
    }
  }

  TEST_CASE("sideband curvature of analytic curves") {
    CHECK(sideband_curvature(curve_from([](double k) { return cplx(-k * k); }, 0.5, 41), 0.4) == doctest::Approx(-2.0).epsilon(1e-10));
    for (double a : {0.0, 0.7, -3.0}) {
      const double b = -0.35;
      const auto c = curve_from([&](double k) { return cplx(b * k * k, a * k); }, 0.5, 41);
      CHECK(sideband_curvature(c, 0.4) == doctest::Approx(2 * b).epsilon(1e-10));
      CHECK(sideband_curvature(c, 0.4, 4) == doctest::Approx(2 * b).epsilon(1e-10));
    }
  }

  TEST_CASE("detect_sideband on synthetic curvature") {
    const SidebandScan s = detect_sideband([](double L) { return L - 5.98; }, 5.9, 6.1, 1e-4);
    CHECK(std::abs(s.L_star - 5.98) <= 1e-3);
    CHECK_THROWS_AS(detect_sideband([](double L) { return -1.0 - L; }, 5.9, 6.1), BracketError);
  }

  TEST_CASE("origin curve: monodromy tracing against the bloch matrix") {
    const WavetrainSpectrum& ws = spectrum(5.9);
    const auto grid = gamma_grid(16, 0.5);
    const SpectralCurve traced = trace_origin_curve(ws, grid);
    REQUIRE(traced.lambda.size() == grid.size());
    CHECK(traced.lambda[0] == cplx(0.0));
    const SpectralCurve matrix = origin_curve_from_matrix(bloch_matrix_spectrum(ws, grid, 10));
    REQUIRE(matrix.lambda.size() == grid.size());
    for (size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(traced.lambda[i] - matrix.lambda[i]) <= 1e-5);
    for (size_t i = 1; i < grid.size(); ++i) CHECK(std::abs(traced.lambda[i] - traced.lambda[i - 1]) <= 0.1);

    std::vector<double> neg;
    for (double g : grid) neg.push_back(-g);
    const SpectralCurve mirrored = trace_origin_curve(ws, neg);
    for (size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(mirrored.lambda[i] - std::conj(traced.lambda[i])) <= 1e-8);
  }

  TEST_CASE("L = 6.1 carries spectrum in the right half plane") {
    const WavetrainSpectrum& ws = spectrum(6.1);
    double best = -1e300;
    for (double g : gamma_grid(8, M_PI)) {
      const CVec ev = eigvals_dense(ws.bloch_matrix(g));
      for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) > 1e-4) best = std::max(best, ev(i).real());
    }
    CHECK(best > 0.0);
  }
}
