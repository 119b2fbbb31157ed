#include "wavespec/fourier.hpp"

#include <cmath>
#include <numbers>

#include "wavespec/errors.hpp"

namespace wavespec {

Mat fourier_diff_matrix(int M, double L) {
  if (M < 2) throw InvalidArgument("fourier_diff_matrix: need at least two points");
  Mat D = Mat::Zero(M, M);
  const double h = 2.0 * std::numbers::pi / M;
  const double scale = 2.0 * std::numbers::pi / L;
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      if (i == j) continue;
      const int d = i - j;
      const double sgn = (d % 2 == 0) ? 1.0 : -1.0;
      const double arg = 0.5 * d * h;
      D(i, j) = (M % 2 == 1) ? 0.5 * sgn / std::sin(arg) : 0.5 * sgn / std::tan(arg);
      D(i, j) *= scale;
    }
  }
  return D;
}

TrigInterpolant::TrigInterpolant(const Mat& values, double period) : period_(period) {
  const int M = static_cast<int>(values.cols());
  if (M < 2 || !(period > 0.0)) throw InvalidArgument("TrigInterpolant: bad samples or period");
  const int K = M / 2;
  nyquist_ = (M % 2 == 0);
  coeffs_ = CMat::Zero(values.rows(), K + 1);
  for (int k = 0; k <= K; ++k) {
    CVec tw(M);
    for (int j = 0; j < M; ++j) tw(j) = std::polar(1.0 / M, -2.0 * std::numbers::pi * k * j / M);
    coeffs_.col(k) = values.cast<cplx>() * tw;
  }
}

Mat TrigInterpolant::eval_with_derivatives(double x) const {
  const int K = static_cast<int>(coeffs_.cols()) - 1;
  const double omega = 2.0 * std::numbers::pi / period_;
  Mat out = Mat::Zero(dim(), 3);
  out.col(0) = coeffs_.col(0).real();
  const cplx step = std::polar(1.0, omega * x);
  cplx e = 1.0;
  for (int k = 1; k <= K; ++k) {
    e *= step;
    const double wk = omega * k;
    const bool nyq = nyquist_ && k == K;
    const double weight = nyq ? 1.0 : 2.0;
    for (int r = 0; r < dim(); ++r) {
      const cplx term = coeffs_(r, k) * e;
      if (nyq) {
        // Nyquist mode interpolates as a cosine; its odd derivatives vanish on the grid.
        const double amp = std::real(coeffs_(r, k) * e);
        out(r, 0) += amp;
        out(r, 2) -= wk * wk * amp;
        continue;
      }
      out(r, 0) += weight * term.real();
      out(r, 1) += weight * (cplx(0.0, wk) * term).real();
      out(r, 2) -= weight * wk * wk * term.real();
    }
  }
  return out;
}

Mat spectral_derivative(const Mat& values, double L, int order) {
  const int M = static_cast<int>(values.cols());
  if (M < 2) throw InvalidArgument("spectral_derivative: need at least two samples");
  const int K = M / 2;
  const bool even = (M % 2 == 0);
  const double omega = 2.0 * std::numbers::pi / L;
  // forward transform
  CMat c = CMat::Zero(values.rows(), K + 1);
  for (int k = 0; k <= K; ++k) {
    CVec tw(M);
    for (int j = 0; j < M; ++j) tw(j) = std::polar(1.0 / M, -2.0 * std::numbers::pi * k * j / M);
    c.col(k) = values.cast<cplx>() * tw;
  }
  for (int k = 0; k <= K; ++k) {
    const bool nyq = even && k == K;
    if (nyq && order % 2 == 1) {
      c.col(k).setZero();
      continue;
    }
    c.col(k) *= std::pow(cplx(0.0, omega * k), order);
  }
  Mat out = Mat::Zero(values.rows(), M);
  for (int j = 0; j < M; ++j) {
    for (int k = 0; k <= K; ++k) {
      const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * k * j / M);
      const bool nyq = even && k == K;
      const double weight = (k == 0 || nyq) ? 1.0 : 2.0;
      for (int r = 0; r < values.rows(); ++r) out(r, j) += weight * std::real(c(r, k) * e);
    }
  }
  return out;
}

}  // namespace wavespec
