#pragma once

#include <vector>

#include "wavespec/types.hpp"

namespace wavespec {

/// First-derivative Fourier collocation matrix on M equispaced points of [0, L).
Mat fourier_diff_matrix(int M, double L);

/// Spectral derivative of order `order` applied row-wise to periodic samples
/// (rows = components, cols = equispaced nodes over one period L). The
/// Nyquist mode of even M is dropped for odd orders.
Mat spectral_derivative(const Mat& values, double L, int order = 1);

/// Trigonometric interpolant of periodic samples; evaluates values and
/// derivatives at arbitrary x.
class TrigInterpolant {
 public:
  TrigInterpolant() = default;
  TrigInterpolant(const Mat& values, double period);

  int dim() const { return static_cast<int>(coeffs_.rows()); }
  double period() const { return period_; }

  /// Derivatives of order 0..2 at x, returned as columns of a dim x 3 matrix.
  Mat eval_with_derivatives(double x) const;
  Vec eval(double x) const { return eval_with_derivatives(x).col(0); }

 private:
  CMat coeffs_;  // dim x (K+1), nonnegative wavenumbers
  double period_ = 0.0;
  bool nyquist_ = false;
};

}  // namespace wavespec
