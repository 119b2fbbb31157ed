#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "wavespec/dispersion.hpp"
#include "wavespec/mesh.hpp"
#include "wavespec/model.hpp"
#include "wavespec/wavetrain.hpp"

namespace wavespec {

/// Companion matrix [[0, I], [-alpha^{-1}(gamma - lambda), -alpha^{-1} beta]]
/// of the spectral ODE at one point: (phi, phi') solves w' = A w iff
/// alpha phi'' + beta phi' + (gamma - lambda) phi = 0.
CMat firstorder_matrix(const PointCoefficients& pc, cplx lambda);

/// Same, with the coefficient fields linearly interpolated at x.
CMat firstorder_matrix(const LinearizationCoefficients& co, double x, cplx lambda);

/// Period map of a wavetrain and its Floquet multipliers. The log-determinant
/// pair is Abel's identity: predicted from the integrated trace, actual from
/// the computed segment maps.
struct MonodromyResult {
  cplx lambda;
  CMat Pi;
  CVec multipliers;
  cplx log_det_predicted;
  cplx log_det_actual;
  std::vector<CMat> segments;  // Pi = segments.back() * ... * segments.front()
};

/// Coefficients of the linearization about a wavetrain, prepared once for
/// repeated monodromy and Bloch evaluations. The profile is first re-solved
/// by Fourier collocation on M_grid points.
class WavetrainSpectrum {
 public:
  struct Options {
    int M_grid = 0;        // Fourier points (bumped to odd); 0 picks the smallest
                           // of 129, 257, 513, 1025 resolving the profile
    int steps = 0;         // Magnus steps per period; 0 chooses automatically
    int segments = 32;     // period split for the stabilized period map
    bool polish = true;    // re-solve the profile on the Fourier grid
  };

  WavetrainSpectrum(const ModelSpec& m, const WaveProfile& profile, Options opts);
  WavetrainSpectrum(const ModelSpec& m, const WaveProfile& profile);
  /// From sampled coefficient fields (linear interpolation between samples).
  explicit WavetrainSpectrum(const LinearizationCoefficients& co, int steps = 2048, int segments = 32);

  double period() const { return L_; }
  int n_species() const { return n_; }
  int grid_points() const { return static_cast<int>(coeffs_.x.size()); }
  int steps() const { return steps_; }
  const WaveProfile& profile() const { return profile_; }
  bool has_profile() const { return has_profile_; }

  MonodromyResult monodromy(cplx lambda) const;

  /// log det(Pi(lambda) - e^{i gamma} I) from a block-bidiagonal (multiple
  /// shooting) factorization of the segment maps.
  cplx log_dispersion(cplx lambda, double gamma) const;
  cplx dispersion(cplx lambda, double gamma) const { return std::exp(log_dispersion(lambda, gamma)); }

  /// Bloch operator alpha (D + i k)^2 + beta (D + i k) + gamma on the Fourier
  /// grid, k = gamma_bloch / L. Requires a profile.
  CMat bloch_matrix(double gamma) const;

  /// Integral over one period of tr A(x, lambda) = -tr(alpha^{-1} beta).
  double trace_integral() const { return trace_integral_; }

  /// Coefficient fields on the Fourier grid (requires a profile).
  const LinearizationCoefficients& coefficients() const { return coeffs_; }

 private:
  void init_profile(const ModelSpec& m, const WaveProfile& profile, const Options& opts);
  void build_steps(int steps);
  CMat segment_map(int k, cplx lambda) const;

  int n_ = 0;
  double L_ = 0.0;
  int segments_ = 16;
  int steps_ = 0;
  bool has_profile_ = false;
  WaveProfile profile_;
  LinearizationCoefficients coeffs_;
  Mat D_;  // Fourier differentiation on the profile grid
  ModelSpec model_;
  // per step, at the two Gauss points: alpha^{-1}, alpha^{-1} beta, alpha^{-1} gamma
  std::vector<std::array<Mat, 6>> gauss_;
  double trace_integral_ = 0.0;
};

/// Stand-alone conveniences matching the per-call interface.
MonodromyResult monodromy(const ModelSpec& m, const WaveProfile& profile, cplx lambda);
cplx wavetrain_dispersion(const WavetrainSpectrum& ws, cplx lambda, double gamma);

struct BlochPoint {
  double gamma = 0.0;
  cplx lambda;
  CVec eigenfunction;
  std::string method;
};

/// The n_modes eigenvalues of largest real part of the Bloch matrix at each
/// gamma, matched into curves (kappa field of the curves holds gamma / L).
std::vector<SpectralCurve> bloch_matrix_spectrum(const WavetrainSpectrum& ws, const std::vector<double>& gamma_grid,
                                                 int n_modes = 40, double jump_tol = 0.1,
                                                 std::vector<std::string>* warnings = nullptr);

/// Bloch eigenpair at gamma closest to the shift.
BlochPoint bloch_eigenpair_near(const WavetrainSpectrum& ws, double gamma, cplx shift);

/// Curve of the matched Bloch-matrix spectrum that passes through lambda = 0 at gamma = 0.
SpectralCurve origin_curve_from_matrix(const std::vector<SpectralCurve>& curves);

/// Root lambda(gamma) of the dispersion relation continued from (0, 0) over
/// `gamma_grid` (sorted, starting with 0 and monotone in one direction).
/// kappa of the result holds gamma / L.
SpectralCurve trace_origin_curve(const WavetrainSpectrum& ws, const std::vector<double>& gamma_grid,
                                 double jump_tol = 0.1);

/// Uniform grid of n points on [0, gamma_max].
std::vector<double> gamma_grid(int n, double gamma_max);

/// 2 x (quadratic coefficient) of a least-squares fit of Re lambda against
/// kappa on |kappa| <= kappa_fit, the curve being mirrored by conjugation.
/// With degree 4 an even quartic term is fitted as well.
double sideband_curvature(const SpectralCurve& curve, double kappa_fit, int degree = 2, bool check_fit = true);

struct SidebandScan {
  double L_star = 0.0;
  std::vector<double> L;
  std::vector<double> curvature;
  int iterations = 0;
};

/// Curvature of the origin curve for the wavetrain of wavelength L, solved
/// from the guess profile (c free). Even quartic fit on |kappa| <= 0.5 / L
/// without the fit check, since the curvature vanishes at the threshold.
double sideband_curvature_at(const ModelSpec& m, const WaveProfile& guess, double L, int M_grid = 0);

/// Sign change of the curvature in L by safeguarded secant, to |dL| <= tol.
SidebandScan detect_sideband(const std::function<double(double)>& curvature, double L_lo, double L_hi,
                             double tol = 1e-3);

/// Same on a wavetrain branch: trial profiles are re-solved from the closest
/// point of the first branch segment that crosses the trial L.
SidebandScan detect_sideband(const ModelSpec& m, const WaveBranch& branch, double L_lo, double L_hi,
                             double tol = 1e-3, int M_grid = 0);

}  // namespace wavespec
