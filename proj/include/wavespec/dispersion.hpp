#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wavespec/model.hpp"
#include "wavespec/types.hpp"

namespace wavespec {

/// A branch {(kappa_j, lambda_j)} of spectrum, matched across kappa.
struct SpectralCurve {
  std::string method;  // "fourier", "bloch_matrix", "monodromy"
  int branch = 0;
  std::vector<double> kappa;
  std::vector<cplx> lambda;
  std::vector<CVec> vectors;  // optional eigenvector samples
  std::string reference;
};

/// -a(u*) kappa^2 + i kappa (c I + d2 f) + d1 f, all at (u*, 0).
CMat dispersion_matrix(const ModelSpec& m, const Vec& ustar, double c, double kappa);

/// Matches eigenvalue sets sampled on a grid into continuous curves. Each
/// sample is assigned to the curve whose last value is nearest (minimal total
/// distance; ties broken by eigenvector overlap). A jump larger than
/// jump_tol * (1 + |lambda|) ends the curve and starts a new branch.
std::vector<SpectralCurve> match_curves(const std::vector<double>& grid, const std::vector<CVec>& values,
                                        const std::vector<CMat>& vectors, double jump_tol,
                                        const std::string& method, std::vector<std::string>* warnings = nullptr);

/// Eigenvalues of the dispersion matrix over kappa_grid, matched into curves.
std::vector<SpectralCurve> spectrum_homogeneous(const ModelSpec& m, const Vec& ustar, double c,
                                                const std::vector<double>& kappa_grid, double jump_tol = 0.1,
                                                std::vector<std::string>* warnings = nullptr);

/// Mirror image of the curves at -kappa (conjugated eigenvalues).
std::vector<SpectralCurve> conjugate_completion(const std::vector<SpectralCurve>& curves);

struct Growth {
  double max_re = 0.0;
  double kappa = 0.0;
  int branch = 0;
  cplx lambda;
};

/// Largest Re lambda over all samples, refined by a parabola through the
/// neighbouring samples of the same curve.
Growth max_growth(const std::vector<SpectralCurve>& curves);

/// Largest real part of the dispersion-matrix eigenvalues at a single kappa.
double growth_at(const ModelSpec& m, const Vec& ustar, double c, double kappa);

/// Default grid: n uniform points on [0, kmax].
std::vector<double> default_kappa_grid(int n = 1501, double kmax = 15.0);

/// A model and its homogeneous state as functions of a scalar parameter.
struct ModelFamily {
  std::function<ModelSpec(double theta)> model;
  std::function<Vec(double theta)> state;
};

/// GSK with A as parameter, following the (w+, v+) state.
ModelFamily gsk_plus_family(double B, double C, double D);

struct OnsetResult {
  double theta = 0.0;
  double kappa = 0.0;
  double im_lambda = 0.0;
  std::string flag;  // "turing_hopf" or "hopf_or_steady"
  int iterations = 0;
};

/// Bisection on theta -> max Re lambda until the bracket is below tol.
OnsetResult detect_turing_hopf(const ModelFamily& fam, double c, double theta_lo, double theta_hi, double tol,
                               const std::vector<double>& kappa_grid = default_kappa_grid());

/// Bisection on theta -> growth at a fixed kappa (neutral point for a given wavelength).
OnsetResult neutral_point(const ModelFamily& fam, double c, double kappa, double theta_lo, double theta_hi,
                          double tol = 1e-12);

}  // namespace wavespec
