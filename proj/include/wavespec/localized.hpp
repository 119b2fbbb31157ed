#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavespec/dispersion.hpp"
#include "wavespec/mesh.hpp"
#include "wavespec/model.hpp"

namespace wavespec {

enum class Side { minus, plus };

/// Constant-coefficient limit of the spectral ODE at one end of a front or pulse.
struct AsymptoticPencil {
  Side side = Side::minus;
  Vec state;
  PointCoefficients coeffs;

  /// Companion matrix A(+-inf, lambda), as firstorder_matrix.
  CMat at(cplx lambda) const;
  /// Spatial eigenvalues (eigenvalues of at(lambda)).
  CVec spatial_eigenvalues(cplx lambda) const;
};

AsymptoticPencil asymptotic_pencil(const ModelSpec& m, const Vec& state, double c, Side side);

struct EssentialBoundary {
  std::vector<SpectralCurve> minus;
  std::vector<SpectralCurve> plus;
  bool pulse = false;  // equal limits: the curves are the essential spectrum itself
};

/// Dispersion curves of both asymptotic states in the frame of speed c.
EssentialBoundary essential_boundary(const ModelSpec& m, const Vec& u_minus, const Vec& u_plus, double c,
                                     const std::vector<double>& kappa_grid);

/// Morse indices (spatial eigenvalues with Re > 0) of both limits and the
/// Fredholm index i_plus(+inf) - i_plus(-inf) when both sides are hyperbolic.
struct MorseFredholm {
  int i_minus = 0;
  int i_plus = 0;
  bool hyperbolic_minus = false;
  bool hyperbolic_plus = false;
  bool fredholm = false;
  int index = 0;
  bool boundary_ambiguous = false;  // some spatial eigenvalue within axis_tol of the axis
};

MorseFredholm morse_fredholm(const AsymptoticPencil& minus, const AsymptoticPencil& plus, cplx lambda,
                             double axis_tol = 1e-10);

struct EvansOptions {
  std::optional<Vec> u_minus;  // limits; default: end values of the profile
  std::optional<Vec> u_plus;
  double decay_tol = 1e-8;     // window ends where |u - limit| <= decay_tol
  double step = 0.01;          // Magnus step
};

struct EvansResult {
  cplx value;
  int dim_unstable = 0;          // dimension of the unstable subspace at -inf
  double x_match = 0.0;          // matching point
  bool basis_degenerate = false; // spatial eigenvalues nearly collide at an end
};

/// Evans function of a front or pulse: the unstable subspace of A(-inf, lambda)
/// and the stable subspace of A(+inf, lambda), spanned by eigenvectors scaled
/// with unit largest u-component, are carried to the matching point with stepwise
/// QR and combined in a determinant. Exponential growth along the window is
/// divided out, so the value does not depend on the window length.
EvansResult evans_function(const ModelSpec& m, const WaveProfile& profile, cplx lambda,
                           const EvansOptions& opts = {});

/// Points on the circle |lambda - center| = radius, counterclockwise.
std::vector<cplx> circle_contour(cplx center, double radius, int n);

/// Winding number of sampled values of a function along a closed contour.
int winding_number(const std::vector<cplx>& values);

/// Test fixture (not a GSK object): bistable Nagumo equation
/// u_t = u_xx + u (1 - u)(u - a) as a scalar model, with its exact front
/// u = 1 / (1 + exp(x / sqrt 2)) of speed c = sqrt 2 (1/2 - a) in the frame
/// x - c t, sampled on [-X, X].
struct FrontFixture {
  ModelSpec model;
  WaveProfile profile;
};

FrontFixture nagumo_front_fixture(double a, double X = 30.0, int nodes = 1201);

}  // namespace wavespec
