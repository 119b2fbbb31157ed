#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wavespec/types.hpp"

namespace wavespec {

struct WaveProfile;

using Params = std::map<std::string, double>;

/// Quasilinear reaction-diffusion-advection system u_t = (a(u) u_x)_x + f(u, u_x).
///
/// Derivatives of the diffusion tensor are supplied in directional form:
/// `diffusion_jacobian(u, h)` is a'(u)[h] and `diffusion_hessian(u, h, k)`
/// is a''(u)[h, k], both N x N matrices. Immutable after construction.
struct ModelSpec {
  std::string name;
  int n_species = 0;
  Params params;

  std::function<Mat(const Vec& u)> diffusion;
  std::function<Mat(const Vec& u, const Vec& h)> diffusion_jacobian;
  std::function<Mat(const Vec& u, const Vec& h, const Vec& k)> diffusion_hessian;
  std::function<Vec(const Vec& u, const Vec& p)> reaction;
  std::function<Mat(const Vec& u, const Vec& p)> reaction_du;
  std::function<Mat(const Vec& u, const Vec& p)> reaction_dp;
  std::function<bool(const Vec& u)> domain_predicate;

  double param(const std::string& key) const;
};

/// Builds a model from its registered name and a full parameter map.
using ModelFactory = std::function<ModelSpec(const Params&)>;

/// Gray-Scott-Klausmeier vegetation model with porous-medium water diffusion:
/// a(w,v) = diag(2w, D), f = (C w_x + A(1-w) - w v^2, -B v + w v^2).
ModelSpec make_gsk(double A, double B, double C, double D);

/// Scalar test model a(u) = a0 + a1 u, f(u, p) = r0 + r1 u + r2 u^2 + r3 u^3 + b p.
struct ScalarCoefficients {
  double a0 = 1.0;
  double a1 = 0.0;
  double r0 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double b = 0.0;
};
ModelSpec make_scalar(const ScalarCoefficients& k);

/// Registry lookup: "gsk" (A, B, C, D) or "scalar" (a0, a1, r0..r3, b).
/// Missing keys take model defaults; unknown keys are rejected.
ModelSpec make_model(const std::string& name, const Params& params);

/// Same model with one parameter replaced.
ModelSpec with_param(const ModelSpec& m, const std::string& key, double value);

Mat eval_diffusion(const ModelSpec& m, const Vec& u);
Vec eval_reaction(const ModelSpec& m, const Vec& u, const Vec& p);

/// True iff the symmetric part of a(u) is positive definite and the model's
/// domain predicate holds.
bool check_parabolic(const ModelSpec& m, const Vec& u);

/// alpha, beta, gamma of the linearization L phi = alpha phi'' + beta phi' + gamma phi
/// at a single point of a profile with speed c.
struct PointCoefficients {
  Mat alpha;
  Mat beta;
  Mat gamma;
};
PointCoefficients linearize_at(const ModelSpec& m, const Vec& u, const Vec& ux, const Vec& uxx,
                               double c);

/// Coefficient fields sampled on the profile mesh (co-moving variable x = x_lab - c t).
struct LinearizationCoefficients {
  std::vector<double> x;
  std::vector<Mat> alpha;
  std::vector<Mat> beta;
  std::vector<Mat> gamma;
  double speed = 0.0;
  double period = 0.0;  // > 0 for periodic profiles
};

/// Requires second-derivative samples on the profile (see with_second_derivative).
LinearizationCoefficients linearization_coefficients(const ModelSpec& m, const WaveProfile& profile);

}  // namespace wavespec
