#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wavespec/collocation.hpp"
#include "wavespec/continuation.hpp"
#include "wavespec/dispersion.hpp"
#include "wavespec/mesh.hpp"
#include "wavespec/model.hpp"

namespace wavespec {

/// Co-moving travelling-wave ODE as a first-order field: y = (u, u_x) ->
/// (u_x, a(u)^{-1}(-(a'(u)[u_x]) u_x - c u_x - f(u, u_x))). Frame x - c t.
Vec comoving_rhs(const ModelSpec& m, double c, const Vec& y);

enum class SpeedMode { known, free };

/// Tolerances for wavetrain collocation solves.
BvpOptions wavetrain_bvp_defaults();

/// Periodic wavetrain of wavelength L. With SpeedMode::free the speed is
/// solved for at fixed L; with SpeedMode::known the guess speed is kept and the
/// wavelength L is solved for instead (the family is one-dimensional). A
/// constant guess returns the equilibrium, flagged trivial.
WaveProfile solve_wavetrain(const ModelSpec& m, double L, const WaveProfile& guess, SpeedMode mode,
                            const BvpOptions& opts = wavetrain_bvp_defaults());

/// max_x of the first species.
double measure_max(const WaveProfile& p);
/// sqrt((1/L) int |u|^2 dx) over all species.
double measure_l2(const WaveProfile& p);

struct FoldPoint {
  double param = 0.0;
  int index = 0;  // branch point preceding the fold
  WaveProfile profile;
};

struct WaveBranch {
  std::string param = "L";  // continuation parameter: "L" or a model parameter
  std::vector<WaveProfile> profiles;
  std::vector<double> values;  // parameter value per point
  std::vector<double> L;
  std::vector<double> c;
  std::vector<double> s_max_w;
  std::vector<double> s_l2;
  std::vector<bool> fold_flag;
  std::vector<FoldPoint> folds;  // refined by the continuation
  bool truncated = false;
  std::string diagnostic;

  size_t size() const { return values.size(); }
};

struct BranchOptions {
  StepControl step;
  int chunk = 10;          // points between remeshing
  int max_points = 400;
  double min_first = 1e-4; // stop when min of the first species drops below
  BvpOptions bvp = wavetrain_bvp_defaults();
  std::function<void(const std::string&)> log;  // progress messages, optional
};

/// Pseudo-arclength continuation of wavetrains in `param` ("L" or a model
/// parameter) with c free, from a converged start towards increasing (dir > 0)
/// or decreasing parameter, stopping outside [lo, hi]. The mesh is adapted
/// every opts.chunk points.
WaveBranch continue_branch(const ModelSpec& m, const WaveProfile& start, const std::string& param, double lo,
                           double hi, int dir, const BranchOptions& opts = {});

/// Folds of the branch in its parameter: the events refined by the
/// continuation plus any sign change of the parameter increment not already
/// covered, refined by a parabola in arclength.
std::vector<FoldPoint> detect_fold(const WaveBranch& branch);

struct SeedResult {
  WaveProfile profile;
  OnsetResult neutral;
  WaveBranch path;  // continuation in the model parameter
};

/// Small-amplitude wavetrain of wavelength L off the neutral point of the
/// family at kappa = 2 pi / L, continued in the family parameter `key` to
/// theta_target. The neutral point is located by scanning [scan_lo, scan_hi].
SeedResult seed_wavetrain(const ModelFamily& fam, const std::string& key, double L, double theta_target,
                          double scan_lo, double scan_hi, double amplitude = 1e-2, const BranchOptions& opts = {});

/// GSK convenience: seed at wavelength L from the (w+, v+) neutral point, continued in A.
SeedResult gsk_seed_wavetrain(double A, double B, double C, double D, double L, const BranchOptions& opts = {});

/// Fourier-collocation re-solve of a wavetrain on M (odd) uniform points
/// over one period, speed free. The result carries spectral u_x and u_xx.
WaveProfile polish_spectral(const ModelSpec& m, const WaveProfile& profile, int M, double tol = 1e-11);

/// Max-norm residual of the co-moving equation of a uniform periodic profile,
/// evaluated with its trigonometric interpolant halfway between grid points.
double off_grid_residual(const ModelSpec& m, const WaveProfile& profile);

/// Translate of a periodic profile by delta (x -> x + delta) on the same mesh.
WaveProfile shifted(const WaveProfile& p, double delta);

}  // namespace wavespec
