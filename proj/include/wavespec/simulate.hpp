#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "wavespec/bloch.hpp"
#include "wavespec/mesh.hpp"
#include "wavespec/model.hpp"

namespace wavespec {

enum class TimeScheme { implicit_euler, tr_bdf2 };

/// Field on the uniform periodic grid x_i = i h, h = length / M, in the frame
/// x - c t.
struct SimState {
  double length = 0.0;
  Mat u;  // N x M
  double t = 0.0;
  double c = 0.0;
  double dt = 1e-3;

  int points() const { return static_cast<int>(u.cols()); }
  double h() const { return length / u.cols(); }
  double min_species(int k) const { return u.row(k).minCoeff(); }
};

struct SimOptions {
  TimeScheme scheme = TimeScheme::implicit_euler;
  double dt_min = 1e-9;
  double dt_max = 1.0;
  bool adaptive = true;        // grow or shrink dt by Newton performance
  double lte_tol = 0.0;        // > 0: step-doubling local error control
  double newton_tol = 1e-11;   // on the update, relative to 1 + max|u|
  int newton_max = 12;
  int positive_species = 0;    // must stay > 0; -1 disables the check
};

/// Conservative finite-volume right-hand side: face diffusion a((u_i + u_{i+1})/2),
/// central differences for the advection c u_x and for the gradient argument of f.
Mat semidiscrete_rhs(const ModelSpec& m, double c, const Mat& u, double length);

/// Jacobian of semidiscrete_rhs, unknowns ordered node by node (index i N + r).
SpMat semidiscrete_jacobian(const ModelSpec& m, double c, const Mat& u, double length);

/// Implicit integrator reusing one factorization of I - k J across Newton
/// iterations and steps until convergence slows down.
class Integrator {
 public:
  Integrator(ModelSpec m, SimOptions opts = {});
  ~Integrator();
  Integrator(Integrator&&) noexcept;
  Integrator& operator=(Integrator&&) noexcept;

  /// Advances by exactly dt, halving internally on Newton failure.
  void step(SimState& s, double dt);
  /// Advances to t_end with s.dt adapted as configured; the monitor is called
  /// after every accepted step.
  void advance(SimState& s, double t_end, const std::function<void(const SimState&)>& monitor = {});

  long steps() const { return steps_; }
  long factorizations() const { return factorizations_; }

 private:
  struct Cache;
  bool try_step(SimState& s, double dt, Mat& out, int& iters);
  bool implicit_solve(const SimState& s, double k, const Mat& b, Mat& u, int& iters);
  void check_positive(const SimState& s) const;

  ModelSpec m_;
  SimOptions opts_;
  std::unique_ptr<Cache> cache_;
  long steps_ = 0;
  long factorizations_ = 0;
};

/// One step of dt from s (fresh integrator).
SimState step(const ModelSpec& m, const SimState& s, double dt, const SimOptions& opts = {});

/// Travelling wave of the semidiscrete system: the wavetrain resampled on M
/// uniform points of one period and re-solved with the speed free, so the
/// base state of a growth experiment does not drift.
struct DiscreteWave {
  Mat u;  // N x M over one period
  double length = 0.0;
  double c = 0.0;
};
DiscreteWave discrete_wavetrain(const ModelSpec& m, const WaveProfile& profile, int M, double tol = 1e-11);

/// Base state and perturbation direction of a growth experiment on a
/// periodic domain.
struct GrowthSetup {
  Mat base;        // N x M
  Mat mode;        // Re of the eigenfunction on the grid
  double length = 0.0;
  double c = 0.0;
  int base_period_points = 0;  // translates of the base are multiples of h below this
  cplx predicted;  // eigenvalue of the mode
  double gamma = 0.0;
};

/// Homogeneous state with the most unstable Fourier mode at kappa; the domain
/// holds `periods` wavelengths 2 pi / kappa with points_per_period nodes each.
GrowthSetup homogeneous_setup(const ModelSpec& m, const Vec& ustar, double kappa, double c, int periods,
                              int points_per_period);

/// Wavetrain repeated `periods` times with the Bloch mode of largest real part
/// at gamma = 2 pi j / periods (so the mode is periodic on the domain).
GrowthSetup wavetrain_setup(const ModelSpec& m, const WavetrainSpectrum& ws, int periods, int j,
                            int points_per_period);

struct GrowthOptions {
  double epsilon = 1e-4;   // perturbation L2 norm relative to the base
  double T = 500.0;
  double dt = 0.05;
  TimeScheme scheme = TimeScheme::tr_bdf2;
  double record_every = 0.5;
  double window_top = 0.1; // fit window ends at window_top |base|
  bool stop_after_window = true;
  double stop_ratio = 0.0; // > 0: stop once q > stop_ratio q0
  std::function<void(const SimState&)> on_record;  // called at every record
};

struct GrowthHistory {
  std::vector<double> t;
  std::vector<double> q;
  std::vector<double> min_first;
};

struct GrowthResult {
  bool ok = false;        // fit window found
  double sigma = 0.0;
  double q0 = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  double max_ratio = 0.0; // max q / q0 over the run
  double min_first = 0.0; // min of the first species over the run
  std::string diagnostic;
  GrowthHistory history;
};

/// L2 distance of u to the nearest translate of the base (discrete shifts
/// refined by a parabola).
double orbital_distance(const Mat& u, const Mat& base, int base_period_points, double h);

/// Simulates base + epsilon Re(mode) and fits log q(t) on the window
/// q in [2 q0, window_top |base|].
GrowthResult growth_experiment(const ModelSpec& m, const GrowthSetup& setup, const GrowthOptions& opts = {});

}  // namespace wavespec
