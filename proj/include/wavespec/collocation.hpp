#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wavespec/mesh.hpp"
#include "wavespec/types.hpp"

namespace wavespec {

/// Right-hand side dy/ds = g(s, y, p) of a periodic problem on s in [0, 1).
struct PeriodicBvpFunctions {
  int dim = 0;
  std::function<Vec(double s, const Vec& y, const Vec& p)> rhs;
  /// Optional analytic dg/dy; central differences otherwise.
  std::function<Mat(double s, const Vec& y, const Vec& p)> rhs_dy;
};

/// Per-interval Jacobian blocks of the collocation equations
/// E1 = y_j - y_i - h/6 (g_i + 4 g_m + g_j), E2 = y_m - (y_i + y_j)/2 - h/8 (g_i - g_j)
/// with respect to y_i, y_m, y_j (dE2/dy_m = I) and the free parameters.
struct IntervalBlocks {
  Mat A1i, A1m, A1j;
  Mat A2i, A2j;
  Mat d1, d2;
};

struct StructuredJacobian {
  int n = 0;   // ODE dimension
  int M = 0;   // intervals
  int nf = 0;  // free parameters
  std::vector<IntervalBlocks> blocks;
  Mat border;  // extra rows (phase condition) over all unknowns, size + nf columns

  int size() const { return 2 * M * n; }
  SpMat to_sparse() const;
};

/// Direct solver for a structured collocation Jacobian with additional dense
/// border rows: midpoints are condensed, then the periodic chain is eliminated
/// block by block with partial pivoting, leaving a small dense system for the
/// wrap-around node and the parameters. Cost O(M n^3).
class BorderedSolver {
 public:
  /// `extra` rows are appended below J.border; the total must be square.
  BorderedSolver(const StructuredJacobian& J, const Mat& extra = Mat());
  bool ok() const { return ok_; }
  /// Solves J x = rhs (rhs in equation order: collocation rows, border, extra).
  Vec solve(const Vec& rhs) const;

 private:
  int n_ = 0, M_ = 0, nf_ = 0, K_ = 0, nb_ = 0;
  bool ok_ = false;
  std::vector<IntervalBlocks> blk_;
  std::vector<Mat> Cm_;               // border coefficients on midpoints, per interval
  std::vector<Mat> T_;                // row transforms per step
  std::vector<Mat> Ujj_, Ujn_, Ujb_;  // pivot rows per step
  std::vector<Mat> E_;                // border multipliers per step
  Eigen::PartialPivLU<Mat> final_;
};

/// Three-point Lobatto (Hermite-Simpson) collocation of a periodic BVP,
/// fourth order at the mesh nodes. Unknowns are node values y_i followed by
/// midpoint values y_{i+1/2}, interleaved per interval; the right endpoint is
/// identified with s = 0. An optional integral phase condition
/// int <y - y_ref, y_ref'> ds = 0 is appended as the last equation.
class CollocationSystem {
 public:
  CollocationSystem(PeriodicBvpFunctions f, std::vector<double> breakpoints);

  int dim() const { return f_.dim; }
  int intervals() const { return static_cast<int>(mesh_.size()) - 1; }
  int size() const { return 2 * intervals() * dim(); }
  const std::vector<double>& mesh() const { return mesh_; }
  const PeriodicBvpFunctions& functions() const { return f_; }

  int node_offset(int i) const { return 2 * i * dim(); }
  int mid_offset(int i) const { return (2 * i + 1) * dim(); }

  void set_phase_reference(const Vec& Yref, const Vec& p);
  void clear_phase_reference() { phase_ = false; }
  bool has_phase() const { return phase_; }
  int equations() const { return size() + (phase_ ? 1 : 0); }

  Vec residual(const Vec& Y, const Vec& p) const;

  /// Jacobian with respect to Y and the parameters listed in `free`
  /// (columns appended in that order).
  SpMat jacobian(const Vec& Y, const Vec& p, const std::vector<int>& free) const;
  StructuredJacobian structured_jacobian(const Vec& Y, const Vec& p, const std::vector<int>& free) const;

  /// Unknown vector from a callable y(s).
  Vec discretize(const std::function<Vec(double)>& y) const;

  /// Collocation polynomial (cubic Hermite) and its s-derivative at s.
  Vec sample(const Vec& Y, const Vec& p, double s) const;
  Vec sample_derivative(const Vec& Y, const Vec& p, double s) const;

  /// Max-norm defect |u' - g(s, u)| of the collocation polynomial at the
  /// quarter points of every interval.
  std::vector<double> defects(const Vec& Y, const Vec& p) const;

  /// Breakpoints equidistributing the local error density, with `intervals` cells.
  std::vector<double> equidistributed_mesh(const Vec& Y, const Vec& p, int intervals) const;

  /// Interval count that brings the defect down to `target`, clipped to [lo, hi].
  int suggested_intervals(const Vec& Y, const Vec& p, double target, int lo, int hi) const;

 private:
  struct Local {
    int interval;
    double t;
    double h;
  };
  Local locate(double s) const;
  Mat dgdy(double s, const Vec& y, const Vec& p) const;
  double point_s(int k) const;  // k even: node k/2, odd: midpoint

  PeriodicBvpFunctions f_;
  std::vector<double> mesh_;
  bool phase_ = false;
  Vec ref_;        // reference unknowns
  Vec ref_deriv_;  // y_ref' at nodes and midpoints, same layout
};

struct BvpOptions {
  double tol = 1e-9;   // Newton residual, max-norm
  int max_iter = 40;
  bool adapt = true;
  double defect_tol = 1e-6;
  int min_intervals = 16;
  int max_intervals = 4000;
  int max_adapt = 4;
};

struct CollocationSolution {
  Vec Y;
  Vec p;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

/// Newton iteration on the square system (equations == size + free.size()).
/// Throws FoldProximityError for a singular Jacobian and ConvergenceError
/// (with the residual history) on divergence.
CollocationSolution newton_collocation(const CollocationSystem& sys, Vec Y, Vec p,
                                       const std::vector<int>& free, const BvpOptions& opts);

/// Periodic orbit of y' = rhs(x, y, mu) with period L, as mesh functions over [0, L).
struct PeriodicBvpResult {
  MeshFunction y;
  MeshFunction dy;
  std::optional<double> mu;
  double residual = 0.0;
  double max_defect = 0.0;
  int iterations = 0;
};

/// Solves the periodic BVP from a guess. With `mu0` given, mu is an unknown
/// and the integral phase condition against the guess is imposed (autonomous
/// problems); without it, the system is solved for y alone.
PeriodicBvpResult solve_periodic_bvp(const std::function<Vec(double x, const Vec& y, double mu)>& rhs,
                                     double period, const MeshFunction& guess,
                                     std::optional<double> mu0, const BvpOptions& opts = {});

}  // namespace wavespec
