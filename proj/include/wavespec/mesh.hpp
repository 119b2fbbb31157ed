#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavespec/model.hpp"
#include "wavespec/types.hpp"

namespace wavespec {

/// Vector-valued samples on a strictly increasing mesh. For periodic data the
/// right endpoint x_0 + period is not stored.
struct MeshFunction {
  std::vector<double> nodes;
  Mat values;  // rows = components, cols = nodes
  bool periodic = false;
  double period = 0.0;

  int size() const { return static_cast<int>(nodes.size()); }
  int dim() const { return static_cast<int>(values.rows()); }
  Vec column(int i) const { return values.col(i); }

  /// Throws InvalidArgument when the invariants are broken.
  void validate() const;

  /// Piecewise-linear interpolation (wraps around for periodic data).
  Vec at(double x) const;

  bool uniform(double rel_tol = 1e-12) const;
};

/// Cubic Hermite interpolation of f using its derivative samples df.
Vec hermite_at(const MeshFunction& f, const MeshFunction& df, double x);

/// Derivative of mesh data: spectral on uniform periodic meshes, fourth-order
/// finite differences otherwise.
MeshFunction differentiate(const MeshFunction& f);

MeshFunction uniform_periodic(const Mat& values, double period);

enum class WaveKind { wavetrain, front, pulse, homogeneous };

std::string to_string(WaveKind kind);

/// Travelling-wave profile in the co-moving frame x - c t.
struct WaveProfile {
  WaveKind kind = WaveKind::wavetrain;
  double length = 0.0;  // wavelength L for wavetrains, window length otherwise
  double speed = 0.0;
  MeshFunction u;
  MeshFunction ux;
  std::optional<MeshFunction> uxx;
  Params params;
  bool trivial = false;

  int n_species() const { return u.dim(); }
  double wavenumber() const;
  double frequency() const { return speed * wavenumber(); }
};

/// Fills uxx from ux when missing.
WaveProfile with_second_derivative(WaveProfile profile);

/// Constant profile at an equilibrium, sampled on a uniform periodic mesh.
WaveProfile homogeneous_profile(const Vec& ustar, double length, int nodes, double speed = 0.0);

}  // namespace wavespec
