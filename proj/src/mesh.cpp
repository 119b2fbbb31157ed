#include "wavespec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavespec/errors.hpp"
#include "wavespec/fourier.hpp"

namespace wavespec {

void MeshFunction::validate() const {
  if (nodes.size() < 8) throw InvalidArgument("mesh function needs at least 8 nodes");
  if (values.cols() != static_cast<Eigen::Index>(nodes.size())) {
    throw InvalidArgument("mesh function: value/node count mismatch");
  }
  for (size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) throw InvalidArgument("mesh nodes must be strictly increasing");
  }
  if (periodic && !(nodes.front() + period > nodes.back())) {
    throw InvalidArgument("periodic mesh must not store the right endpoint");
  }
}

bool MeshFunction::uniform(double rel_tol) const {
  const int n = size();
  if (n < 2) return true;
  const double span = periodic ? period : nodes.back() - nodes.front();
  const double h = periodic ? period / n : span / (n - 1);
  for (int i = 1; i < n; ++i) {
    if (std::abs(nodes[i] - nodes[i - 1] - h) > rel_tol * span) return false;
  }
  return true;
}

namespace {

// Locates x on the mesh: returns left index i and the right node position.
struct Bracket {
  int left;
  int right;
  double xl;
  double xr;
  double x;
};

Bracket locate(const MeshFunction& f, double x) {
  const int n = f.size();
  if (f.periodic) {
    const double x0 = f.nodes.front();
    x = x0 + std::fmod(std::fmod(x - x0, f.period) + f.period, f.period);
    if (x >= f.nodes.back()) return {n - 1, 0, f.nodes.back(), x0 + f.period, x};
  } else {
    x = std::clamp(x, f.nodes.front(), f.nodes.back());
  }
  auto it = std::upper_bound(f.nodes.begin(), f.nodes.end(), x);
  int i = static_cast<int>(it - f.nodes.begin()) - 1;
  i = std::clamp(i, 0, n - 2);
  return {i, i + 1, f.nodes[i], f.nodes[i + 1], x};
}

// Finite-difference weights for the first derivative at z (Fornberg).
std::vector<double> fd_weights(double z, const std::vector<double>& xs) {
  const int n = static_cast<int>(xs.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
  double c1 = 1.0, c4 = xs[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

}  // namespace

Vec MeshFunction::at(double x) const {
  const Bracket b = locate(*this, x);
  const double t = (b.x - b.xl) / (b.xr - b.xl);
  return (1.0 - t) * values.col(b.left) + t * values.col(b.right);
}

Vec hermite_at(const MeshFunction& f, const MeshFunction& df, double x) {
  const Bracket b = locate(f, x);
  const double h = b.xr - b.xl;
  const double t = (b.x - b.xl) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * f.values.col(b.left) + h10 * h * df.values.col(b.left) + h01 * f.values.col(b.right) +
         h11 * h * df.values.col(b.right);
}

MeshFunction differentiate(const MeshFunction& f) {
  f.validate();
  MeshFunction d = f;
  if (f.periodic && f.uniform()) {
    d.values = spectral_derivative(f.values, f.period, 1);
    return d;
  }
  const int n = f.size();
  const int half = 2;  // five-point stencils
  for (int i = 0; i < n; ++i) {
    std::vector<double> xs;
    std::vector<int> idx;
    if (f.periodic) {
      for (int o = -half; o <= half; ++o) {
        int j = i + o;
        double shift = 0.0;
        if (j < 0) {
          j += n;
          shift = -f.period;
        } else if (j >= n) {
          j -= n;
          shift = f.period;
        }
        xs.push_back(f.nodes[j] + shift);
        idx.push_back(j);
      }
    } else {
      const int start = std::clamp(i - half, 0, n - (2 * half + 1));
      for (int j = start; j < start + 2 * half + 1; ++j) {
        xs.push_back(f.nodes[j]);
        idx.push_back(j);
      }
    }
    const std::vector<double> w = fd_weights(f.nodes[i], xs);
    d.values.col(i).setZero();
    for (size_t k = 0; k < idx.size(); ++k) d.values.col(i) += w[k] * f.values.col(idx[k]);
  }
  return d;
}

MeshFunction uniform_periodic(const Mat& values, double period) {
  MeshFunction f;
  const int n = static_cast<int>(values.cols());
  f.nodes.resize(n);
  for (int i = 0; i < n; ++i) f.nodes[i] = period * i / n;
  f.values = values;
  f.periodic = true;
  f.period = period;
  return f;
}

std::string to_string(WaveKind kind) {
  switch (kind) {
    case WaveKind::wavetrain: return "wavetrain";
    case WaveKind::front: return "front";
    case WaveKind::pulse: return "pulse";
    case WaveKind::homogeneous: return "homogeneous";
  }
  return "unknown";
}

double WaveProfile::wavenumber() const {
  return length > 0.0 ? 2.0 * std::numbers::pi / length : 0.0;
}

WaveProfile with_second_derivative(WaveProfile profile) {
  if (!profile.uxx) profile.uxx = differentiate(profile.ux);
  return profile;
}

WaveProfile homogeneous_profile(const Vec& ustar, double length, int nodes, double speed) {
  WaveProfile p;
  p.kind = WaveKind::homogeneous;
  p.length = length;
  p.speed = speed;
  p.u = uniform_periodic(ustar.replicate(1, nodes), length);
  p.ux = uniform_periodic(Mat::Zero(ustar.size(), nodes), length);
  p.uxx = p.ux;
  p.trivial = true;
  return p;
}

}  // namespace wavespec
