#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "wavespec/equilibria.hpp"
#include "wavespec/errors.hpp"
#include "wavespec/mesh.hpp"
#include "wavespec/model.hpp"
#include "wavespec/wavetrain.hpp"

namespace wst {

using namespace wavespec;

constexpr double kB = 0.2, kC = 0.2, kD = 0.001;
constexpr double kWaveA = 0.02;

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline Vec gsk_plus(double A, double B = kB) { return gsk_state(A, B, "plus")->u; }

/// GSK wavetrain at A = 0.02 seeded at L = 6 and re-solved at L, cached per process.
inline const WaveProfile& gsk_wavetrain(double L) {
  static std::mutex mu;
  static std::map<double, WaveProfile> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(L);
  if (it != cache.end()) return it->second;
  if (cache.find(6.0) == cache.end())
    cache[6.0] = gsk_seed_wavetrain(kWaveA, kB, kC, kD, 6.0).profile;
  if (L != 6.0) cache[L] = solve_wavetrain(make_gsk(kWaveA, kB, kC, kD), L, cache[6.0], SpeedMode::free);
  return cache[L];
}

/// Smooth periodic two-species profile with analytic derivatives (not a solution).
inline WaveProfile synthetic_profile(double L, int nodes, double c) {
  WaveProfile p;
  p.kind = WaveKind::wavetrain;
  p.length = L;
  p.speed = c;
  const double k = 2.0 * M_PI / L;
  MeshFunction u, ux, uxx;
  for (MeshFunction* f : {&u, &ux, &uxx}) {
    f->values.resize(2, nodes);
    f->periodic = true;
    f->period = L;
  }
  for (int i = 0; i < nodes; ++i) {
    const double x = L * i / nodes;
    for (MeshFunction* f : {&u, &ux, &uxx}) f->nodes.push_back(x);
    u.values.col(i) << 0.5 + 0.2 * std::sin(k * x), 1.0 + 0.3 * std::cos(2 * k * x);
    ux.values.col(i) << 0.2 * k * std::cos(k * x), -0.6 * k * std::sin(2 * k * x);
    uxx.values.col(i) << -0.2 * k * k * std::sin(k * x), -1.2 * k * k * std::cos(2 * k * x);
  }
  p.u = u;
  p.ux = ux;
  p.uxx = uxx;
  return p;
}

}  // namespace wst
