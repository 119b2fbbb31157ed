#include "wavespec/equilibria.hpp"

#include <algorithm>
#include <cmath>

#include "wavespec/errors.hpp"
#include "wavespec/newton.hpp"

namespace wavespec {

namespace {

Equilibrium make_state(double w, double v, double A, double B, const std::string& label) {
  Equilibrium e;
  e.u = Vec(2);
  e.u << w, v;
  e.params = {{"A", A}, {"B", B}};
  e.label = label;
  e.parabolic = w > 0.0;
  return e;
}

double radical_inverse(int i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

double saddle_node_threshold(double B) {
  if (B < 0.0) throw InvalidArgument("saddle_node_threshold: B must be nonnegative");
  return 4.0 * B * B;
}

std::vector<Equilibrium> gsk_equilibria(double A, double B) {
  if (A < 0.0 || B < 0.0) throw InvalidArgument("gsk_equilibria: A and B must be nonnegative");
  std::vector<Equilibrium> out;
  out.push_back(make_state(1.0, 0.0, A, B, "desert"));
  if (B == 0.0) {
    out.back().note = "B = 0: vegetated states degenerate (division by 2B)";
    return out;
  }
  if (A == 0.0 || A < saddle_node_threshold(B)) return out;
  const double disc = std::max(0.0, A * (A - saddle_node_threshold(B)));
  const double sq = std::sqrt(disc);
  if (sq / A < 1e-8) {
    Equilibrium e = make_state(0.5, A / (2.0 * B), A, B, "plus");
    e.fold_degenerate = true;
    e.note = "saddle-node: w+ and w- coalesce";
    out.push_back(e);
    return out;
  }
  out.push_back(make_state((A - sq) / (2.0 * A), (A + sq) / (2.0 * B), A, B, "plus"));
  out.push_back(make_state((A + sq) / (2.0 * A), (A - sq) / (2.0 * B), A, B, "minus"));
  return out;
}

std::optional<Equilibrium> gsk_state(double A, double B, const std::string& label) {
  for (auto& e : gsk_equilibria(A, B))
    if (e.label == label) return e;
  return std::nullopt;
}

std::vector<Equilibrium> find_equilibria(const ModelSpec& m, const SearchBox& box, int n_starts) {
  const int n = m.n_species;
  if (box.lo.size() != n || box.hi.size() != n) throw InvalidArgument("find_equilibria: box dimension mismatch");
  if (n > static_cast<int>(std::size(kPrimes))) throw InvalidArgument("find_equilibria: too many species");
  const Vec zero = Vec::Zero(n);
  VecFn F = [&](const Vec& u) { return m.reaction(u, zero); };
  MatFn J = [&](const Vec& u) { return m.reaction_du(u, zero); };
  NewtonOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 60;

  std::vector<Vec> roots;
  for (int k = 1; k <= n_starts; ++k) {
    Vec x0(n);
    for (int d = 0; d < n; ++d) x0(d) = box.lo(d) + radical_inverse(k, kPrimes[d]) * (box.hi(d) - box.lo(d));
    Vec r;
    try {
      r = newton_solve(F, J, x0, opts).x;
    } catch (const Error&) {
      continue;
    }
    if (!r.allFinite() || F(r).lpNorm<Eigen::Infinity>() > 1e-10) continue;
    bool dup = false;
    for (const Vec& q : roots) dup = dup || (q - r).norm() < 1e-6;
    if (!dup) roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  std::vector<Equilibrium> out;
  for (size_t i = 0; i < roots.size(); ++i) {
    Equilibrium e;
    e.u = roots[i];
    e.params = m.params;
    e.label = "state" + std::to_string(i);
    e.parabolic = check_parabolic(m, roots[i]);
    if (!e.parabolic) e.note = "outside the parabolic region";
    out.push_back(e);
  }
  return out;
}

}  // namespace wavespec
