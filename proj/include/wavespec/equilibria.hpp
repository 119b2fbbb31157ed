#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavespec/model.hpp"
#include "wavespec/types.hpp"

namespace wavespec {

/// Homogeneous steady state f(u*, 0) = 0.
struct Equilibrium {
  Vec u;
  Params params;
  std::string label;
  bool parabolic = true;
  bool fold_degenerate = false;  // coalesced pair at a saddle-node
  std::string note;
  std::optional<double> max_re_lambda;
  std::optional<double> kappa_star;
};

/// Closed-form GSK states: (1, 0) always, (w+, v+) and (w-, v-) for A >= 4B^2.
std::vector<Equilibrium> gsk_equilibria(double A, double B);

/// Box [lo, hi] in state space for equilibrium searches.
struct SearchBox {
  Vec lo;
  Vec hi;
};

/// Newton from the first n_starts points of a Halton sequence in the box;
/// roots closer than 1e-6 are merged. Output sorted lexicographically.
std::vector<Equilibrium> find_equilibria(const ModelSpec& m, const SearchBox& box, int n_starts = 64);

/// A_sn = 4 B^2, where the vegetated GSK states are born.
double saddle_node_threshold(double B);

/// The GSK state with the given label, or nullopt.
std::optional<Equilibrium> gsk_state(double A, double B, const std::string& label);

}  // namespace wavespec
