#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mgmax/lattice.hpp"
#include "mgmax/operator.hpp"
#include "mgmax/random_model.hpp"
#include "mgmax/rng.hpp"

namespace mgmax::testing {

/// Q0 -> (L1, L2) with the given masses.
inline DyadicModel make_e1(double mu1 = 1, double mu2 = 1, double nu1 = 1, double nu2 = 1) {
  ModelSpec spec;
  spec.nodes = {{"Q0", std::nullopt, {"L1", "L2"}}, {"L1", "Q0", {}}, {"L2", "Q0", {}}};
  spec.mu = {{"L1", mu1}, {"L2", mu2}};
  spec.nu = {{"L1", nu1}, {"L2", nu2}};
  return DyadicModel::build(spec);
}

inline DyadicModel make_single_leaf(double mu, double nu) {
  ModelSpec spec;
  spec.nodes = {{"L", std::nullopt, {}}};
  spec.mu = {{"L", mu}};
  spec.nu = {{"L", nu}};
  return DyadicModel::build(spec);
}

/// Small random forests with some null atoms, for property tests.
inline DyadicModel random_small_model(std::uint64_t seed, std::size_t depth_max = 4, std::size_t branch_max = 3) {
  RandomModelParams params;
  params.depth_min = 1;
  params.depth_max = depth_max;
  params.branch_min = 2;
  params.branch_max = branch_max;
  params.roots_max = 2;
  params.mu_zero_probability = 0.1;
  params.nu_zero_probability = 0.1;
  return random_model(params, seed);
}

inline LeafValues random_nonnegative(std::size_t n, Rng& rng, double zero_probability = 0.2) {
  LeafValues f(n);
  for (double& x : f) x = uniform01(rng) < zero_probability ? 0.0 : std::exp(4.0 * uniform01(rng) - 2.0);
  return f;
}

/// Mixed scalar / per-leaf nonnegative coefficients.
inline CoefficientFamily random_coefficients(const DyadicModel& model, Rng& rng) {
  CoefficientFamily a(model.node_count());
  for (NodeIndex v = 0; v < model.node_count(); ++v) {
    if (uniform01(rng) < 0.5) {
      a.set(v, std::exp(2.0 * uniform01(rng) - 1.0));
    } else {
      a.set(v, random_nonnegative(model.leaf_range(v).size(), rng, 0.1));
    }
  }
  return a;
}

/// Operator straight from the definition: for each atom x, every cube that
/// contains it, with the integral summed over the atoms of that cube.
inline LeafValues naive_maximal(const DyadicModel& model, const CoefficientFamily& a, const LeafValues& f,
                                Exponent q, const std::vector<bool>& include) {
  const auto leaves = model.leaves();
  const auto mu = model.leaf_masses(Measure::mu);
  LeafValues out(leaves.size(), 0.0);
  for (std::size_t x = 0; x < leaves.size(); ++x) {
    double acc = 0.0;
    for (NodeIndex cube = 0; cube < model.node_count(); ++cube) {
      if (!include[cube] || !model.contains(cube, leaves[x])) continue;
      double integral = 0.0;
      for (std::size_t y = 0; y < leaves.size(); ++y) {
        if (model.contains(cube, leaves[y])) integral += f[y] * mu[y];
      }
      const double t = std::abs(integral) * a.value(model, cube, x);
      acc = q.is_infinite() ? std::max(acc, t) : acc + std::pow(t, q.value());
    }
    out[x] = q.is_infinite() ? acc : std::pow(acc, 1.0 / q.value());
  }
  return out;
}

inline bool all_close(const LeafValues& a, const LeafValues& b, double rel) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > rel * std::max({std::abs(a[k]), std::abs(b[k]), 1e-300})) return false;
  }
  return true;
}

}  // namespace mgmax::testing
