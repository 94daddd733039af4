#pragma once

#include <cstddef>
#include <cstdint>

#include "mgmax/lattice.hpp"

namespace mgmax {

enum class MassDistribution { uniform, exponential, lognormal };

struct RandomModelParams {
  std::size_t depth_min = 1;
  std::size_t depth_max = 4;
  std::size_t branch_min = 2;
  std::size_t branch_max = 3;
  std::size_t roots_min = 1;
  std::size_t roots_max = 1;
  /// Probability that a node above the target depth is split. The first
  /// child of every split node is always split, so the target depth is hit.
  double split_probability = 0.75;
  MassDistribution masses = MassDistribution::lognormal;
  double mu_zero_probability = 0.0;
  double nu_zero_probability = 0.0;
};

/// Deterministic in (params, seed). Node ids are "n0", "n1", ... in preorder.
/// Throws InvalidInput on empty or out-of-range parameter ranges.
DyadicModel random_model(const RandomModelParams& params, std::uint64_t seed);

}  // namespace mgmax
