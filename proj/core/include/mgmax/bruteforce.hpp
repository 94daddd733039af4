#pragma once

// Exhaustive grid oracle for the operator norm on tiny models. It evaluates
// the operator straight from its definition and shares no code path with
// apply_maximal or operator_norm_lower.

#include <cstddef>

#include "mgmax/lattice.hpp"
#include "mgmax/operator.hpp"

namespace mgmax {

struct BruteforceOptions {
  /// Grid steps per coordinate. Rounded up to a power of two so that the
  /// grids of increasing resolution are nested.
  std::size_t resolution = 100;
  /// Re-evaluate the final witness with exact rational integrals and
  /// 50-digit powers.
  bool exact_refinement = true;
  std::size_t max_leaves = 4;
};

struct BruteforceResult {
  double value = 0.0;
  LeafValues witness;
  std::size_t grid_denominator = 0;
};

/// Max of ||M f||_{L^p(nu)} / ||f||_{L^p(mu)} over a grid on the nonnegative
/// unit sphere of L^p(mu), refined by pairwise mass transfers from the best
/// point of every nested grid level. Nondecreasing in the resolution.
/// Throws InvalidInput for models with more than max_leaves leaves or no
/// mu-mass.
BruteforceResult operator_norm_bruteforce(const DyadicModel& model, const CoefficientFamily& a, double p,
                                          Exponent q, const BruteforceOptions& options = {});

/// The ratio evaluated from the definition with exact rational integrals and
/// 50-digit powers. Used for the exact refinement and as a test oracle.
double precise_norm_ratio(const DyadicModel& model, const CoefficientFamily& a, std::span<const double> f,
                          double p, Exponent q);

}  // namespace mgmax
