#pragma once

// Constants of the two-weight characterization: the testing constant B, a
// certified lower bound for the operator norm A, and the upper constant
// C(p) with B <= A <= C(p) B.

#include <cstdint>
#include <optional>
#include <string>

#include "mgmax/lattice.hpp"
#include "mgmax/operator.hpp"
#include "mgmax/tolerance.hpp"

namespace mgmax {

/// C(p) = ((1 + 1/p)^(p+1) p)^(1/p) p'. Throws InvalidInput for p <= 1.
double theorem_constant(double p);

struct TestingResult {
  double value = 0.0;
  /// Cube attaining the max; smallest node index on ties. Empty when no
  /// node has positive mu-mass.
  std::optional<NodeIndex> witness;
};

/// B = max over cubes Q with mu(Q) > 0 of
///   || M_{a,Q}^q (1_Q mu) ||_{L^p(nu)} / mu(Q)^(1/p).
TestingResult testing_constant(const DyadicModel& model, const CoefficientFamily& a, double p, Exponent q);

/// ||M_a^q f mu||_{L^p(nu)} / ||f||_{L^p(mu)}; 0 when ||f||_{L^p(mu)} = 0.
double norm_ratio(const DyadicModel& model, const CoefficientFamily& a, std::span<const double> f,
                  double p, Exponent q);

struct SearchBudget {
  std::size_t random_candidates = 200;
  std::size_t ascent_rounds = 50;
  std::uint64_t seed = 0;
};

struct NormLowerBound {
  double value = 0.0;
  LeafValues witness;
  /// "indicator", "random" or "ascent".
  std::string origin;
  /// Set when the witness is a cube indicator.
  std::optional<NodeIndex> witness_cube;
};

/// Lower bound for A: the best ratio over all cube indicators, seeded random
/// nonnegative functions and a coordinate ascent from the best of those.
/// Throws InvalidInput if every candidate has zero mu-norm.
NormLowerBound operator_norm_lower(const DyadicModel& model, const CoefficientFamily& a, double p,
                                   Exponent q, const SearchBudget& budget = {});

struct VerifyOptions {
  double rel_tol = kDefaultRelTol;
  /// Multiplies C(p). Anything other than 1 is a fault-injection hook.
  double cp_factor = 1.0;
};

struct ConstantsReport {
  double p = 0.0;
  Exponent q = Exponent::infinity();
  double B = 0.0;
  double A_lower = 0.0;
  double C_p = 0.0;
  std::optional<NodeIndex> witness_cube;
  LeafValues witness_function;
  std::string witness_origin;
  /// A_lower - B and C_p B - A_lower.
  double lower_margin = 0.0;
  double upper_margin = 0.0;
  bool lower_holds = true;
  bool upper_holds = true;

  bool passed() const noexcept { return lower_holds && upper_holds; }
};

/// Computes B, A_lower and C(p) and checks B <= A_lower <= C(p) B within the
/// relative tolerance. When mu vanishes identically both constants are 0.
ConstantsReport verify_theorem(const DyadicModel& model, const CoefficientFamily& a, double p, Exponent q,
                               const SearchBudget& budget = {}, const VerifyOptions& options = {});

/// Throws VerificationFailure naming the failing side of the sandwich.
void require_sandwich(const ConstantsReport& report);

}  // namespace mgmax
