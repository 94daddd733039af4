#pragma once

// Reduction of the three-measure estimate
//   || M^alpha (f omega) ||_{L^p(nu)} <= A || f ||_{L^p(w omega)}
// to the two-measure form through g = w^(p'/p) f and mu = w^(-p'/p) omega.

#include <optional>
#include <span>

#include "mgmax/lattice.hpp"
#include "mgmax/operator.hpp"

namespace mgmax {

struct SawyerInstance {
  /// Tree shape and nu. The model's own mu is not used.
  DyadicModel model;
  LeafValues omega;
  /// Density of mu-tilde with respect to omega.
  LeafValues w;
  double alpha = 1.0;
  double p = 2.0;
};

struct Reduction {
  /// The instance's tree with mu = w^(-p'/p) omega and the original nu.
  DyadicModel reduced;
  /// omega(Q)^(-alpha).
  CoefficientFamily a;
  /// Per-leaf multiplier w^(p'/p) taking f to g.
  LeafValues transform;
  double p;
};

/// Throws InvalidInput for p <= 1, alpha outside (0, 1], negative masses or
/// densities, or a leaf with omega > 0 and w = 0 (mu would be infinite).
Reduction reduce_three_to_two(const SawyerInstance& inst);

LeafValues transform_function(const Reduction& red, std::span<const double> f);

/// M^alpha(f omega) on the instance: the classical coefficients over omega
/// applied with omega as the integrating measure.
LeafValues three_measure_operator(const SawyerInstance& inst, std::span<const double> f, Exponent q);

/// ||M^alpha(f omega)||_{L^p(nu)} / ||f||_{L^p(w omega)}.
double three_measure_ratio(const SawyerInstance& inst, std::span<const double> f, Exponent q);

/// ||M_a^q(g mu)||_{L^p(nu)} / ||g||_{L^p(mu)} on the reduced model.
double two_measure_ratio(const Reduction& red, std::span<const double> g, Exponent q);

struct ReductionReport {
  /// max over nodes of the relative gap between int_Q g dmu and int_Q f domega.
  double integral_error = 0.0;
  /// max over leaves of the relative gap between M_a^q(g mu) and M^alpha(f omega).
  double operator_error = 0.0;
  double norm_g = 0.0;  // ||g||_{L^p(mu)}
  double norm_f = 0.0;  // ||f||_{L^p(mu-tilde)}
  double norm_error = 0.0;
  bool holds = true;
};

ReductionReport verify_reduction(const SawyerInstance& inst, std::span<const double> f, Exponent q,
                                 double rel_tol = 1e-12);

struct TruncationGap {
  double max_gap = 0.0;
  std::optional<NodeIndex> worst_cube;
};

/// Largest relative gap, over cubes Q and atoms in Q, between
/// M_{a,Q}^inf(1_Q mu) and M_a^inf(1_Q mu) for the classical coefficients of
/// `omega_leaf`. Reported rather than assumed to vanish.
TruncationGap classical_truncation_gap(const DyadicModel& model, std::span<const double> omega_leaf,
                                       double alpha);

}  // namespace mgmax
