#pragma once

// The generalized martingale maximal operator
//
//   M_a^q f mu (x) = ( sum_{Q containing x} | (int_Q f dmu) a_Q(x) |^q )^(1/q)
//
// with the sup replacing the sum for q = inf, together with its cube and
// depth truncations.

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mgmax/exponent.hpp"
#include "mgmax/lattice.hpp"

namespace mgmax {

/// a_Q is either one constant on Q or one value per leaf of Q, listed in the
/// model's leaf order restricted to Q.
using Coefficient = std::variant<double, std::vector<double>>;

class CoefficientFamily {
 public:
  /// A family with every node unset.
  explicit CoefficientFamily(std::size_t node_count) : per_node_(node_count) {}

  static CoefficientFamily constant(const DyadicModel& model, double c);

  std::size_t size() const noexcept { return per_node_.size(); }
  void set(NodeIndex node, Coefficient c) { per_node_.at(node) = std::move(c); }
  const std::optional<Coefficient>& at(NodeIndex node) const { return per_node_.at(node); }

  /// a_Q evaluated at the leaf with global leaf position `leaf_pos`, which
  /// must lie under Q.
  double value(const DyadicModel& model, NodeIndex node, std::size_t leaf_pos) const;

  /// Throws InvalidInput on a missing node, a negative or non-finite value,
  /// or a per-leaf vector whose length does not match the node.
  void validate(const DyadicModel& model) const;

  CoefficientFamily scaled(double c) const;

 private:
  std::vector<std::optional<Coefficient>> per_node_;
};

struct NoTruncation {
  friend bool operator==(NoTruncation, NoTruncation) { return true; }
};
struct CubeTruncation {
  NodeIndex cube;
  friend bool operator==(CubeTruncation, CubeTruncation) = default;
};
struct DepthTruncation {
  std::size_t start_depth;
  friend bool operator==(DepthTruncation, DepthTruncation) = default;
};
using Truncation = std::variant<NoTruncation, CubeTruncation, DepthTruncation>;

struct MaximalOutput {
  LeafValues values;
  Exponent q;
  Truncation truncation;
};

MaximalOutput apply_maximal(const DyadicModel& model, const CoefficientFamily& a,
                            std::span<const double> f, Exponent q);

/// Only cubes R inside Q contribute; the output vanishes off Q.
MaximalOutput apply_truncated(const DyadicModel& model, const CoefficientFamily& a,
                              std::span<const double> f, Exponent q, NodeIndex cube);

/// Only cubes of depth >= start_depth contribute. start_depth must lie in
/// [0, max_depth]; 0 gives the full operator.
MaximalOutput apply_depth_truncated(const DyadicModel& model, const CoefficientFamily& a,
                                    std::span<const double> f, Exponent q, std::size_t start_depth);

/// The common engine: the operator summed over the nodes flagged in
/// `include` (indexed by node).
LeafValues apply_restricted(const DyadicModel& model, const CoefficientFamily& a,
                            std::span<const double> f, Exponent q, const std::vector<bool>& include);

/// Same as apply_restricted, with the integrals int_Q f dmu precomputed.
LeafValues apply_restricted_integrals(const DyadicModel& model, const CoefficientFamily& a,
                                      std::span<const double> integrals, Exponent q,
                                      const std::vector<bool>& include);

/// ell^q combination of nonnegative terms (max for q = inf), scaled so that
/// large q cannot overflow.
double combine_terms(std::span<const double> terms, Exponent q);

/// Scalar family omega(Q)^(-alpha) of the classical dyadic maximal operator.
/// Nodes with omega(Q) = 0 get coefficient 0. alpha must lie in (0, 1].
CoefficientFamily classical_coefficients(const DyadicModel& model, std::span<const double> omega_leaf,
                                         double alpha);

}  // namespace mgmax
