#pragma once

// Stopping-cube decomposition of a nonnegative function, the Carleson
// embedding check, and a numerical trace of the sufficiency argument for the
// two-weight bound, one inequality per link.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mgmax/lattice.hpp"
#include "mgmax/operator.hpp"
#include "mgmax/tolerance.hpp"

namespace mgmax {

/// The maximal strict descendants R of Q with mu(R) > 0 and
/// avg_R f >= r avg_Q f. Empty when avg_Q f = 0. f must be >= 0, r > 1.
std::vector<NodeIndex> stopping_children(const DyadicModel& model, std::span<const double> f, NodeIndex cube,
                                         double r);

struct StoppingDecomposition {
  double r = 0.0;
  std::size_t start_depth = 0;
  LeafValues f;
  /// generations[0] holds the nodes at start_depth (the roots by default).
  std::vector<std::vector<NodeIndex>> generations;
  /// All stopping cubes in generation order.
  std::vector<NodeIndex> cubes;
  /// Aligned with `cubes`: the stopping children of each cube and the
  /// members of its block E(Q).
  std::vector<std::vector<NodeIndex>> children;
  std::vector<std::vector<NodeIndex>> blocks;
  /// Per node: whether it is a stopping cube, and the cube whose block holds
  /// it (kNoNode above start_depth).
  std::vector<bool> is_stopping;
  std::vector<NodeIndex> owner;
};

/// Generations G_1 = nodes at start_depth, G_{n+1} = union of the stopping
/// children of G_n, iterated until empty. Throws InvalidInput for r <= 1,
/// negative f, or start_depth beyond the model's depth.
StoppingDecomposition build_decomposition(const DyadicModel& model, std::span<const double> f, double r,
                                          std::size_t start_depth = 0);

/// Blocks are disjoint, cover every node at depth >= start_depth, and each
/// block lies inside its cube.
bool blocks_partition(const DyadicModel& model, const StoppingDecomposition& d);

/// avg_R f <= r avg_Q f for every R in E(Q) with mu(R) > 0.
bool average_control(const DyadicModel& model, const StoppingDecomposition& d,
                     double rel_tol = kDefaultRelTol);

struct PackingReport {
  /// r / (r - 1).
  double bound = 0.0;
  /// max over Q with mu(Q) > 0 of sum_{R in G, R in Q} mu(R) / mu(Q).
  double worst_ratio = 0.0;
  std::optional<NodeIndex> worst_node;
  /// Per node: bound mu(Q) - sum_{R in G, R in Q} mu(R).
  std::vector<double> slack;
  std::size_t violations = 0;
  /// max over stopping cubes with positive average of
  /// r sum_{R in G*(Q)} mu(R) / mu(Q); at most 1.
  double worst_generation_ratio = 0.0;
  std::size_t generation_violations = 0;

  bool passed() const noexcept { return violations == 0 && generation_violations == 0; }
};

/// Violations are counted, not thrown.
PackingReport verify_packing(const DyadicModel& model, const StoppingDecomposition& d,
                             double rel_tol = kDefaultRelTol);

struct CarlesonSequence {
  std::vector<double> w;  // per node
  /// Smallest A with sum_{Q in R} w_Q <= A mu(R) for every R; +inf if some
  /// mu-null R carries weight.
  double packing_constant = 0.0;
};

/// Validates w >= 0 and computes its packing constant.
CarlesonSequence make_carleson_sequence(const DyadicModel& model, std::vector<double> w);

/// w_Q = mu(Q) on the stopping cubes, 0 elsewhere.
CarlesonSequence stopping_weights(const StoppingDecomposition& d, const DyadicModel& model);

struct CarlesonReport {
  double lhs = 0.0;  // sum_Q (avg_Q f)^p w_Q
  double rhs = 0.0;  // (p')^p A ||f||_p^p
  double packing_constant = 0.0;
  bool holds = true;
};

CarlesonReport carleson_embedding_check(const DyadicModel& model, const CarlesonSequence& w,
                                        std::span<const double> f, double p, double rel_tol = kDefaultRelTol);

enum class ProofLink {
  block_sum,    // ||(sum F_Q^q)^(1/q)||^p <= sum ||F_Q||^p
  block_bound,  // ||F_Q||^p <= r^p B^p (avg_Q f)^p mu(Q)
  carleson,     // sum (avg_Q f)^p mu(Q) <= r/(r-1) (p')^p ||f||^p
  combined,     // lhs <= r^(p+1)/(r-1) (p')^p B^p ||f||^p
  optimal_r,    // lhs <= (1+1/p)^(p+1) p (p')^p B^p ||f||^p at r = (p+1)/p
};

const char* link_name(ProofLink link);

struct LinkCheck {
  ProofLink link;
  double lhs = 0.0;
  double rhs = 0.0;
  bool applicable = true;
  bool holds = true;
};

struct BlockTrace {
  NodeIndex cube;
  LeafValues F;
  double norm_p = 0.0;  // ||F_Q||^p_{L^p(nu)}
  double bound = 0.0;   // r^p B^p (avg_Q f)^p mu(Q)
};

struct ProofTrace {
  double p = 0.0;
  Exponent q = Exponent::infinity();
  double r = 0.0;
  double B = 0.0;
  std::size_t start_depth = 0;
  StoppingDecomposition decomposition;
  std::vector<BlockTrace> blocks;

  double lhs = 0.0;             // ||M_a^{q,N} f mu||^p_{L^p(nu)}
  double block_sum = 0.0;       // sum_Q ||F_Q||^p
  double carleson_sum = 0.0;    // sum_Q (avg_Q f)^p mu(Q)
  double carleson_bound = 0.0;  // r/(r-1) (p')^p ||f||^p
  double final_bound = 0.0;     // r^(p+1)/(r-1) (p')^p B^p ||f||^p
  double optimal_bound = 0.0;   // (1+1/p)^(p+1) p (p')^p B^p ||f||^p

  /// max over leaves of the relative gap between (sum F_Q^q)^(1/q) and the
  /// depth-truncated operator.
  double reconstruction_error = 0.0;

  std::vector<LinkCheck> links;

  bool passed() const noexcept;
  std::optional<ProofLink> first_failure() const;
};

struct ProofOptions {
  /// Stopping parameter; empty selects (p + 1) / p.
  std::optional<double> r;
  std::size_t start_depth = 0;
  double rel_tol = kDefaultRelTol;
  /// Multiplies C(p) in the optimal-r link. Fault-injection hook.
  double cp_factor = 1.0;
};

/// Evaluates every quantity of the argument for one f >= 0 and checks the
/// five links. B is the testing constant of (model, a, p, q).
ProofTrace proof_trace(const DyadicModel& model, const CoefficientFamily& a, std::span<const double> f,
                       double p, Exponent q, double B, const ProofOptions& options = {});

/// Throws VerificationFailure naming the first failing link.
void require_chain(const ProofTrace& trace);

}  // namespace mgmax
