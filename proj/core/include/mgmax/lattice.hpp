#pragma once

// Finite atomic model of a filtered measure space: a rooted forest whose
// nodes are the cubes of the filtration and whose leaves are the atoms.
// Functions on X are leaf-constant and stored as one value per leaf.

#include <cstddef>
#include <limits>
#include <optional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgmax/exponent.hpp"

namespace mgmax {

using NodeIndex = std::size_t;
inline constexpr NodeIndex kNoNode = std::numeric_limits<NodeIndex>::max();

/// Values of a function per leaf atom, in the model's leaf order.
using LeafValues = std::vector<double>;

enum class Measure { mu, nu };

struct NodeSpec {
  std::string id;
  std::optional<std::string> parent;
  std::vector<std::string> children;
};

/// Tree description with leaf masses, as read from an instance file.
struct ModelSpec {
  std::vector<NodeSpec> nodes;
  std::map<std::string, double> mu;
  std::map<std::string, double> nu;
};

struct BuildOptions {
  /// Minimum number of children of a non-leaf node. 1 allows chains of
  /// nested cubes that cover the same atoms.
  std::size_t min_children = 2;
};

struct LeafRange {
  std::size_t begin;
  std::size_t end;
  std::size_t size() const noexcept { return end - begin; }
};

/// Immutable after construction. Node indices follow document order; leaves
/// are ordered by a preorder walk (roots in document order, children in the
/// listed order), so the leaves under any node form a contiguous range.
class DyadicModel {
 public:
  /// Validates and builds a model. Throws InvalidInput on duplicate ids,
  /// orphans, parent/child mismatches, cycles, negative or non-finite
  /// masses, missing leaf masses, or too few children.
  static DyadicModel build(const ModelSpec& spec, BuildOptions options = {});

  std::size_t node_count() const noexcept { return ids_.size(); }
  std::size_t leaf_count() const noexcept { return leaves_.size(); }
  std::size_t max_depth() const noexcept { return max_depth_; }

  const std::string& id(NodeIndex node) const;
  std::optional<NodeIndex> find(std::string_view id) const;
  /// Like find, but throws InvalidInput("unknown node id ...").
  NodeIndex index_of(std::string_view id) const;

  NodeIndex parent(NodeIndex node) const { return parent_.at(node); }
  std::span<const NodeIndex> children(NodeIndex node) const { return children_.at(node); }
  bool is_leaf(NodeIndex node) const { return children_.at(node).empty(); }
  std::size_t depth(NodeIndex node) const { return depth_.at(node); }

  std::span<const NodeIndex> roots() const noexcept { return roots_; }
  /// Leaf nodes in leaf order.
  std::span<const NodeIndex> leaves() const noexcept { return leaves_; }
  /// Position of a leaf node in leaf order.
  std::size_t leaf_position(NodeIndex leaf) const;
  LeafRange leaf_range(NodeIndex node) const { return leaf_range_.at(node); }

  /// All nodes in preorder.
  std::span<const NodeIndex> preorder() const noexcept { return preorder_; }
  /// The subtree of `node` (node first) as a slice of the preorder.
  std::span<const NodeIndex> subtree(NodeIndex node) const;
  /// True when `inner` is `outer` or one of its descendants.
  bool contains(NodeIndex outer, NodeIndex inner) const;

  double mass(NodeIndex node, Measure m) const;
  std::span<const double> leaf_masses(Measure m) const noexcept {
    return m == Measure::mu ? mu_leaf_ : nu_leaf_;
  }

  /// Same tree with new leaf masses.
  DyadicModel with_measures(LeafValues mu_leaf, LeafValues nu_leaf) const;

  ModelSpec to_spec() const;

  friend bool operator==(const DyadicModel& a, const DyadicModel& b) {
    return a.ids_ == b.ids_ && a.parent_ == b.parent_ && a.children_ == b.children_ &&
           a.mu_leaf_ == b.mu_leaf_ && a.nu_leaf_ == b.nu_leaf_;
  }

 private:
  DyadicModel() = default;
  void derive();

  std::vector<std::string> ids_;
  std::map<std::string, NodeIndex, std::less<>> index_;
  std::vector<NodeIndex> parent_;
  std::vector<std::vector<NodeIndex>> children_;
  std::vector<NodeIndex> roots_;

  std::vector<std::size_t> depth_;
  std::size_t max_depth_ = 0;
  std::vector<NodeIndex> preorder_;
  std::vector<std::size_t> preorder_pos_;
  std::vector<std::size_t> subtree_size_;
  std::vector<NodeIndex> leaves_;
  std::vector<std::size_t> leaf_pos_;  // per node; npos for internal nodes
  std::vector<LeafRange> leaf_range_;

  LeafValues mu_leaf_;
  LeafValues nu_leaf_;
  std::vector<double> mu_node_;
  std::vector<double> nu_node_;
};

/// Integral of f over the atoms under `node`.
double integrate(const DyadicModel& model, std::span<const double> f, NodeIndex node, Measure m);
double integrate(const DyadicModel& model, std::span<const double> f, std::string_view node, Measure m);

/// Integrals over every node at once, indexed by node.
std::vector<double> node_integrals(const DyadicModel& model, std::span<const double> f, Measure m);

/// Mean of f over `node`; 0 when the node has zero mass.
double average(const DyadicModel& model, std::span<const double> f, NodeIndex node, Measure m);
double average(const DyadicModel& model, std::span<const double> f, std::string_view node, Measure m);

/// (sum |g|^p mass)^(1/p), or the max of |g| over positive-mass atoms for
/// p = inf (0 if there are none). Throws InvalidInput for p < 1.
double lp_norm(const DyadicModel& model, std::span<const double> g, Exponent p, Measure m);

/// Indicator of the atoms under `node`.
LeafValues indicator(const DyadicModel& model, NodeIndex node);

}  // namespace mgmax
