#include "mgmax/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mgmax/error.hpp"

namespace mgmax {

namespace {

constexpr std::size_t kNpos = std::numeric_limits<std::size_t>::max();

void check_mass(const std::string& id, double v) {
  if (!std::isfinite(v)) throw InvalidInput("non-finite mass at '" + id + "'");
  if (v < 0.0) throw InvalidInput("negative mass at '" + id + "'");
}

}  // namespace

DyadicModel DyadicModel::build(const ModelSpec& spec, BuildOptions options) {
  DyadicModel m;
  const std::size_t n = spec.nodes.size();
  if (n == 0) throw InvalidInput("model has no nodes");

  m.ids_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& id = spec.nodes[i].id;
    if (id.empty()) throw InvalidInput("empty node id");
    if (!m.index_.emplace(id, i).second) throw InvalidInput("duplicate id '" + id + "'");
    m.ids_.push_back(id);
  }

  m.parent_.assign(n, kNoNode);
  m.children_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = spec.nodes[i];
    if (node.parent) {
      auto it = m.index_.find(*node.parent);
      if (it == m.index_.end()) {
        throw InvalidInput("orphan node '" + node.id + "': unknown parent '" + *node.parent + "'");
      }
      m.parent_[i] = it->second;
    }
    std::set<NodeIndex> seen;
    for (const auto& c : node.children) {
      auto it = m.index_.find(c);
      if (it == m.index_.end()) {
        throw InvalidInput("orphan node: '" + node.id + "' lists unknown child '" + c + "'");
      }
      if (!seen.insert(it->second).second) {
        throw InvalidInput("node '" + node.id + "' lists child '" + c + "' twice");
      }
      m.children_[i].push_back(it->second);
    }
  }

  // Parent links and child lists must describe the same edges.
  for (std::size_t i = 0; i < n; ++i) {
    for (NodeIndex c : m.children_[i]) {
      if (m.parent_[c] != i) {
        throw InvalidInput("inconsistent parent link: '" + m.ids_[i] + "' lists '" + m.ids_[c] +
                           "' as child");
      }
    }
    if (m.parent_[i] != kNoNode) {
      const auto& sib = m.children_[m.parent_[i]];
      if (std::find(sib.begin(), sib.end(), i) == sib.end()) {
        throw InvalidInput("inconsistent parent link: '" + m.ids_[i] + "' not listed by its parent");
      }
    } else {
      m.roots_.push_back(i);
    }
  }
  if (m.roots_.empty()) throw InvalidInput("cycle detected: no root");

  for (std::size_t i = 0; i < n; ++i) {
    const auto k = m.children_[i].size();
    if (k > 0 && k < options.min_children) {
      throw InvalidInput("node '" + m.ids_[i] + "' has " + std::to_string(k) +
                         " children, fewer than the minimum " + std::to_string(options.min_children));
    }
  }

  m.derive();  // throws on cycles (nodes unreachable from the roots)

  m.mu_leaf_.assign(m.leaves_.size(), 0.0);
  m.nu_leaf_.assign(m.leaves_.size(), 0.0);
  auto fill = [&](const std::map<std::string, double>& masses, LeafValues& out, const char* name) {
    for (const auto& [id, v] : masses) {
      auto it = m.index_.find(id);
      if (it == m.index_.end()) throw InvalidInput(std::string(name) + " mass for unknown node '" + id + "'");
      if (!m.is_leaf(it->second)) {
        throw InvalidInput(std::string(name) + " mass given for non-leaf '" + id + "'");
      }
      check_mass(id, v);
      out[m.leaf_pos_[it->second]] = v;
    }
    for (NodeIndex leaf : m.leaves_) {
      if (!masses.contains(m.ids_[leaf])) {
        throw InvalidInput(std::string("missing ") + name + " mass for leaf '" + m.ids_[leaf] + "'");
      }
    }
  };
  fill(spec.mu, m.mu_leaf_, "mu");
  fill(spec.nu, m.nu_leaf_, "nu");
  return m.with_measures(m.mu_leaf_, m.nu_leaf_);
}

void DyadicModel::derive() {
  const std::size_t n = ids_.size();
  depth_.assign(n, 0);
  preorder_.clear();
  preorder_pos_.assign(n, kNpos);
  subtree_size_.assign(n, 1);
  leaves_.clear();
  leaf_pos_.assign(n, kNpos);
  leaf_range_.assign(n, LeafRange{0, 0});
  max_depth_ = 0;

  std::vector<NodeIndex> stack;
  for (auto it = roots_.rbegin(); it != roots_.rend(); ++it) stack.push_back(*it);
  while (!stack.empty()) {
    NodeIndex v = stack.back();
    stack.pop_back();
    if (preorder_pos_[v] != kNpos) throw InvalidInput("cycle detected at '" + ids_[v] + "'");
    preorder_pos_[v] = preorder_.size();
    preorder_.push_back(v);
    if (parent_[v] != kNoNode) depth_[v] = depth_[parent_[v]] + 1;
    max_depth_ = std::max(max_depth_, depth_[v]);
    if (children_[v].empty()) {
      leaf_pos_[v] = leaves_.size();
      leaves_.push_back(v);
    }
    for (auto c = children_[v].rbegin(); c != children_[v].rend(); ++c) stack.push_back(*c);
  }
  if (preorder_.size() != n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (preorder_pos_[i] == kNpos) throw InvalidInput("cycle detected at '" + ids_[i] + "'");
    }
  }

  // Reverse preorder visits children before parents.
  for (auto it = preorder_.rbegin(); it != preorder_.rend(); ++it) {
    NodeIndex v = *it;
    if (children_[v].empty()) {
      leaf_range_[v] = {leaf_pos_[v], leaf_pos_[v] + 1};
    } else {
      leaf_range_[v] = {leaf_range_[children_[v].front()].begin, leaf_range_[children_[v].back()].end};
      for (NodeIndex c : children_[v]) subtree_size_[v] += subtree_size_[c];
    }
  }
}

const std::string& DyadicModel::id(NodeIndex node) const { return ids_.at(node); }

std::optional<NodeIndex> DyadicModel::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex DyadicModel::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw InvalidInput("unknown node id '" + std::string(id) + "'");
}

std::size_t DyadicModel::leaf_position(NodeIndex leaf) const {
  if (leaf_pos_.at(leaf) == kNpos) throw InvalidInput("node '" + ids_[leaf] + "' is not a leaf");
  return leaf_pos_[leaf];
}

std::span<const NodeIndex> DyadicModel::subtree(NodeIndex node) const {
  return std::span<const NodeIndex>(preorder_).subspan(preorder_pos_.at(node), subtree_size_[node]);
}

bool DyadicModel::contains(NodeIndex outer, NodeIndex inner) const {
  const auto po = preorder_pos_.at(outer);
  const auto pi = preorder_pos_.at(inner);
  return pi >= po && pi < po + subtree_size_[outer];
}

double DyadicModel::mass(NodeIndex node, Measure m) const {
  return m == Measure::mu ? mu_node_.at(node) : nu_node_.at(node);
}

DyadicModel DyadicModel::with_measures(LeafValues mu_leaf, LeafValues nu_leaf) const {
  if (mu_leaf.size() != leaves_.size() || nu_leaf.size() != leaves_.size()) {
    throw InvalidInput("leaf mass vector has wrong length");
  }
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    check_mass(ids_[leaves_[i]], mu_leaf[i]);
    check_mass(ids_[leaves_[i]], nu_leaf[i]);
  }
  DyadicModel m = *this;
  m.mu_leaf_ = std::move(mu_leaf);
  m.nu_leaf_ = std::move(nu_leaf);
  m.mu_node_ = node_integrals(m, LeafValues(leaves_.size(), 1.0), Measure::mu);
  m.nu_node_ = node_integrals(m, LeafValues(leaves_.size(), 1.0), Measure::nu);
  return m;
}

ModelSpec DyadicModel::to_spec() const {
  ModelSpec spec;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    NodeSpec ns{ids_[i], std::nullopt, {}};
    if (parent_[i] != kNoNode) ns.parent = ids_[parent_[i]];
    for (NodeIndex c : children_[i]) ns.children.push_back(ids_[c]);
    spec.nodes.push_back(std::move(ns));
  }
  for (std::size_t k = 0; k < leaves_.size(); ++k) {
    spec.mu[ids_[leaves_[k]]] = mu_leaf_[k];
    spec.nu[ids_[leaves_[k]]] = nu_leaf_[k];
  }
  return spec;
}

namespace {

void check_length(const DyadicModel& model, std::span<const double> f) {
  if (f.size() != model.leaf_count()) {
    throw InvalidInput("function has " + std::to_string(f.size()) + " values, model has " +
                       std::to_string(model.leaf_count()) + " leaves");
  }
}

void check_node(const DyadicModel& model, NodeIndex node) {
  if (node >= model.node_count()) throw InvalidInput("unknown node index " + std::to_string(node));
}

}  // namespace

double integrate(const DyadicModel& model, std::span<const double> f, NodeIndex node, Measure m) {
  check_length(model, f);
  check_node(model, node);
  const auto range = model.leaf_range(node);
  const auto mass = model.leaf_masses(m);
  double sum = 0.0;
  for (std::size_t k = range.begin; k < range.end; ++k) sum += f[k] * mass[k];
  return sum;
}

double integrate(const DyadicModel& model, std::span<const double> f, std::string_view node, Measure m) {
  return integrate(model, f, model.index_of(node), m);
}

std::vector<double> node_integrals(const DyadicModel& model, std::span<const double> f, Measure m) {
  check_length(model, f);
  const auto mass = model.leaf_masses(m);
  std::vector<double> out(model.node_count(), 0.0);
  const auto order = model.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeIndex v = *it;
    if (model.is_leaf(v)) {
      const auto k = model.leaf_position(v);
      out[v] = f[k] * mass[k];
    } else {
      double s = 0.0;
      for (NodeIndex c : model.children(v)) s += out[c];
      out[v] = s;
    }
  }
  return out;
}

double average(const DyadicModel& model, std::span<const double> f, NodeIndex node, Measure m) {
  const double total = integrate(model, f, node, m);
  const double mass = model.mass(node, m);
  return mass > 0.0 ? total / mass : 0.0;
}

double average(const DyadicModel& model, std::span<const double> f, std::string_view node, Measure m) {
  return average(model, f, model.index_of(node), m);
}

double lp_norm(const DyadicModel& model, std::span<const double> g, Exponent p, Measure m) {
  check_length(model, g);
  const auto mass = model.leaf_masses(m);
  if (p.is_infinite()) {
    double best = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (mass[k] > 0.0) best = std::max(best, std::abs(g[k]));
    }
    return best;
  }
  const double e = p.value();
  if (e < 1.0) throw InvalidInput("lp_norm needs p >= 1");
  // Scale by the largest contributing value so large p does not overflow.
  double scale = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (mass[k] > 0.0) scale = std::max(scale, std::abs(g[k]));
  }
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (mass[k] > 0.0) sum += std::pow(std::abs(g[k]) / scale, e) * mass[k];
  }
  return scale * std::pow(sum, 1.0 / e);
}

LeafValues indicator(const DyadicModel& model, NodeIndex node) {
  check_node(model, node);
  LeafValues f(model.leaf_count(), 0.0);
  const auto range = model.leaf_range(node);
  std::fill(f.begin() + static_cast<std::ptrdiff_t>(range.begin),
            f.begin() + static_cast<std::ptrdiff_t>(range.end), 1.0);
  return f;
}

}  // namespace mgmax
