#include "mgmax/operator.hpp"

#include <algorithm>
#include <cmath>

#include "mgmax/error.hpp"

namespace mgmax {

CoefficientFamily CoefficientFamily::constant(const DyadicModel& model, double c) {
  CoefficientFamily a(model.node_count());
  for (NodeIndex v = 0; v < model.node_count(); ++v) a.set(v, c);
  return a;
}

double CoefficientFamily::value(const DyadicModel& model, NodeIndex node, std::size_t leaf_pos) const {
  const auto& c = per_node_.at(node);
  if (!c) throw InvalidInput("coefficient missing for node '" + model.id(node) + "'");
  if (const double* s = std::get_if<double>(&*c)) return *s;
  const auto& v = std::get<std::vector<double>>(*c);
  return v.at(leaf_pos - model.leaf_range(node).begin);
}

void CoefficientFamily::validate(const DyadicModel& model) const {
  if (per_node_.size() != model.node_count()) {
    throw InvalidInput("coefficient family size does not match the model");
  }
  auto check = [&](NodeIndex v, double x) {
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidInput("coefficient for node '" + model.id(v) + "' must be finite and >= 0");
    }
  };
  for (NodeIndex v = 0; v < per_node_.size(); ++v) {
    const auto& c = per_node_[v];
    if (!c) throw InvalidInput("coefficient missing for node '" + model.id(v) + "'");
    if (const double* s = std::get_if<double>(&*c)) {
      check(v, *s);
      continue;
    }
    const auto& vals = std::get<std::vector<double>>(*c);
    if (vals.size() != model.leaf_range(v).size()) {
      throw InvalidInput("coefficient for node '" + model.id(v) + "' has " + std::to_string(vals.size()) +
                         " leaf values, node has " + std::to_string(model.leaf_range(v).size()) +
                         " leaves");
    }
    for (double x : vals) check(v, x);
  }
}

CoefficientFamily CoefficientFamily::scaled(double c) const {
  CoefficientFamily out = *this;
  for (auto& entry : out.per_node_) {
    if (!entry) continue;
    if (double* s = std::get_if<double>(&*entry)) {
      *s *= c;
    } else {
      for (double& x : std::get<std::vector<double>>(*entry)) x *= c;
    }
  }
  return out;
}

double combine_terms(std::span<const double> terms, Exponent q) {
  double top = 0.0;
  for (double t : terms) top = std::max(top, t);
  if (q.is_infinite() || top == 0.0) return top;
  const double e = q.value();
  double sum = 0.0;
  for (double t : terms) {
    if (t > 0.0) sum += std::pow(t / top, e);
  }
  return top * std::pow(sum, 1.0 / e);
}

namespace {

void check_q(Exponent q) {
  if (!q.is_infinite() && !(q.value() > 1.0)) throw InvalidInput("q must lie in (1, inf]");
}

}  // namespace

LeafValues apply_restricted_integrals(const DyadicModel& model, const CoefficientFamily& a,
                                      std::span<const double> integrals, Exponent q,
                                      const std::vector<bool>& include) {
  check_q(q);
  if (include.size() != model.node_count() || integrals.size() != model.node_count()) {
    throw InvalidInput("node mask or integral vector has wrong length");
  }
  const auto leaves = model.leaves();
  LeafValues out(leaves.size(), 0.0);
  std::vector<double> terms;
  terms.reserve(model.max_depth() + 1);
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    terms.clear();
    for (NodeIndex v = leaves[k]; v != kNoNode; v = model.parent(v)) {
      if (!include[v]) continue;
      terms.push_back(std::abs(integrals[v]) * a.value(model, v, k));
    }
    out[k] = combine_terms(terms, q);
  }
  return out;
}

LeafValues apply_restricted(const DyadicModel& model, const CoefficientFamily& a,
                            std::span<const double> f, Exponent q, const std::vector<bool>& include) {
  a.validate(model);
  return apply_restricted_integrals(model, a, node_integrals(model, f, Measure::mu), q, include);
}

MaximalOutput apply_maximal(const DyadicModel& model, const CoefficientFamily& a,
                            std::span<const double> f, Exponent q) {
  return {apply_restricted(model, a, f, q, std::vector<bool>(model.node_count(), true)), q,
          NoTruncation{}};
}

MaximalOutput apply_truncated(const DyadicModel& model, const CoefficientFamily& a,
                              std::span<const double> f, Exponent q, NodeIndex cube) {
  if (cube >= model.node_count()) throw InvalidInput("unknown node index " + std::to_string(cube));
  std::vector<bool> include(model.node_count(), false);
  for (NodeIndex v : model.subtree(cube)) include[v] = true;
  return {apply_restricted(model, a, f, q, include), q, CubeTruncation{cube}};
}

MaximalOutput apply_depth_truncated(const DyadicModel& model, const CoefficientFamily& a,
                                    std::span<const double> f, Exponent q, std::size_t start_depth) {
  if (start_depth > model.max_depth()) {
    throw InvalidInput("start depth " + std::to_string(start_depth) + " outside [0, " +
                       std::to_string(model.max_depth()) + "]");
  }
  std::vector<bool> include(model.node_count(), false);
  for (NodeIndex v = 0; v < model.node_count(); ++v) include[v] = model.depth(v) >= start_depth;
  return {apply_restricted(model, a, f, q, include), q, DepthTruncation{start_depth}};
}

CoefficientFamily classical_coefficients(const DyadicModel& model, std::span<const double> omega_leaf,
                                         double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in (0, 1]");
  if (omega_leaf.size() != model.leaf_count()) throw InvalidInput("omega has wrong length");
  for (double w : omega_leaf) {
    if (!std::isfinite(w) || w < 0.0) throw InvalidInput("omega masses must be finite and >= 0");
  }
  CoefficientFamily a(model.node_count());
  for (NodeIndex v = 0; v < model.node_count(); ++v) {
    const auto range = model.leaf_range(v);
    double omega = 0.0;
    for (std::size_t k = range.begin; k < range.end; ++k) omega += omega_leaf[k];
    a.set(v, omega > 0.0 ? std::pow(omega, -alpha) : 0.0);
  }
  return a;
}

}  // namespace mgmax
