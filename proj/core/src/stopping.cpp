#include "mgmax/stopping.hpp"

#include <algorithm>
#include <cmath>

#include "mgmax/constants.hpp"
#include "mgmax/error.hpp"

namespace mgmax {

namespace {

void check_nonnegative(std::span<const double> f) {
  for (double x : f) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("f must be finite and >= 0");
  }
}

void check_r(double r) {
  if (!(r > 1.0) || !std::isfinite(r)) throw InvalidInput("stopping parameter r must be finite and > 1");
}

double mean(const DyadicModel& model, std::span<const double> integrals, NodeIndex v) {
  const double mass = model.mass(v, Measure::mu);
  return mass > 0.0 ? integrals[v] / mass : 0.0;
}

std::vector<NodeIndex> stopping_children_impl(const DyadicModel& model, std::span<const double> integrals,
                                              NodeIndex cube, double r) {
  std::vector<NodeIndex> out;
  const double avg = mean(model, integrals, cube);
  if (!(avg > 0.0)) return out;
  const double threshold = r * avg;
  std::vector<NodeIndex> stack;
  auto push_children = [&](NodeIndex v) {
    const auto ch = model.children(v);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  };
  push_children(cube);
  while (!stack.empty()) {
    const NodeIndex v = stack.back();
    stack.pop_back();
    if (model.mass(v, Measure::mu) > 0.0 && mean(model, integrals, v) >= threshold) {
      out.push_back(v);
    } else {
      push_children(v);
    }
  }
  return out;
}

// sum |g|^p dnu
double pth_power_integral(const DyadicModel& model, std::span<const double> g, double p, Measure m) {
  const auto mass = model.leaf_masses(m);
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (mass[k] > 0.0 && g[k] != 0.0) s += std::pow(std::abs(g[k]), p) * mass[k];
  }
  return s;
}

}  // namespace

std::vector<NodeIndex> stopping_children(const DyadicModel& model, std::span<const double> f, NodeIndex cube,
                                         double r) {
  check_r(r);
  check_nonnegative(f);
  if (cube >= model.node_count()) throw InvalidInput("unknown node index " + std::to_string(cube));
  return stopping_children_impl(model, node_integrals(model, f, Measure::mu), cube, r);
}

StoppingDecomposition build_decomposition(const DyadicModel& model, std::span<const double> f, double r,
                                          std::size_t start_depth) {
  check_r(r);
  check_nonnegative(f);
  if (start_depth > model.max_depth()) throw InvalidInput("start depth beyond the model depth");
  const auto integrals = node_integrals(model, f, Measure::mu);

  StoppingDecomposition d;
  d.r = r;
  d.start_depth = start_depth;
  d.f.assign(f.begin(), f.end());
  d.is_stopping.assign(model.node_count(), false);
  d.owner.assign(model.node_count(), kNoNode);

  std::vector<NodeIndex> current;
  for (NodeIndex v : model.preorder()) {
    if (model.depth(v) == start_depth) current.push_back(v);
  }
  std::vector<bool> is_child_of_current(model.node_count(), false);
  while (!current.empty()) {
    d.generations.push_back(current);
    std::vector<NodeIndex> next;
    for (NodeIndex cube : current) {
      d.is_stopping[cube] = true;
      auto kids = stopping_children_impl(model, integrals, cube, r);
      for (NodeIndex k : kids) is_child_of_current[k] = true;

      std::vector<NodeIndex> block;
      std::vector<NodeIndex> stack{cube};
      while (!stack.empty()) {
        const NodeIndex v = stack.back();
        stack.pop_back();
        if (v != cube && is_child_of_current[v]) continue;
        block.push_back(v);
        d.owner[v] = cube;
        const auto ch = model.children(v);
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
      }
      for (NodeIndex k : kids) is_child_of_current[k] = false;

      d.cubes.push_back(cube);
      d.blocks.push_back(std::move(block));
      next.insert(next.end(), kids.begin(), kids.end());
      d.children.push_back(std::move(kids));
    }
    current = std::move(next);
  }
  return d;
}

bool blocks_partition(const DyadicModel& model, const StoppingDecomposition& d) {
  std::vector<int> hits(model.node_count(), 0);
  for (std::size_t i = 0; i < d.cubes.size(); ++i) {
    for (NodeIndex v : d.blocks[i]) {
      if (!model.contains(d.cubes[i], v)) return false;
      ++hits[v];
    }
  }
  for (NodeIndex v = 0; v < model.node_count(); ++v) {
    const int expected = model.depth(v) >= d.start_depth ? 1 : 0;
    if (hits[v] != expected) return false;
  }
  return true;
}

bool average_control(const DyadicModel& model, const StoppingDecomposition& d, double rel_tol) {
  const auto integrals = node_integrals(model, d.f, Measure::mu);
  for (std::size_t i = 0; i < d.cubes.size(); ++i) {
    const double bound = d.r * mean(model, integrals, d.cubes[i]);
    for (NodeIndex v : d.blocks[i]) {
      if (model.mass(v, Measure::mu) > 0.0 && !leq_rel(mean(model, integrals, v), bound, rel_tol)) return false;
    }
  }
  return true;
}

PackingReport verify_packing(const DyadicModel& model, const StoppingDecomposition& d, double rel_tol) {
  PackingReport rep;
  rep.bound = d.r / (d.r - 1.0);
  std::vector<double> packed(model.node_count(), 0.0);
  const auto order = model.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeIndex v = *it;
    double s = d.is_stopping[v] ? model.mass(v, Measure::mu) : 0.0;
    for (NodeIndex c : model.children(v)) s += packed[c];
    packed[v] = s;
  }
  rep.slack.resize(model.node_count());
  for (NodeIndex v = 0; v < model.node_count(); ++v) {
    const double mass = model.mass(v, Measure::mu);
    rep.slack[v] = rep.bound * mass - packed[v];
    if (!leq_rel(packed[v], rep.bound * mass, rel_tol)) ++rep.violations;
    if (mass > 0.0) {
      const double ratio = packed[v] / mass;
      if (!rep.worst_node || ratio > rep.worst_ratio) {
        rep.worst_ratio = ratio;
        rep.worst_node = v;
      }
    }
  }

  const auto integrals = node_integrals(model, d.f, Measure::mu);
  for (std::size_t i = 0; i < d.cubes.size(); ++i) {
    const NodeIndex cube = d.cubes[i];
    if (!(mean(model, integrals, cube) > 0.0)) continue;
    double s = 0.0;
    for (NodeIndex k : d.children[i]) s += model.mass(k, Measure::mu);
    const double mass = model.mass(cube, Measure::mu);
    rep.worst_generation_ratio = std::max(rep.worst_generation_ratio, d.r * s / mass);
    if (!leq_rel(s, mass / d.r, rel_tol)) ++rep.generation_violations;
  }
  return rep;
}

CarlesonSequence make_carleson_sequence(const DyadicModel& model, std::vector<double> w) {
  if (w.size() != model.node_count()) throw InvalidInput("Carleson weights need one value per node");
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("Carleson weights must be finite and >= 0");
  }
  std::vector<double> packed(model.node_count(), 0.0);
  const auto order = model.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    double s = w[*it];
    for (NodeIndex c : model.children(*it)) s += packed[c];
    packed[*it] = s;
  }
  double a = 0.0;
  for (NodeIndex v = 0; v < model.node_count(); ++v) {
    const double mass = model.mass(v, Measure::mu);
    if (mass > 0.0) {
      a = std::max(a, packed[v] / mass);
    } else if (packed[v] > 0.0) {
      a = HUGE_VAL;
    }
  }
  return {std::move(w), a};
}

CarlesonSequence stopping_weights(const StoppingDecomposition& d, const DyadicModel& model) {
  std::vector<double> w(model.node_count(), 0.0);
  for (NodeIndex cube : d.cubes) w[cube] = model.mass(cube, Measure::mu);
  return make_carleson_sequence(model, std::move(w));
}

CarlesonReport carleson_embedding_check(const DyadicModel& model, const CarlesonSequence& w,
                                        std::span<const double> f, double p, double rel_tol) {
  check_nonnegative(f);
  const double p_conj = holder_conjugate(p);
  if (w.w.size() != model.node_count()) throw InvalidInput("Carleson weights need one value per node");
  const auto integrals = node_integrals(model, f, Measure::mu);
  CarlesonReport rep;
  rep.packing_constant = w.packing_constant;
  for (NodeIndex v = 0; v < model.node_count(); ++v) {
    if (w.w[v] > 0.0) {
      const double avg = mean(model, integrals, v);
      if (avg > 0.0) rep.lhs += std::pow(avg, p) * w.w[v];
    }
  }
  const double norm_p = pth_power_integral(model, f, p, Measure::mu);
  // 0 * inf is taken as 0: with f = 0 both sides vanish.
  rep.rhs = norm_p == 0.0 ? 0.0 : std::pow(p_conj, p) * w.packing_constant * norm_p;
  rep.holds = leq_rel(rep.lhs, rep.rhs, rel_tol);
  return rep;
}

const char* link_name(ProofLink link) {
  switch (link) {
    case ProofLink::block_sum:
      return "block_sum";
    case ProofLink::block_bound:
      return "block_bound";
    case ProofLink::carleson:
      return "carleson";
    case ProofLink::combined:
      return "combined";
    case ProofLink::optimal_r:
      return "optimal_r";
  }
  return "unknown";
}

bool ProofTrace::passed() const noexcept { return !first_failure(); }

std::optional<ProofLink> ProofTrace::first_failure() const {
  for (const auto& l : links) {
    if (l.applicable && !l.holds) return l.link;
  }
  return std::nullopt;
}

ProofTrace proof_trace(const DyadicModel& model, const CoefficientFamily& a, std::span<const double> f,
                       double p, Exponent q, double B, const ProofOptions& options) {
  const auto ex = Exponents::make(p, q);
  check_nonnegative(f);
  a.validate(model);
  const double default_r = (p + 1.0) / p;
  const double r = options.r.value_or(default_r);
  check_r(r);

  ProofTrace t;
  t.p = p;
  t.q = q;
  t.r = r;
  t.B = B;
  t.start_depth = options.start_depth;
  t.decomposition = build_decomposition(model, f, r, options.start_depth);
  const auto& d = t.decomposition;

  const auto integrals = node_integrals(model, f, Measure::mu);
  const auto truncated = apply_depth_truncated(model, a, f, q, options.start_depth).values;
  t.lhs = pth_power_integral(model, truncated, p, Measure::nu);

  std::vector<std::vector<double>> per_leaf_blocks(model.leaf_count());
  std::vector<bool> mask(model.node_count(), false);
  double worst_block_ratio = -1.0;
  LinkCheck block_link{ProofLink::block_bound};
  for (std::size_t i = 0; i < d.cubes.size(); ++i) {
    const NodeIndex cube = d.cubes[i];
    std::fill(mask.begin(), mask.end(), false);
    for (NodeIndex v : d.blocks[i]) mask[v] = true;
    BlockTrace b{cube, apply_restricted_integrals(model, a, integrals, q, mask)};
    b.norm_p = pth_power_integral(model, b.F, p, Measure::nu);
    const double avg = mean(model, integrals, cube);
    b.bound = std::pow(r * B * avg, p) * model.mass(cube, Measure::mu);
    for (std::size_t k = 0; k < b.F.size(); ++k) per_leaf_blocks[k].push_back(b.F[k]);

    t.block_sum += b.norm_p;
    t.carleson_sum += std::pow(avg, p) * model.mass(cube, Measure::mu);
    if (!leq_rel(b.norm_p, b.bound, options.rel_tol)) block_link.holds = false;
    const double ratio = slack_ratio(b.bound, b.norm_p);
    if (ratio > worst_block_ratio) {
      worst_block_ratio = ratio;
      block_link.lhs = b.norm_p;
      block_link.rhs = b.bound;
    }
    t.blocks.push_back(std::move(b));
  }

  for (std::size_t k = 0; k < model.leaf_count(); ++k) {
    const double rebuilt = combine_terms(per_leaf_blocks[k], q);
    const double scale = std::max(std::abs(rebuilt), std::abs(truncated[k]));
    if (scale > 0.0) t.reconstruction_error = std::max(t.reconstruction_error, std::abs(rebuilt - truncated[k]) / scale);
  }

  const double f_norm_p = pth_power_integral(model, f, p, Measure::mu);
  const double conj_p = std::pow(ex.p_conj, p);
  const double b_p = std::pow(B, p);
  t.carleson_bound = r / (r - 1.0) * conj_p * f_norm_p;
  t.final_bound = std::pow(r, p + 1.0) / (r - 1.0) * conj_p * b_p * f_norm_p;
  t.optimal_bound = std::pow(theorem_constant(p) * options.cp_factor, p) * b_p * f_norm_p;

  const double tol = options.rel_tol;
  t.links.push_back({ProofLink::block_sum, t.lhs, t.block_sum, true, leq_rel(t.lhs, t.block_sum, tol)});
  t.links.push_back(block_link);
  t.links.push_back(
      {ProofLink::carleson, t.carleson_sum, t.carleson_bound, true, leq_rel(t.carleson_sum, t.carleson_bound, tol)});
  t.links.push_back({ProofLink::combined, t.lhs, t.final_bound, true, leq_rel(t.lhs, t.final_bound, tol)});
  const bool at_optimum = std::abs(r - default_r) <= 1e-15 * default_r;
  t.links.push_back({ProofLink::optimal_r, t.lhs, t.optimal_bound, at_optimum,
                     !at_optimum || leq_rel(t.lhs, t.optimal_bound, tol)});
  return t;
}

void require_chain(const ProofTrace& trace) {
  if (auto bad = trace.first_failure()) {
    throw VerificationFailure(link_name(*bad), std::string("proof chain link '") + link_name(*bad) + "' failed");
  }
}

}  // namespace mgmax
