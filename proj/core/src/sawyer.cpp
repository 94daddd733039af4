#include "mgmax/sawyer.hpp"

#include <algorithm>
#include <cmath>

#include "mgmax/error.hpp"

namespace mgmax {

namespace {

double rel_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

LeafValues tilde_mu(const SawyerInstance& inst) {
  LeafValues m(inst.omega.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = inst.w[k] * inst.omega[k];
  return m;
}

}  // namespace

Reduction reduce_three_to_two(const SawyerInstance& inst) {
  const double p_conj = holder_conjugate(inst.p);
  const std::size_t n = inst.model.leaf_count();
  if (inst.omega.size() != n || inst.w.size() != n) throw InvalidInput("omega and w need one value per leaf");
  const double e = p_conj / inst.p;
  LeafValues mu(n), transform(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double om = inst.omega[k];
    const double w = inst.w[k];
    const auto& id = inst.model.id(inst.model.leaves()[k]);
    if (!std::isfinite(om) || om < 0.0) throw InvalidInput("omega must be finite and >= 0 at '" + id + "'");
    if (!std::isfinite(w) || w < 0.0) throw InvalidInput("w must be finite and >= 0 at '" + id + "'");
    if (om > 0.0 && w == 0.0) throw InvalidInput("w = 0 where omega > 0 at '" + id + "': mu would be infinite");
    mu[k] = om == 0.0 ? 0.0 : std::pow(w, -e) * om;
    transform[k] = w == 0.0 ? 0.0 : std::pow(w, e);
  }
  const auto nu = inst.model.leaf_masses(Measure::nu);
  return {inst.model.with_measures(std::move(mu), LeafValues(nu.begin(), nu.end())),
          classical_coefficients(inst.model, inst.omega, inst.alpha), std::move(transform), inst.p};
}

LeafValues transform_function(const Reduction& red, std::span<const double> f) {
  if (f.size() != red.transform.size()) throw InvalidInput("function has wrong length");
  LeafValues g(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) g[k] = red.transform[k] * f[k];
  return g;
}

LeafValues three_measure_operator(const SawyerInstance& inst, std::span<const double> f, Exponent q) {
  const auto nu = inst.model.leaf_masses(Measure::nu);
  const auto base = inst.model.with_measures(inst.omega, LeafValues(nu.begin(), nu.end()));
  return apply_maximal(base, classical_coefficients(inst.model, inst.omega, inst.alpha), f, q).values;
}

double three_measure_ratio(const SawyerInstance& inst, std::span<const double> f, Exponent q) {
  const Exponent pe = Exponent::finite(inst.p);
  const auto nu = inst.model.leaf_masses(Measure::nu);
  const auto with_tilde = inst.model.with_measures(tilde_mu(inst), LeafValues(nu.begin(), nu.end()));
  const double denom = lp_norm(with_tilde, f, pe, Measure::mu);
  if (denom == 0.0) return 0.0;
  return lp_norm(inst.model, three_measure_operator(inst, f, q), pe, Measure::nu) / denom;
}

double two_measure_ratio(const Reduction& red, std::span<const double> g, Exponent q) {
  const Exponent pe = Exponent::finite(red.p);
  const double denom = lp_norm(red.reduced, g, pe, Measure::mu);
  if (denom == 0.0) return 0.0;
  return lp_norm(red.reduced, apply_maximal(red.reduced, red.a, g, q).values, pe, Measure::nu) / denom;
}

ReductionReport verify_reduction(const SawyerInstance& inst, std::span<const double> f, Exponent q,
                                 double rel_tol) {
  for (double x : f) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("f must be finite and >= 0");
  }
  const auto red = reduce_three_to_two(inst);
  const auto g = transform_function(red, f);

  ReductionReport rep;
  const auto nu = inst.model.leaf_masses(Measure::nu);
  const auto base = inst.model.with_measures(inst.omega, LeafValues(nu.begin(), nu.end()));
  const auto int_g = node_integrals(red.reduced, g, Measure::mu);
  const auto int_f = node_integrals(base, f, Measure::mu);
  for (NodeIndex v = 0; v < int_g.size(); ++v) rep.integral_error = std::max(rep.integral_error, rel_gap(int_g[v], int_f[v]));

  const auto two = apply_maximal(red.reduced, red.a, g, q).values;
  const auto three = three_measure_operator(inst, f, q);
  for (std::size_t k = 0; k < two.size(); ++k) rep.operator_error = std::max(rep.operator_error, rel_gap(two[k], three[k]));

  const Exponent pe = Exponent::finite(inst.p);
  const auto with_tilde = inst.model.with_measures(tilde_mu(inst), LeafValues(nu.begin(), nu.end()));
  rep.norm_g = lp_norm(red.reduced, g, pe, Measure::mu);
  rep.norm_f = lp_norm(with_tilde, f, pe, Measure::mu);
  rep.norm_error = rel_gap(rep.norm_g, rep.norm_f);
  rep.holds = rep.integral_error <= rel_tol && rep.operator_error <= rel_tol && rep.norm_error <= rel_tol;
  return rep;
}

TruncationGap classical_truncation_gap(const DyadicModel& model, std::span<const double> omega_leaf,
                                       double alpha) {
  const auto a = classical_coefficients(model, omega_leaf, alpha);
  TruncationGap gap;
  for (NodeIndex cube = 0; cube < model.node_count(); ++cube) {
    const auto one_q = indicator(model, cube);
    const auto truncated = apply_truncated(model, a, one_q, Exponent::infinity(), cube).values;
    const auto full = apply_maximal(model, a, one_q, Exponent::infinity()).values;
    const auto range = model.leaf_range(cube);
    for (std::size_t k = range.begin; k < range.end; ++k) {
      const double g = rel_gap(truncated[k], full[k]);
      if (g > gap.max_gap) {
        gap.max_gap = g;
        gap.worst_cube = cube;
      }
    }
  }
  return gap;
}

}  // namespace mgmax
