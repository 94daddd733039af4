#include "mgmax/constants.hpp"

#include <cmath>

#include "mgmax/error.hpp"
#include "mgmax/rng.hpp"

namespace mgmax {

double theorem_constant(double p) {
  const double p_conj = holder_conjugate(p);
  // Log form keeps (1 + 1/p)^(p+1) p stable for large p.
  const double log_inner = (p + 1.0) * std::log1p(1.0 / p) + std::log(p);
  return std::exp(log_inner / p) * p_conj;
}

TestingResult testing_constant(const DyadicModel& model, const CoefficientFamily& a, double p, Exponent q) {
  Exponents::make(p, q);
  a.validate(model);
  const auto mu_int = node_integrals(model, LeafValues(model.leaf_count(), 1.0), Measure::mu);
  TestingResult best;
  std::vector<bool> include(model.node_count(), false);
  for (NodeIndex v = 0; v < model.node_count(); ++v) {
    const double mass = model.mass(v, Measure::mu);
    if (!(mass > 0.0)) continue;
    // For R inside Q, int_R 1_Q dmu = mu(R); nodes outside Q are masked off.
    std::fill(include.begin(), include.end(), false);
    for (NodeIndex r : model.subtree(v)) include[r] = true;
    const auto out = apply_restricted_integrals(model, a, mu_int, q, include);
    const double ratio = lp_norm(model, out, Exponent::finite(p), Measure::nu) / std::pow(mass, 1.0 / p);
    if (!best.witness || ratio > best.value) {
      best.value = ratio;
      best.witness = v;
    }
  }
  return best;
}

double norm_ratio(const DyadicModel& model, const CoefficientFamily& a, std::span<const double> f,
                  double p, Exponent q) {
  const Exponent pe = Exponent::finite(p);
  const double denom = lp_norm(model, f, pe, Measure::mu);
  if (denom == 0.0) return 0.0;
  return lp_norm(model, apply_maximal(model, a, f, q).values, pe, Measure::nu) / denom;
}

namespace {

// Pareto(1.5) shifted to start at 0, with a point mass at 0.
double heavy_tailed(Rng& rng) {
  if (uniform01(rng) < 0.3) return 0.0;
  return std::pow(1.0 - uniform01(rng), -1.0 / 1.5) - 1.0;
}

}  // namespace

NormLowerBound operator_norm_lower(const DyadicModel& model, const CoefficientFamily& a, double p,
                                   Exponent q, const SearchBudget& budget) {
  Exponents::make(p, q);
  a.validate(model);
  const Exponent pe = Exponent::finite(p);
  const auto mu = model.leaf_masses(Measure::mu);

  NormLowerBound best;
  bool found = false;
  auto consider = [&](const LeafValues& f, const char* origin, std::optional<NodeIndex> cube) {
    if (lp_norm(model, f, pe, Measure::mu) == 0.0) return;
    const double r = norm_ratio(model, a, f, p, q);
    if (!found || r > best.value) {
      best = {r, f, origin, cube};
      found = true;
    }
  };

  for (NodeIndex v = 0; v < model.node_count(); ++v) {
    if (model.mass(v, Measure::mu) > 0.0) consider(indicator(model, v), "indicator", v);
  }
  for (std::size_t c = 0; c < budget.random_candidates; ++c) {
    Rng rng = substream(budget.seed, {0x6361ULL, c});
    LeafValues f(model.leaf_count());
    for (double& x : f) x = heavy_tailed(rng);
    consider(f, "random", std::nullopt);
  }
  if (!found) throw InvalidInput("all candidates have zero mu-norm");

  // Single-coordinate ascent over the atoms that carry mu-mass, one atom per
  // round, with a per-atom multiplicative step that halves on failure.
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (mu[k] > 0.0) active.push_back(k);
  }
  std::vector<double> step(mu.size(), 1.0);
  LeafValues f = best.witness;
  double value = best.value;
  bool improved_any = false;
  for (std::size_t round = 0; round < budget.ascent_rounds; ++round) {
    const std::size_t k = active[round % active.size()];
    double top = 0.0;
    for (double x : f) top = std::max(top, x);
    const double original = f[k];
    const double trials[] = {original > 0.0 ? original * std::exp(step[k]) : 0.5 * top,
                             original * std::exp(-step[k]), 0.0};
    double best_trial = original;
    double best_value = value;
    for (double t : trials) {
      if (t == original) continue;
      f[k] = t;
      if (lp_norm(model, f, pe, Measure::mu) == 0.0) continue;
      const double r = norm_ratio(model, a, f, p, q);
      if (r > best_value) {
        best_value = r;
        best_trial = t;
      }
    }
    f[k] = best_trial;
    if (best_value > value) {
      value = best_value;
      improved_any = true;
    } else {
      step[k] *= 0.5;
    }
  }
  if (improved_any) best = {value, f, "ascent", std::nullopt};
  return best;
}

ConstantsReport verify_theorem(const DyadicModel& model, const CoefficientFamily& a, double p, Exponent q,
                               const SearchBudget& budget, const VerifyOptions& options) {
  ConstantsReport rep;
  rep.p = p;
  rep.q = q;
  rep.C_p = theorem_constant(p) * options.cp_factor;
  const auto testing = testing_constant(model, a, p, q);
  rep.B = testing.value;
  if (testing.witness) {
    const auto lower = operator_norm_lower(model, a, p, q, budget);
    rep.A_lower = lower.value;
    rep.witness_cube = lower.witness_cube;
    rep.witness_function = lower.witness;
    rep.witness_origin = lower.origin;
  } else {
    rep.witness_origin = "none";
  }
  rep.lower_margin = rep.A_lower - rep.B;
  rep.upper_margin = rep.C_p * rep.B - rep.A_lower;
  rep.lower_holds = leq_rel(rep.B, rep.A_lower, options.rel_tol);
  rep.upper_holds = leq_rel(rep.A_lower, rep.C_p * rep.B, options.rel_tol);
  return rep;
}

void require_sandwich(const ConstantsReport& report) {
  if (!report.lower_holds) {
    throw VerificationFailure("necessity", "testing constant B exceeds the operator norm lower bound");
  }
  if (!report.upper_holds) {
    throw VerificationFailure("sufficiency", "operator norm lower bound exceeds C(p) B");
  }
}

}  // namespace mgmax
