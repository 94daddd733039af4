#include "mgmax/bruteforce.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "mgmax/error.hpp"

namespace mgmax {

namespace {

namespace mp = boost::multiprecision;
using Rational = mp::cpp_rational;
using Float50 = mp::cpp_bin_float_50;

// Containment and coefficient tables read off the tree by brute force.
struct DirectTables {
  std::vector<std::vector<std::size_t>> leaves_in;  // per node
  std::vector<std::vector<NodeIndex>> cubes_at;     // per leaf position
  std::vector<std::vector<double>> coef;            // coef[node][leaf position]
  std::vector<double> mu;
  std::vector<double> nu;

  DirectTables(const DyadicModel& model, const CoefficientFamily& a) {
    a.validate(model);
    const auto leaves = model.leaves();
    leaves_in.resize(model.node_count());
    cubes_at.resize(leaves.size());
    coef.assign(model.node_count(), std::vector<double>(leaves.size(), 0.0));
    for (NodeIndex v = 0; v < model.node_count(); ++v) {
      for (std::size_t x = 0; x < leaves.size(); ++x) {
        if (!model.contains(v, leaves[x])) continue;
        leaves_in[v].push_back(x);
        cubes_at[x].push_back(v);
        coef[v][x] = a.value(model, v, x);
      }
    }
    const auto m = model.leaf_masses(Measure::mu);
    const auto n = model.leaf_masses(Measure::nu);
    mu.assign(m.begin(), m.end());
    nu.assign(n.begin(), n.end());
  }

  double ratio(std::span<const double> f, double p, Exponent q) const {
    double denom = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) denom += std::pow(std::abs(f[x]), p) * mu[x];
    if (denom == 0.0) return 0.0;
    double numer = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (nu[x] == 0.0) continue;
      double acc = 0.0;
      for (NodeIndex cube : cubes_at[x]) {
        double integral = 0.0;
        for (std::size_t y : leaves_in[cube]) integral += f[y] * mu[y];
        const double t = std::abs(integral) * coef[cube][x];
        acc = q.is_infinite() ? std::max(acc, t) : acc + std::pow(t, q.value());
      }
      const double value = q.is_infinite() ? acc : std::pow(acc, 1.0 / q.value());
      numer += std::pow(value, p) * nu[x];
    }
    return std::pow(numer / denom, 1.0 / p);
  }

  double precise_ratio(std::span<const double> f, double p, Exponent q) const {
    const Float50 pf = p;
    Float50 denom = 0;
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (f[x] != 0.0 && mu[x] != 0.0) denom += mp::pow(Float50(std::abs(f[x])), pf) * Float50(mu[x]);
    }
    if (denom == 0) return 0.0;
    Float50 numer = 0;
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (nu[x] == 0.0) continue;
      Rational top = 0;
      Float50 acc = 0;
      for (NodeIndex cube : cubes_at[x]) {
        Rational integral = 0;
        for (std::size_t y : leaves_in[cube]) integral += Rational(f[y]) * Rational(mu[y]);
        const Rational t = mp::abs(integral) * Rational(coef[cube][x]);
        if (q.is_infinite()) {
          top = std::max(top, t);
        } else if (t != 0) {
          acc += mp::pow(Float50(t), Float50(q.value()));
        }
      }
      Float50 value = q.is_infinite() ? Float50(top) : (acc == 0 ? Float50(0) : mp::pow(acc, 1 / Float50(q.value())));
      if (value != 0) numer += mp::pow(value, pf) * Float50(nu[x]);
    }
    return static_cast<double>(mp::pow(numer / denom, 1 / pf));
  }
};

struct GridSearch {
  const DirectTables& tables;
  double p;
  Exponent q;
  std::vector<std::size_t> active;  // leaf positions with mu > 0

  LeafValues to_function(std::span<const double> s) const {
    LeafValues f(tables.mu.size(), 0.0);
    for (std::size_t j = 0; j < active.size(); ++j) {
      const auto x = active[j];
      f[x] = s[j] > 0.0 ? std::pow(s[j] / tables.mu[x], 1.0 / p) : 0.0;
    }
    return f;
  }

  double eval(std::span<const double> s) const { return tables.ratio(to_function(s), p, q); }

  // Pairwise transfers of sphere mass s_i -> s_j with halving step sizes.
  std::pair<double, std::vector<double>> refine(std::vector<double> s, double value, double step) const {
    const std::size_t m = active.size();
    for (; step > 0x1.0p-45; step *= 0.5) {
      for (int pass = 0; pass < 64; ++pass) {
        bool improved = false;
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < m; ++j) {
            if (i == j || s[i] < step) continue;
            s[i] -= step;
            s[j] += step;
            const double v = eval(s);
            if (v > value) {
              value = v;
              improved = true;
            } else {
              s[i] += step;
              s[j] -= step;
            }
          }
        }
        if (!improved) break;
      }
    }
    return {value, std::move(s)};
  }
};

}  // namespace

double precise_norm_ratio(const DyadicModel& model, const CoefficientFamily& a, std::span<const double> f,
                          double p, Exponent q) {
  Exponents::make(p, q);
  if (f.size() != model.leaf_count()) throw InvalidInput("function has wrong length");
  return DirectTables(model, a).precise_ratio(f, p, q);
}

BruteforceResult operator_norm_bruteforce(const DyadicModel& model, const CoefficientFamily& a, double p,
                                          Exponent q, const BruteforceOptions& options) {
  Exponents::make(p, q);
  if (model.leaf_count() > options.max_leaves) {
    throw InvalidInput("too many leaves for exhaustive search (" + std::to_string(model.leaf_count()) + " > " +
                       std::to_string(options.max_leaves) + ")");
  }
  if (options.resolution == 0) throw InvalidInput("resolution must be >= 1");
  const DirectTables tables(model, a);
  GridSearch search{tables, p, q, {}};
  for (std::size_t x = 0; x < tables.mu.size(); ++x) {
    if (tables.mu[x] > 0.0) search.active.push_back(x);
  }
  if (search.active.empty()) throw InvalidInput("all candidates have zero mu-norm");

  const std::size_t denom = std::bit_ceil(options.resolution);
  const int levels = std::countr_zero(denom);  // level l has denominator 2^l
  const std::size_t m = search.active.size();

  // Best point per nested level, found in one pass over the finest grid in
  // lexicographic order (so ties resolve the same way at every resolution).
  std::vector<double> level_best(levels + 1, -1.0);
  std::vector<std::vector<double>> level_point(levels + 1);
  std::vector<std::size_t> n(m, 0);
  std::vector<double> s(m, 0.0);
  n[m - 1] = denom;
  while (true) {
    for (std::size_t j = 0; j < m; ++j) s[j] = static_cast<double>(n[j]) / static_cast<double>(denom);
    const double v = search.eval(s);
    // Coarsest level containing the point: 2^(levels - l) divides every n_j.
    std::size_t common = denom;
    for (auto nj : n) common = std::min<std::size_t>(common, nj == 0 ? denom : std::countr_zero(nj));
    const int coarsest = levels - static_cast<int>(std::min<std::size_t>(common, levels));
    for (int l = coarsest; l <= levels; ++l) {
      if (v > level_best[l]) {
        level_best[l] = v;
        level_point[l] = s;
      }
    }
    // Next composition of denom into m parts, lexicographic.
    if (m == 1) break;
    std::size_t k = m - 1;
    while (k > 0 && n[k] == 0) --k;
    if (k == 0) break;
    // n[k] > 0 with k >= 1: move one unit left of k, rest to the last slot.
    const std::size_t rest = n[k] - 1;
    n[k] = 0;
    n[k - 1] += 1;
    n[m - 1] += rest;
  }

  BruteforceResult result;
  result.grid_denominator = denom;
  double best = -1.0;
  std::vector<double> best_point;
  for (int l = 0; l <= levels; ++l) {
    if (level_best[l] > best) {
      best = level_best[l];
      best_point = level_point[l];
    }
    auto [v, pt] = search.refine(level_point[l], level_best[l], 1.0 / static_cast<double>(1ULL << l));
    if (v > best) {
      best = v;
      best_point = std::move(pt);
    }
  }
  result.witness = search.to_function(best_point);
  result.value = options.exact_refinement ? std::max(best, tables.precise_ratio(result.witness, p, q)) : best;
  return result;
}

}  // namespace mgmax
