// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fixtures.hpp"
#include "mgmax/bruteforce.hpp"
#include "mgmax/constants.hpp"
#include "mgmax/sawyer.hpp"
#include "mgmax/stopping.hpp"

using namespace mgmax;
using testing::random_coefficients;
using testing::random_nonnegative;

namespace {

constexpr double kTol = 1e-9;
constexpr std::uint64_t kSeed = 20240611;

struct Instance {
  DyadicModel model;
  CoefficientFamily a;
};

std::vector<std::pair<double, Exponent>> exponent_grid() {
  std::vector<std::pair<double, Exponent>> out;
  for (double p : {1.5, 2.0, 3.0}) {
    out.emplace_back(p, Exponent::finite(p));
    out.emplace_back(p, Exponent::finite(2 * p));
    out.emplace_back(p, Exponent::infinity());
  }
  return out;
}

std::vector<Instance> sweep_instances(std::size_t n) {
  RandomModelParams params;  // depth 1..4, branching 2..3
  params.mu_zero_probability = 0.05;
  params.nu_zero_probability = 0.05;
  std::vector<Instance> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto model = random_model(params, splitmix64(kSeed + i));
    Rng rng = substream(kSeed, {1, i});
    auto a = random_coefficients(model, rng);
    out.push_back({std::move(model), std::move(a)});
  }
  return out;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int number, const char* title, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0 && secs > budget_seconds) {
    out.pass = false;
    out.detail += "; over time budget";
  }
  if (!out.pass) ++failures;
  std::printf("criterion %d %s: %s (%s) [%.2fs]\n", number, title, out.pass ? "PASS" : "FAIL", out.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

}  // namespace

int main() {
  const auto grid = exponent_grid();
  const auto sweep = sweep_instances(500);

  criterion(1, "sandwich B <= A_lower <= C(p) B", 60.0, [&] {
    std::size_t checks = 0, violations = 0;
    double worst_upper = 0.0;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto [p, q] = grid[k];
        const SearchBudget budget{200, 50, splitmix64(kSeed ^ (i * 16 + k))};
        const auto rep = verify_theorem(sweep[i].model, sweep[i].a, p, q, budget, {kTol, 1.0});
        ++checks;
        const bool lower = rep.B <= rep.A_lower * (1 + kTol);
        const bool upper = rep.A_lower <= rep.C_p * rep.B * (1 + kTol);
        if (!lower || !upper) ++violations;
        if (rep.B > 0) worst_upper = std::max(worst_upper, rep.A_lower / (rep.C_p * rep.B));
      }
    }
    return Outcome{violations == 0, fmt("%.0f checks, %.0f violations, max A_lower/(C B) = %.4f", double(checks),
                                        double(violations), worst_upper)};
  });

  criterion(2, "brute-force oracle on <= 3 atoms", 120.0, [&] {
    RandomModelParams params;
    params.depth_min = 1;
    params.depth_max = 2;
    params.branch_min = 1;
    params.branch_max = 3;
    params.mu_zero_probability = 0.1;
    params.nu_zero_probability = 0.1;
    std::size_t accepted = 0, violations = 0;
    double worst_gap = 0.0;
    for (std::uint64_t s = 0; accepted < 100; ++s) {
      const auto model = random_model(params, splitmix64(kSeed * 7 + s));
      if (model.leaf_count() > 3 || model.mass(model.roots()[0], Measure::mu) == 0.0) continue;
      bool any_mu = false;
      for (double m : model.leaf_masses(Measure::mu)) any_mu = any_mu || m > 0;
      if (!any_mu) continue;
      Rng rng = substream(kSeed, {2, s});
      const auto a = random_coefficients(model, rng);
      const auto [p, q] = grid[accepted % grid.size()];
      const double B = testing_constant(model, a, p, q).value;
      const double A_lower = operator_norm_lower(model, a, p, q, {200, 50, s}).value;
      const auto bf = operator_norm_bruteforce(model, a, p, q, {200, true, 3});
      const double C = theorem_constant(p);
      if (!(B - 1e-6 <= bf.value && bf.value <= C * B + 1e-6 && bf.value >= A_lower - 1e-6)) ++violations;
      worst_gap = std::max(worst_gap, A_lower - bf.value);
      ++accepted;
    }
    return Outcome{violations == 0, fmt("%.0f instances, %.0f violations, max A_lower - A_bf = %.3g", double(accepted),
                                        double(violations), worst_gap)};
  });

  criterion(3, "C(p) values", 0.0, [&] {
    using boost::multiprecision::cpp_bin_float_50;
    const double ref = static_cast<double>(3 * sqrt(cpp_bin_float_50(3)));
    const double e2 = std::abs(theorem_constant(2.0) - ref);
    const double e6 = std::abs(theorem_constant(1e6) - 1.0);
    return Outcome{e2 <= 1e-12 && e6 <= 1e-3, fmt("|C(2) - 3 sqrt 3| = %.3g, |C(1e6) - 1| = %.3g", e2, e6)};
  });

  criterion(4, "stopping cubes: packing, partition, average control", 0.0, [&] {
    std::size_t checks = 0, bad = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      for (double p : {1.5, 2.0, 3.0}) {
        const double r = (p + 1) / p;
        Rng rng = substream(kSeed, {4, i, static_cast<std::uint64_t>(p * 2)});
        const auto f = random_nonnegative(sweep[i].model.leaf_count(), rng);
        const auto d = build_decomposition(sweep[i].model, f, r);
        const auto pack = verify_packing(sweep[i].model, d, kTol);
        ++checks;
        if (!pack.passed() || pack.worst_ratio > r / (r - 1) * (1 + kTol) || !blocks_partition(sweep[i].model, d) ||
            !average_control(sweep[i].model, d, kTol)) {
          ++bad;
        }
        worst = std::max(worst, pack.worst_ratio / pack.bound);
      }
    }
    return Outcome{bad == 0, fmt("%.0f decompositions, %.0f violations, max ratio/bound = %.4f", double(checks),
                                 double(bad), worst)};
  });

  criterion(5, "Carleson embedding", 0.0, [&] {
    std::size_t bad = 0;
    for (std::uint64_t t = 0; t < 500; ++t) {
      const auto& m = sweep[t].model;
      Rng rng = substream(kSeed, {5, t});
      const double p = 1.0 + 4.0 * uniform01(rng) + 1e-3;
      const auto w = make_carleson_sequence(m, random_nonnegative(m.node_count(), rng, 0.3));
      const auto f = random_nonnegative(m.leaf_count(), rng);
      const auto rep = carleson_embedding_check(m, w, f, p, kTol);
      const double norm_p = std::pow(lp_norm(m, f, Exponent::finite(p), Measure::mu), p);
      // With ||f|| = 0 every average vanishes, so the bound is 0 even for an infinite packing constant.
      const double bound = norm_p == 0.0 ? 0.0 : std::pow(holder_conjugate(p), p) * w.packing_constant * norm_p;
      if (!rep.holds || !(rep.lhs <= bound * (1 + kTol))) ++bad;
    }
    double worst_single = 0.0;
    for (double p : {1.5, 2.0, 3.0, 7.0}) {
      const auto m = testing::make_single_leaf(2.5, 1.0);
      const auto w = make_carleson_sequence(m, {2.5});
      const auto rep = carleson_embedding_check(m, w, LeafValues{1.0}, p);
      worst_single = std::max(worst_single, std::abs(rep.rhs / rep.lhs - std::pow(holder_conjugate(p), p)) /
                                                std::pow(holder_conjugate(p), p));
    }
    return Outcome{bad == 0 && worst_single <= 1e-12,
                   fmt("500 tuples, %.0f violations, single-leaf slack error %.3g", double(bad), worst_single)};
  });

  criterion(6, "proof chain", 0.0, [&] {
    std::size_t traces = 0, bad = 0;
    double worst_rebuild = 0.0;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto [p, q] = grid[k];
        const auto& inst = sweep[i];
        Rng rng = substream(kSeed, {6, i, k});
        const auto f = random_nonnegative(inst.model.leaf_count(), rng);
        const double B = testing_constant(inst.model, inst.a, p, q).value;
        const auto t = proof_trace(inst.model, inst.a, f, p, q, B, {std::nullopt, 0, kTol, 1.0});
        ++traces;
        bool all_applicable = t.links.size() == 5;
        for (const auto& l : t.links) all_applicable = all_applicable && l.applicable;
        if (!t.passed() || !all_applicable || t.reconstruction_error > 1e-12) ++bad;
        worst_rebuild = std::max(worst_rebuild, t.reconstruction_error);
      }
    }
    return Outcome{bad == 0, fmt("%.0f traces, %.0f failing, max reconstruction error %.3g", double(traces),
                                 double(bad), worst_rebuild)};
  });

  criterion(7, "three-to-two measure reduction", 0.0, [&] {
    std::size_t bad = 0;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto& m = sweep[s].model;
      Rng rng = substream(kSeed, {7, s});
      const auto [p, q] = grid[s % grid.size()];
      SawyerInstance inst{m, random_nonnegative(m.leaf_count(), rng, 0.1), random_nonnegative(m.leaf_count(), rng, 0.0),
                          0.1 + 0.9 * uniform01(rng), p};
      const auto red = reduce_three_to_two(inst);
      for (int j = 0; j < 20; ++j) {
        const auto f = random_nonnegative(m.leaf_count(), rng);
        const auto rep = verify_reduction(inst, f, q, 1e-12);
        const double lhs = three_measure_ratio(inst, f, q);
        const double rhs = two_measure_ratio(red, transform_function(red, f), q);
        const double err = (std::isnan(lhs) && std::isnan(rhs)) || lhs == rhs
                               ? 0.0
                               : std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
        worst = std::max({worst, err, rep.integral_error, rep.operator_error});
        if (!rep.holds || err > 1e-12) ++bad;
      }
    }
    return Outcome{bad == 0, fmt("200 instances x 20 functions, %.0f failing, worst relative error %.3g",
                                 double(bad), worst)};
  });

  criterion(8, "operator laws", 0.0, [&] {
    std::size_t bad = 0;
    for (std::uint64_t c = 0; c < 1000; ++c) {
      const auto& inst = sweep[c % sweep.size()];
      const auto& m = inst.model;
      Rng rng = substream(kSeed, {8, c});
      const auto f = random_nonnegative(m.leaf_count(), rng);
      const auto g = random_nonnegative(m.leaf_count(), rng);
      const double q1 = 1.0 + 5.0 * uniform01(rng);
      const double q2 = 1.0 + 5.0 * uniform01(rng);
      const Exponent lo = Exponent::finite(std::max(q1, q2)), hi = Exponent::finite(std::min(q1, q2));
      const double lambda = std::exp(4.0 * uniform01(rng) - 2.0);
      const NodeIndex cube = static_cast<NodeIndex>(uniform01(rng) * m.node_count());
      const std::size_t start = static_cast<std::size_t>(uniform01(rng) * (m.max_depth() + 1));

      LeafValues sum(f.size()), scaled(f.size());
      for (std::size_t k = 0; k < f.size(); ++k) {
        sum[k] = f[k] + g[k];
        scaled[k] = lambda * f[k];
      }
      for (const Exponent q : {lo, hi, Exponent::infinity()}) {
        const auto Mf = apply_maximal(m, inst.a, f, q).values;
        const auto Mg = apply_maximal(m, inst.a, g, q).values;
        const auto Msum = apply_maximal(m, inst.a, sum, q).values;
        const auto Mscaled = apply_maximal(m, inst.a, scaled, q).values;
        const auto Mcube = apply_truncated(m, inst.a, f, q, cube).values;
        const auto Mdepth = apply_depth_truncated(m, inst.a, f, q, start).values;
        for (std::size_t k = 0; k < f.size(); ++k) {
          if (!leq_rel(Msum[k], Mf[k] + Mg[k], kTol)) ++bad;
          if (!close_rel(Mscaled[k], lambda * Mf[k], kTol)) ++bad;
          if (!leq_rel(Mcube[k], Mf[k], kTol) || !leq_rel(Mdepth[k], Mf[k], kTol)) ++bad;
        }
      }
      const auto Mlo = apply_maximal(m, inst.a, f, lo).values;
      const auto Mhi = apply_maximal(m, inst.a, f, hi).values;
      const auto Minf = apply_maximal(m, inst.a, f, Exponent::infinity()).values;
      for (std::size_t k = 0; k < f.size(); ++k) {
        if (!leq_rel(Minf[k], Mlo[k], kTol) || !leq_rel(Mlo[k], Mhi[k], kTol)) ++bad;
      }
    }
    return Outcome{bad == 0, fmt("1000 cases, %.0f violations", double(bad))};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", failures);
  return failures == 0 ? 0 : 1;
}
