#include "mgmax/random_model.hpp"

#include <random>
#include <string>

#include "mgmax/error.hpp"
#include "mgmax/rng.hpp"

namespace mgmax {

namespace {

std::size_t draw_between(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double draw_mass(Rng& rng, MassDistribution dist, double zero_probability) {
  if (zero_probability > 0.0 && uniform01(rng) < zero_probability) return 0.0;
  switch (dist) {
    case MassDistribution::uniform:
      return 1.0 - uniform01(rng);  // (0, 1]
    case MassDistribution::exponential:
      return std::exponential_distribution<double>(1.0)(rng);
    case MassDistribution::lognormal:
      return std::lognormal_distribution<double>(0.0, 1.5)(rng);
  }
  return 1.0;
}

}  // namespace

DyadicModel random_model(const RandomModelParams& params, std::uint64_t seed) {
  if (params.depth_min > params.depth_max) throw InvalidInput("empty depth range");
  if (params.branch_min < 1 || params.branch_min > params.branch_max) {
    throw InvalidInput("empty branching range");
  }
  if (params.roots_min < 1 || params.roots_min > params.roots_max) throw InvalidInput("empty roots range");
  auto prob_ok = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!prob_ok(params.split_probability) || !prob_ok(params.mu_zero_probability) ||
      !prob_ok(params.nu_zero_probability)) {
    throw InvalidInput("probability outside [0, 1]");
  }

  Rng rng = substream(seed, {0x6d6f64656cULL});
  const std::size_t depth = draw_between(rng, params.depth_min, params.depth_max);
  const std::size_t n_roots = draw_between(rng, params.roots_min, params.roots_max);

  ModelSpec spec;
  struct Pending {
    std::optional<std::size_t> parent;  // index into spec.nodes
    std::size_t depth;
    bool forced;
  };
  // Depth-first so ids come out in preorder.
  std::vector<Pending> stack;
  for (std::size_t r = 0; r < n_roots; ++r) stack.push_back({std::nullopt, 0, true});
  while (!stack.empty()) {
    Pending cur = stack.back();
    stack.pop_back();
    const std::size_t idx = spec.nodes.size();
    spec.nodes.push_back({"n" + std::to_string(idx), std::nullopt, {}});
    if (cur.parent) {
      spec.nodes[idx].parent = spec.nodes[*cur.parent].id;
      spec.nodes[*cur.parent].children.push_back(spec.nodes[idx].id);
    }
    const bool split =
        cur.depth < depth && (cur.forced || uniform01(rng) < params.split_probability);
    if (split) {
      const std::size_t k = draw_between(rng, params.branch_min, params.branch_max);
      for (std::size_t c = k; c-- > 0;) stack.push_back({idx, cur.depth + 1, c == 0});
    } else {
      spec.mu[spec.nodes[idx].id] = draw_mass(rng, params.masses, params.mu_zero_probability);
      spec.nu[spec.nodes[idx].id] = draw_mass(rng, params.masses, params.nu_zero_probability);
    }
  }
  return DyadicModel::build(spec, BuildOptions{params.branch_min < 2 ? 1u : 2u});
}

}  // namespace mgmax
