#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "doctest.h"
#include "fixtures.hpp"
#include "mgmax/error.hpp"
#include "mgmax/sawyer.hpp"

using namespace mgmax;

namespace {

const Exponent kInf = Exponent::infinity();

SawyerInstance single(double omega, double w, double p) {
  return {testing::make_single_leaf(1, 1), {omega}, {w}, 1.0, p};
}

SawyerInstance random_instance(std::uint64_t seed) {
  Rng rng = substream(seed, {10});
  SawyerInstance inst{testing::random_small_model(seed), {}, {}, 0.0, 0.0};
  inst.alpha = 0.1 + 0.9 * uniform01(rng);
  inst.p = 1.1 + 3.0 * uniform01(rng);
  inst.omega = testing::random_nonnegative(inst.model.leaf_count(), rng, 0.1);
  inst.w = testing::random_nonnegative(inst.model.leaf_count(), rng, 0.0);
  for (std::size_t k = 0; k < inst.w.size(); ++k) {
    if (inst.omega[k] == 0.0 && k % 2 == 0) inst.w[k] = 0.0;
  }
  return inst;
}

}  // namespace

TEST_CASE("reduce_three_to_two on a single atom") {
  const auto red = reduce_three_to_two(single(1, 4, 2));
  CHECK(red.reduced.leaf_masses(Measure::mu)[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(red.transform[0] == doctest::Approx(4.0).epsilon(1e-15));

  const auto rep = verify_reduction(single(1, 4, 2), LeafValues{3}, kInf);
  CHECK(rep.holds);
  CHECK(rep.norm_g == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(rep.norm_f == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(integrate(red.reduced, transform_function(red, LeafValues{3}), 0, Measure::mu) ==
        doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("unit density is the identity transform") {
  auto inst = random_instance(3);
  std::fill(inst.w.begin(), inst.w.end(), 1.0);
  const auto red = reduce_three_to_two(inst);
  for (std::size_t k = 0; k < inst.omega.size(); ++k) {
    CHECK(red.reduced.leaf_masses(Measure::mu)[k] == inst.omega[k]);
    CHECK(red.transform[k] == 1.0);
  }
}

TEST_CASE("null base measure and rejected densities") {
  const auto red = reduce_three_to_two(single(0, 7, 3));
  CHECK(red.reduced.leaf_masses(Measure::mu)[0] == 0.0);
  CHECK(reduce_three_to_two(single(0, 0, 3)).reduced.leaf_masses(Measure::mu)[0] == 0.0);
  CHECK_THROWS_WITH_AS(reduce_three_to_two(single(2, 0, 3)), doctest::Contains("infinite"), InvalidInput);
  CHECK_THROWS_AS(reduce_three_to_two(single(1, 1, 1)), InvalidInput);
  auto bad_alpha = single(1, 1, 2);
  bad_alpha.alpha = 0.0;
  CHECK_THROWS_AS(reduce_three_to_two(bad_alpha), InvalidInput);
}

TEST_CASE("exponent identity p'(1 - 1/p) = 1 in exact arithmetic") {
  using boost::multiprecision::cpp_rational;
  for (auto [num, den] : {std::pair{3, 2}, {2, 1}, {5, 2}, {7, 3}, {101, 100}, {1000, 1}}) {
    const cpp_rational p(num, den);
    const cpp_rational p_conj = p / (p - 1);
    CHECK(p_conj * (1 - 1 / p) == 1);
    CHECK(1 / p + 1 / p_conj == 1);
  }
}

TEST_CASE("reduction identities and ratio invariance on random instances") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = random_instance(seed);
    const auto red = reduce_three_to_two(inst);
    Rng rng = substream(seed, {11});
    for (int trial = 0; trial < 5; ++trial) {
      const auto f = testing::random_nonnegative(inst.model.leaf_count(), rng);
      for (Exponent q : {kInf, Exponent::finite(inst.p * 2)}) {
        const auto rep = verify_reduction(inst, f, q);
        CHECK(rep.holds);
        const auto g = transform_function(red, f);
        CHECK(two_measure_ratio(red, g, q) == doctest::Approx(three_measure_ratio(inst, f, q)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("truncation at Q matches the full classical operator on Q") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto m = testing::random_small_model(seed);
    Rng rng = substream(seed, {12});
    const auto omega = testing::random_nonnegative(m.leaf_count(), rng, 0.0);
    CHECK(classical_truncation_gap(m, omega, 0.3 + 0.7 * uniform01(rng)).max_gap <= 1e-15);
  }
  // With a null cube the zero-coefficient convention opens a gap, which is
  // reported.
  const auto m = testing::make_e1();
  const auto gap = classical_truncation_gap(m, LeafValues{0, 1}, 1.0);
  CHECK(gap.max_gap > 0.0);
  CHECK(m.id(*gap.worst_cube) == "L1");
}
