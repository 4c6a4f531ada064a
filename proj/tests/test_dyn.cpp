#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "dmd/dyn.hpp"
#include "dmd/oracle.hpp"

using namespace dmd;

TEST_CASE("two point masses") {
  // v = 1 in both periods, deterministically. Selling both items extracts 2.
  std::vector<DiscreteDistribution> dists{DiscreteDistribution({1.0}, {1.0}),
                                          DiscreteDistribution({1.0}, {1.0})};
  OptimalPolicy pol(dists, 0.01, false);
  CHECK(pol.c0() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(pol.predicted_revenue() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(expected_revenue(pol) == doctest::Approx(2.0).epsilon(1e-9));

  auto trace = execute(pol, {1.0, 1.0});
  REQUIRE(trace.size() == 2);
  CHECK(trace[0].charged == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(trace[1].charged == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(trace[0].stage_utility == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(trace[0].state_out >= -1e-12);

  auto rep = verify(pol);
  CHECK(rep.max_pic_violation <= 1e-9);
  CHECK(rep.min_stage_utility >= -1e-9);
}

TEST_CASE("k=1 reduces to monopoly pricing") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    auto d = dmdtest::random_dist(rng, 2, 6, 6.0);
    OptimalPolicy pol({d}, 0.01, false);
    CHECK(expected_revenue(pol) == doctest::Approx(monopoly(d).revenue).epsilon(1e-7));
  }
}

TEST_CASE("final-stage mechanism matches constrained surplus") {
  auto u12 = DiscreteDistribution({1.0, 2.0}, {0.5, 0.5});
  auto u13 = DiscreteDistribution({1.0, 3.0}, {0.5, 0.5});
  OptimalPolicy pol({u13, u12}, 0.01, false);
  for (double c : {0.0, 0.1, 0.25, 0.5, 1.0}) {
    const auto& m = pol.stage_mechanism(2, c);
    auto [ref, sval] = utility_constrained_surplus(u12, c);
    auto em = evaluate(m, u12);
    auto er = evaluate(ref, u12);
    CHECK(em.surplus == doctest::Approx(er.surplus).epsilon(1e-7));
    CHECK(em.expected_utility == doctest::Approx(c).epsilon(1e-7));
    CHECK(em.max_ic_violation <= 1e-8);
  }
  // Memoization returns the same object.
  const auto& a = pol.stage_mechanism(1, pol.c0());
  const auto& b = pol.stage_mechanism(1, pol.c0());
  CHECK(&a == &b);
  // State clamping and the hard floor.
  CHECK_NOTHROW(pol.stage_mechanism(2, -5e-10));
  CHECK_THROWS_AS(pol.stage_mechanism(2, -1e-3), std::domain_error);
}

TEST_CASE("input validation on execute") {
  auto u12 = DiscreteDistribution({1.0, 2.0}, {0.5, 0.5});
  OptimalPolicy pol({u12, u12}, 0.01, false);
  CHECK_THROWS_AS(execute(pol, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(execute(pol, {1.5, 1.0}), std::invalid_argument);
  CHECK_NOTHROW(execute(pol, {2.0, 1.0}));
}

TEST_CASE("oracle sandwich, zero stage utility, and tree round trip on the corpus") {
  auto corpus = dmdtest::corpus();
  int idx = 0;
  for (const auto& inst : corpus) {
    if (idx++ % 5 != 0) continue;  // subsample; the full corpus runs in acceptance
    double dp = 0.01;
    OptimalPolicy pol(inst, dp, false);
    double rev = expected_revenue(pol);
    auto oracle = global_lp_single(inst);
    double k = static_cast<double>(inst.size());
    CHECK(rev >= oracle.value - k * dp - 1e-6);
    CHECK(rev <= oracle.value + 1e-6);

    auto tree = policy_tree(pol);
    CHECK(tree_revenue(tree) == doctest::Approx(rev).epsilon(1e-7));
    // Charged totals equal the adjusted objective of the same tree.
    auto adj = original_to_adjusted(tree);
    CHECK(tree_adjusted_objective(adj) == doctest::Approx(rev).epsilon(1e-7));
    auto back = adjusted_to_original(adj);
    for (std::size_t l = 0; l < tree.levels(); ++l)
      for (std::size_t n = 0; n < tree.nodes(l); ++n)
        CHECK(back.p[l][n] == doctest::Approx(tree.p[l][n]).epsilon(1e-9));

    auto rep = verify(pol);
    CHECK(rep.max_pic_violation <= 10.0 * dp + 1e-6);
    CHECK(rep.min_stage_utility >= -1e-9);
    CHECK(rep.max_prefinal_stage_utility <= 1e-9);
  }
}

TEST_CASE("corrupting the policy tree is detected") {
  auto u12 = DiscreteDistribution({1.0, 2.0}, {0.5, 0.5});
  auto u13 = DiscreteDistribution({1.0, 3.0}, {0.5, 0.5});
  OptimalPolicy pol({u12, u13}, 0.01, false);
  auto tree = policy_tree(pol);
  auto clean = verify_tree(tree);
  CHECK(clean.max_pic_violation <= 10.0 * 0.01 + 1e-6);
  // Overcharge the high type in period 1: reporting low becomes profitable.
  tree.p[0][1] += 0.75;
  auto dirty = verify_tree(tree);
  CHECK(dirty.max_pic_violation > 0.5);
}

TEST_CASE("refining delta does not lose revenue") {
  auto u12 = DiscreteDistribution({1.0, 2.0}, {0.5, 0.5});
  auto u13 = DiscreteDistribution({1.0, 3.0}, {0.5, 0.5});
  std::vector<DiscreteDistribution> inst{u13, u12};
  double coarse = expected_revenue(OptimalPolicy(inst, 0.02, false));
  double fine = expected_revenue(OptimalPolicy(inst, 0.01, false));
  CHECK(fine >= coarse - 1e-7);
}
