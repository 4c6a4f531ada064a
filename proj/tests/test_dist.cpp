#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "dmd/dist.hpp"

using namespace dmd;

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(DiscreteDistribution({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDistribution({1.0, 1.0}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDistribution({2.0, 1.0}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDistribution({1.0, 2.0}, {0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDistribution({1.0, 2.0}, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDistribution({-1.0, 2.0}, {0.5, 0.5}), std::invalid_argument);
  CHECK_NOTHROW(DiscreteDistribution({0.0, 2.0}, {0.5, 0.5}));
}

TEST_CASE("equal revenue distribution") {
  CHECK_THROWS_AS(equal_revenue_discrete(0), std::invalid_argument);

  auto one = equal_revenue_discrete(1);
  CHECK(one.size() == 1);
  CHECK(one.value(0) == 1.0);

  auto er = equal_revenue_discrete(5);
  REQUIRE(er.size() == 5);
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(er.value(j) * er.tail(j) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(er.expected_value() == doctest::Approx(137.0 / 60.0).epsilon(1e-12));

  for (int T : {2, 7, 40}) {
    auto d = equal_revenue_discrete(T);
    for (std::size_t j = 0; j < d.size(); ++j)
      CHECK(d.value(j) * d.tail(j) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("expected value") {
  CHECK(DiscreteDistribution({1.0}, {1.0}).expected_value() == 1.0);
  CHECK(DiscreteDistribution({1.0, 2.0}, {0.5, 0.5}).expected_value() == doctest::Approx(1.5));
}

TEST_CASE("monopoly pricing") {
  auto u13 = DiscreteDistribution({1.0, 3.0}, {0.5, 0.5});
  auto r = monopoly(u13);
  CHECK(r.price == 3.0);
  CHECK(r.revenue == doctest::Approx(1.5));

  // All prices tie on the equal revenue distribution; the lowest must win.
  auto er = monopoly(equal_revenue_discrete(5));
  CHECK(er.price == 1.0);
  CHECK(er.revenue == doctest::Approx(1.0).epsilon(1e-12));

  auto pm = monopoly(DiscreteDistribution({2.5}, {1.0}));
  CHECK(pm.price == 2.5);
  CHECK(pm.revenue == 2.5);
}

TEST_CASE("virtual values") {
  auto pm = DiscreteDistribution({2.5}, {1.0});
  CHECK(virtual_value(pm, 0) == 2.5);
  CHECK_THROWS_AS(virtual_value(pm, 1), std::out_of_range);

  auto u13 = DiscreteDistribution({1.0, 3.0}, {0.5, 0.5});
  CHECK(virtual_value(u13, 0) == doctest::Approx(-1.0));
  CHECK(virtual_value(u13, 1) == 3.0);

  // Equal-revenue law: interior virtual values vanish.
  auto er = equal_revenue_discrete(5);
  for (std::size_t j = 0; j + 1 < er.size(); ++j)
    CHECK(virtual_value(er, j) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("price curves") {
  auto u12 = DiscreteDistribution({1.0, 2.0}, {0.5, 0.5});
  auto pc = price_curves(u12);
  REQUIRE(pc.size() == 3);
  CHECK(pc[0].price == 1.0);
  CHECK(pc[0].utility == doctest::Approx(0.5));
  CHECK(pc[0].surplus == doctest::Approx(1.5));
  CHECK(pc[1].price == 2.0);
  CHECK(pc[1].utility == 0.0);
  CHECK(pc[1].surplus == doctest::Approx(1.0));
  CHECK(pc[2].utility == 0.0);
  CHECK(pc[2].surplus == 0.0);

  auto pm = price_curves(DiscreteDistribution({1.0}, {1.0}));
  CHECK(pm[0].utility == 0.0);
  CHECK(pm[0].surplus == 1.0);
}

TEST_CASE("price curve laws on random distributions") {
  std::mt19937_64 rng(1234);
  for (int t = 0; t < 40; ++t) {
    auto d = dmdtest::random_dist(rng, 2, 10, 10.0);
    auto pc = price_curves(d);
    for (std::size_t i = 0; i < pc.size(); ++i) {
      if (i > 0) {
        CHECK(pc[i].utility <= pc[i - 1].utility + 1e-12);
        CHECK(pc[i].surplus <= pc[i - 1].surplus + 1e-12);
      }
      // S(p) = u(p) + p * Pr[v >= p]
      double tail = i < d.size() ? d.tail(i) : 0.0;
      CHECK(pc[i].surplus ==
            doctest::Approx(pc[i].utility + pc[i].price * tail).epsilon(1e-12));
    }
    // Monopoly revenue equals the best posted price.
    double best = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) best = std::max(best, d.value(j) * d.tail(j));
    CHECK(monopoly(d).revenue == doctest::Approx(best).epsilon(1e-12));
  }
}
