#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dmd/pwl.hpp"

using namespace dmd;
using PWL = PiecewiseLinearConcave;
using Ext = PiecewiseLinearConcave::Extension;

TEST_CASE("construction and evaluation") {
  PWL plateau({{0.0, 0.0}, {1.0, 0.0}}, Ext::Constant);
  CHECK(!plateau.evaluate(-0.1).has_value());
  CHECK(plateau.evaluate(5.0) == 0.0);
  CHECK(plateau.evaluate(0.5) == 0.0);

  PWL f({{0.0, 0.0}, {1.0, 2.0}, {2.0, 3.0}}, Ext::Constant);
  CHECK(*f.evaluate(0.5) == doctest::Approx(1.0));
  CHECK(*f.evaluate(1.5) == doctest::Approx(2.5));
  CHECK(*f.evaluate(10.0) == doctest::Approx(3.0));

  PWL g({{0.0, 0.0}, {1.0, 2.0}, {2.0, 3.0}}, Ext::LastSlope);
  CHECK(*g.evaluate(4.0) == doctest::Approx(5.0));

  CHECK_THROWS_AS(PWL({{0.0, 0.0}, {1.0, 1.0}, {2.0, 3.0}}, Ext::Constant),
                  std::invalid_argument);  // convex kink
  CHECK_THROWS_AS(PWL({{1.0, 0.0}, {0.0, 1.0}}, Ext::Constant), std::invalid_argument);
  CHECK_THROWS_AS(PWL({}, Ext::Constant), std::invalid_argument);
  // Constant extension after a decreasing last segment breaks concavity.
  CHECK_THROWS_AS(PWL({{0.0, 1.0}, {1.0, 0.0}}, Ext::Constant), std::invalid_argument);
  CHECK_NOTHROW(PWL({{0.0, 1.0}, {1.0, 0.0}}, Ext::LastSlope));
}

TEST_CASE("breakpoints evaluate exactly") {
  PWL f({{0.0, 0.3}, {0.7, 1.1}, {2.0, 1.4}}, Ext::Constant);
  CHECK(*f.evaluate(0.0) == 0.3);
  CHECK(*f.evaluate(0.7) == 1.1);
  CHECK(*f.evaluate(2.0) == 1.4);
}

TEST_CASE("upper envelope") {
  auto seg = PWL::upper_envelope({{0.0, 0.0}, {1.0, 1.0}}, Ext::LastSlope);
  CHECK(seg.num_breakpoints() == 2);

  auto hull = PWL::upper_envelope({{0.0, 0.0}, {0.5, 0.2}, {1.0, 1.0}}, Ext::LastSlope);
  CHECK(hull.num_breakpoints() == 2);
  CHECK(*hull.evaluate(0.5) == doctest::Approx(0.5));

  // Duplicate abscissae keep the max ordinate.
  auto dup = PWL::upper_envelope({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.5}}, Ext::LastSlope);
  CHECK(*dup.evaluate(0.0) == 1.0);

  // The (utility, surplus) points of uniform{1,2}.
  auto su = PWL::upper_envelope({{0.0, 1.0}, {0.5, 1.5}}, Ext::Constant);
  CHECK(*su.evaluate(0.25) == doctest::Approx(1.25));

  CHECK_THROWS_AS(PWL::upper_envelope({}, Ext::Constant), std::invalid_argument);
}

TEST_CASE("envelope dominates input and is idempotent") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.0, 10.0), uy(-5.0, 5.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<PWL::Point> pts;
    for (int i = 0; i < 30; ++i) pts.push_back({ux(rng), uy(rng)});
    auto env = PWL::upper_envelope(pts, Ext::LastSlope);
    for (const auto& p : pts) CHECK(*env.evaluate(p.c) >= p.y - 1e-12);
    std::vector<PWL::Point> again;
    for (std::size_t i = 0; i < env.num_breakpoints(); ++i)
      again.push_back({env.xs()[i], env.ys()[i]});
    auto env2 = PWL::upper_envelope(again, Ext::LastSlope);
    REQUIRE(env2.num_breakpoints() == env.num_breakpoints());
    for (std::size_t i = 0; i < env.num_breakpoints(); ++i) {
      CHECK(env2.xs()[i] == env.xs()[i]);
      CHECK(env2.ys()[i] == env.ys()[i]);
    }
  }
}

TEST_CASE("argmax") {
  PWL tent({{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}}, Ext::LastSlope);
  auto [c, v] = tent.argmax();
  CHECK(c == 1.0);
  CHECK(v == 1.0);

  PWL flat({{0.0, 2.0}, {3.0, 2.0}}, Ext::Constant);
  CHECK(flat.argmax().first == 0.0);  // tie toward the smallest abscissa

  PWL dec({{0.0, 2.0}, {1.0, 1.0}}, Ext::LastSlope);
  CHECK(dec.argmax().first == 0.0);
  CHECK(dec.argmax().second == 2.0);

  PWL rising({{0.0, 0.0}, {1.0, 1.0}}, Ext::LastSlope);
  CHECK_THROWS_AS(rising.argmax(), std::logic_error);
}

TEST_CASE("argmax dominates random evaluations") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ux(0.0, 4.0);
  PWL f = PWL::upper_envelope(
      {{0.0, 0.0}, {0.5, 0.9}, {1.0, 1.4}, {2.0, 1.8}, {3.0, 1.5}, {4.0, 0.2}}, Ext::LastSlope);
  double best = f.argmax().second;
  for (int i = 0; i < 1000; ++i) CHECK(best >= *f.evaluate(ux(rng)) - 1e-12);
}

TEST_CASE("add_linear") {
  PWL plateau({{0.0, 0.0}, {1.0, 0.0}}, Ext::Constant);
  auto tilted = plateau.add_linear(-1.0);
  CHECK(*tilted.evaluate(1.0) == doctest::Approx(-1.0));
  CHECK(*tilted.evaluate(3.0) == doctest::Approx(-3.0));
  CHECK(tilted.extension_slope() == -1.0);

  auto same = plateau.add_linear(0.0);
  CHECK(*same.evaluate(0.7) == 0.0);
  CHECK(same.extension_slope() == 0.0);
}

TEST_CASE("adaptive fit recovers a smooth concave function") {
  auto fn = [](double c) { return -(c - 2.0) * (c - 2.0); };
  auto fit = adaptive_concave_fit(fn, 0.0, 5.0, 0.01, false);
  // Approximation bound: within 0.01 below, never above by more than noise.
  for (double c = 0.0; c <= 5.0; c += 0.0131) {
    double approx = *fit.evaluate(c);
    CHECK(approx <= fn(c) + 1e-9);
    CHECK(approx >= fn(c) - 0.01);
  }
  auto [c, v] = fit.argmax();
  CHECK(v == doctest::Approx(0.0).epsilon(0.01));
  CHECK(c == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("adaptive fit degenerate interval") {
  auto fit = adaptive_concave_fit([](double) { return 3.0; }, 1.0, 1.0, 0.01, false);
  CHECK(*fit.evaluate(1.0) == 3.0);
  CHECK(*fit.evaluate(7.0) == 3.0);
}
