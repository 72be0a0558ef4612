#include <gtest/gtest.h>

#include <random>

#include "ifslab/generators.hpp"
#include "oracle.hpp"

using namespace ifslab;

namespace {

std::vector<Generator> sample_generators() {
  return {Generator::rotation(0.25),
          Generator::rotation(0.6180339887498949),
          Generator::flip(),
          Generator::north_south(0.0, 2.0),
          Generator::north_south(0.3, 1.8),
          Generator::piecewise_linear({{0.0, 0.0}, {0.5, 0.6}, {1.0, 1.0}}),
          Generator::piecewise_linear({{0.0, 0.0}, {0.5, 0.4}, {1.0, 1.0}}),
          Generator::piecewise_linear({{0.1, 1.0}, {0.4, 0.8}, {1.1, 0.0}}),
          Generator::expanding(2),
          Generator::expanding(3)};
}

bool near_breakpoint(const Generator& g, double x, double h) {
  for (double b : g.breakpoints())
    if (circ_dist(x, b) <= 2.0 * h) return true;
  return false;
}

}  // namespace

TEST(Generators, EvalExamples) {
  EXPECT_NEAR(Generator::rotation(0.25)(CirclePoint(0.9)).value(), 0.15, 1e-15);
  EXPECT_NEAR(Generator::flip()(CirclePoint(0.3)).value(), 0.7, 1e-15);
  EXPECT_EQ(Generator::north_south(0.0, 2.0)(CirclePoint(0.0)).value(), 0.0);
  EXPECT_NEAR(Generator::expanding(2)(CirclePoint(0.7)).value(), 0.4, 1e-15);
}

TEST(Generators, InverseExamples) {
  EXPECT_NEAR(Generator::rotation(0.25).eval_inverse(CirclePoint(0.15)).value(), 0.9, 1e-15);
  const Generator f = Generator::flip();
  EXPECT_EQ(f.inverse().name(), "flip");
  for (double x : {0.0, 0.1, 0.3, 0.5, 0.77}) {
    EXPECT_NEAR(circ_dist(f(f(CirclePoint(x))), CirclePoint(x)), 0.0, 1e-15);
  }
  EXPECT_THROW((void)Generator::expanding(2).inverse(), NonInvertible);
  EXPECT_THROW((void)Generator::expanding(2).eval_inverse(CirclePoint(0.2)), NonInvertible);
}

TEST(Generators, InverseRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const Generator& g : sample_generators()) {
    if (!g.invertible()) continue;
    const Generator inv = g.inverse();
    for (int i = 0; i < 1000; ++i) {
      const CirclePoint x(u(rng));
      ASSERT_LE(circ_dist(inv(g(x)), x), 1e-12) << g.name() << " at " << x.value();
      ASSERT_LE(circ_dist(g(inv(x)), x), 1e-12) << g.name() << " at " << x.value();
    }
  }
}

TEST(Generators, LiftConsistency) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const Generator& g : sample_generators()) {
    for (int i = 0; i < 1000; ++i) {
      const double t = u(rng);
      ASSERT_LE(circ_dist(g(CirclePoint(t)), CirclePoint(g.lift(t))), 1e-12) << g.name();
      // Degree-d lift: F(t + 1) = F(t) + d.
      ASSERT_NEAR(g.lift(t + 1.0) - g.lift(t), g.degree(), 1e-12) << g.name();
    }
  }
}

TEST(Generators, DerivativeExamples) {
  EXPECT_EQ(Generator::rotation(0.3).derivative(0.41), 1.0);
  EXPECT_EQ(Generator::expanding(2).derivative(0.41), 2.0);
  const Generator ns = Generator::north_south(0.0, 2.0);
  EXPECT_NEAR(ns.derivative(0.0), 2.0, 1e-12);
  const double fd = oracle::central_difference([&](double t) { return ns.lift(t); }, 0.0, 1e-7);
  EXPECT_NEAR(fd, 2.0, 1e-5);
}

TEST(Generators, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-6;
  for (const Generator& g : sample_generators()) {
    for (int i = 0; i < 1000; ++i) {
      const double x = u(rng);
      if (near_breakpoint(g, x, h)) continue;
      const double fd = oracle::central_difference([&](double t) { return g.lift(t); }, x, h);
      ASSERT_NEAR(g.derivative(x), fd, 1e-4) << g.name() << " at " << x;
    }
  }
}

TEST(Generators, DerivativeThrowsAtBreakpoint) {
  const Generator h1 = Generator::piecewise_linear({{0.0, 0.0}, {0.5, 0.6}, {1.0, 1.0}});
  try {
    (void)h1.derivative(0.5);
    FAIL() << "expected NotDifferentiable";
  } catch (const NotDifferentiable& e) {
    EXPECT_NEAR(e.left, 1.2, 1e-12);
    EXPECT_NEAR(e.right, 0.8, 1e-12);
  }
  EXPECT_THROW((void)h1.derivative(0.0), NotDifferentiable);
  EXPECT_THROW((void)h1.derivative(1.0), NotDifferentiable);
  EXPECT_NO_THROW((void)h1.derivative(0.25));
}

TEST(Generators, PiecewiseLinearValidation) {
  using BP = std::vector<std::pair<double, double>>;
  EXPECT_THROW(Generator::piecewise_linear(BP{{0.0, 0.0}}), InvalidInput);
  EXPECT_THROW(Generator::piecewise_linear(BP{{0.0, 0.0}, {0.9, 1.0}}), InvalidInput);
  EXPECT_THROW(Generator::piecewise_linear(BP{{0.0, 0.0}, {1.0, 2.0}}), InvalidInput);
  EXPECT_THROW(Generator::piecewise_linear(BP{{0.0, 0.0}, {0.5, 0.7}, {0.4, 0.8}, {1.0, 1.0}}),
               InvalidInput);
  EXPECT_THROW(Generator::piecewise_linear(BP{{0.0, 0.0}, {0.5, 1.2}, {1.0, 1.0}}), InvalidInput);
  EXPECT_THROW(Generator::north_south(0.0, 1.0), InvalidInput);
  EXPECT_THROW(Generator::expanding(1), InvalidInput);
}

TEST(Generators, MapArcExamples) {
  const Arc r = map_arc(Generator::rotation(0.25), Arc(0.1, 0.1));
  EXPECT_NEAR(r.start().value(), 0.35, 1e-15);
  EXPECT_NEAR(r.length(), 0.1, 1e-15);
  const Arc f = map_arc(Generator::flip(), Arc(0.1, 0.1));
  EXPECT_NEAR(f.start().value(), 0.8, 1e-15);
  EXPECT_NEAR(f.length(), 0.1, 1e-15);
  const Arc e = map_arc(Generator::expanding(2), Arc(0.4, 0.2));
  EXPECT_NEAR(e.start().value(), 0.8, 1e-15);
  EXPECT_NEAR(e.length(), 0.4, 1e-15);
  EXPECT_TRUE(map_arc(Generator::expanding(3), Arc(0.2, 0.4)).is_full());
}

TEST(Generators, MapArcContainsSampledImages) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto gens = sample_generators();
  for (int i = 0; i < 1000; ++i) {
    const Generator& g = gens[i % gens.size()];
    const Arc a(u(rng), 0.6 * u(rng));
    const Arc img = map_arc(g, a);
    for (int k = 0; k < 100; ++k) {
      const CirclePoint p = a.at(a.length() * k / 99.0);
      ASSERT_TRUE(img.contains(g(p), 1e-12)) << g.name();
    }
    if (g.invertible() && !img.is_full()) {
      const CirclePoint e1 = g(a.start()), e2 = g(a.end());
      const bool ends = (circ_dist(img.start(), e1) <= 1e-12 && circ_dist(img.end(), e2) <= 1e-12) ||
                        (circ_dist(img.start(), e2) <= 1e-12 && circ_dist(img.end(), e1) <= 1e-12);
      ASSERT_TRUE(ends) << g.name();
    }
  }
}

TEST(Generators, FixedPointsOfNorthSouth) {
  const auto fps = fixed_points(Generator::north_south(0.0, 2.0));
  ASSERT_EQ(fps.size(), 2u);
  EXPECT_NEAR(fps[0].location.value(), 0.0, 1e-12);
  EXPECT_NEAR(fps[0].multipliers.left, 2.0, 1e-9);
  EXPECT_NEAR(fps[0].multipliers.right, 2.0, 1e-9);
  EXPECT_EQ(fps[0].classification, FixedPointClass::repelling);
  EXPECT_NEAR(fps[1].location.value(), 0.5, 1e-12);
  EXPECT_NEAR(fps[1].multipliers.left, 0.5, 1e-9);
  EXPECT_EQ(fps[1].classification, FixedPointClass::attracting);
  // The attractor's basin is the whole circle minus the repeller.
  EXPECT_GT(fps[1].basin.length(), 0.9);
  EXPECT_TRUE(fps[1].basin.contains(fps[1].location));
}

TEST(Generators, FixedPointsOfFlipAndRotation) {
  const auto flips = fixed_points(Generator::flip());
  ASSERT_EQ(flips.size(), 2u);
  EXPECT_NEAR(flips[0].location.value(), 0.0, 1e-12);
  EXPECT_NEAR(flips[1].location.value(), 0.5, 1e-12);
  EXPECT_EQ(flips[0].classification, FixedPointClass::nonhyperbolic);
  EXPECT_TRUE(fixed_points(Generator::rotation(0.6180339887498949)).empty());
}

TEST(Generators, FixedPointsOfExpandingMap) {
  // x -> 3x has fixed points 0 and 1/2.
  const auto fps = fixed_points(Generator::expanding(3));
  ASSERT_EQ(fps.size(), 2u);
  EXPECT_NEAR(fps[0].location.value(), 0.0, 1e-12);
  EXPECT_NEAR(fps[1].location.value(), 0.5, 1e-12);
  EXPECT_EQ(fps[1].classification, FixedPointClass::repelling);
}

TEST(Generators, HingeFixedPointIsSemistable) {
  // Slopes 1.2 on the left of the fixed point 0 going right, 0.8 coming in from the left.
  const auto fps = fixed_points(Generator::piecewise_linear({{0.0, 0.0}, {0.5, 0.6}, {1.0, 1.0}}));
  ASSERT_EQ(fps.size(), 1u);
  EXPECT_NEAR(fps[0].location.value(), 0.0, 1e-12);
  EXPECT_EQ(fps[0].classification, FixedPointClass::semistable);
}

TEST(Generators, ClassificationInvariants) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const Slopes m{u(rng), u(rng)};
    const auto c = classify_multipliers(m);
    if (c == FixedPointClass::repelling) {
      ASSERT_TRUE(m.left > 1 && m.right > 1);
    }
    if (c == FixedPointClass::attracting) {
      ASSERT_TRUE(m.left < 1 && m.right < 1);
    }
    if (c == FixedPointClass::semistable) {
      ASSERT_TRUE((m.left < 1) != (m.right < 1));
    }
  }
}
