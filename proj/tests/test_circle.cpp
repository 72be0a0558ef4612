#include <gtest/gtest.h>

#include <random>

#include "ifslab/circle.hpp"
#include "oracle.hpp"

using namespace ifslab;

TEST(Circle, NormalisesIntoUnitInterval) {
  EXPECT_DOUBLE_EQ(CirclePoint(1.25).value(), 0.25);
  EXPECT_DOUBLE_EQ(CirclePoint(-0.25).value(), 0.75);
  EXPECT_EQ(CirclePoint(1.0).value(), 0.0);
  EXPECT_EQ(CirclePoint(1.0 - 1e-16).value(), 0.0);
  EXPECT_EQ(CirclePoint(-1e-17).value(), 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 10000; ++i) {
    const double v = CirclePoint(u(rng)).value();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(Circle, DistanceExamples) {
  EXPECT_NEAR(circ_dist(0.1, 0.9), 0.2, 1e-15);
  EXPECT_EQ(circ_dist(0.37, 0.37), 0.0);
  EXPECT_EQ(circ_dist(0.0, 0.5), 0.5);
}

TEST(Circle, MetricAxiomsOnRandomTriples) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    ASSERT_NEAR(circ_dist(a, b), circ_dist(b, a), 1e-12);
    ASSERT_LE(circ_dist(a, c), circ_dist(a, b) + circ_dist(b, c) + 1e-12);
    ASSERT_LE(circ_dist(a, b), 0.5);
    ASSERT_NEAR(circ_dist(a, b), oracle::dist(a, b), 1e-12);
  }
}

TEST(Circle, ArcDiameter) {
  EXPECT_DOUBLE_EQ(arc_diameter(Arc(0.0, 0.3)), 0.3);
  EXPECT_DOUBLE_EQ(arc_diameter(Arc(0.2, 0.8)), 0.5);
  EXPECT_DOUBLE_EQ(arc_diameter(Arc(0.0, 1.0)), 0.5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Arc a(u(rng), 0.5 * u(rng));
    ASSERT_NEAR(arc_diameter(a), circ_dist(a.start(), a.end()), 1e-12);
  }
}

TEST(Circle, ArcMembershipWraps) {
  const Arc a(0.9, 0.2);
  EXPECT_TRUE(a.contains(CirclePoint(0.95)));
  EXPECT_TRUE(a.contains(CirclePoint(0.05)));
  EXPECT_TRUE(a.contains(CirclePoint(0.9)));
  EXPECT_FALSE(a.contains(CirclePoint(0.5)));
  EXPECT_TRUE(Arc(0.3, 0.0).contains(CirclePoint(0.3)));
  EXPECT_TRUE(Arc::full_circle().contains(CirclePoint(0.77)));
  EXPECT_NEAR(a.distance_to(CirclePoint(0.15)), 0.05, 1e-12);
}

TEST(Circle, BallIsCentred) {
  const Arc b = Arc::ball(CirclePoint(0.005), 0.01);
  EXPECT_NEAR(b.start().value(), 0.995, 1e-15);
  EXPECT_DOUBLE_EQ(b.length(), 0.02);
  EXPECT_NEAR(circ_dist(b.midpoint(), CirclePoint(0.005)), 0.0, 1e-15);
  EXPECT_TRUE(Arc::ball(CirclePoint(0.2), 0.5).is_full());
}

TEST(Circle, ArcGapExamples) {
  EXPECT_NEAR(arc_gap(Arc(0.0, 0.1), Arc(0.2, 0.1)), 0.1, 1e-12);
  EXPECT_EQ(arc_gap(Arc(0.0, 0.3), Arc(0.2, 0.3)), 0.0);
  // Across the wraparound. Arc(0.9, 0.05) = [0.9, 0.95] and
  // Arc(0.05, 0.05) = [0.05, 0.1]: the nearest points are 0.95 and 0.05.
  const double brute = oracle::arc_gap(0.9, 0.05, 0.05, 0.05);
  EXPECT_NEAR(brute, 0.1, 1e-9);
  EXPECT_NEAR(arc_gap(Arc(0.9, 0.05), Arc(0.05, 0.05)), brute, 1e-9);
}

TEST(Circle, ArcGapMatchesBruteForce) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double s1 = u(rng), l1 = 0.4 * u(rng), s2 = u(rng), l2 = 0.4 * u(rng);
    const double g = arc_gap(Arc(s1, l1), Arc(s2, l2));
    const double brute = oracle::arc_gap(s1, l1, s2, l2, 401);
    // The brute force samples with spacing <= 0.001.
    ASSERT_NEAR(g, brute, 1.5e-3) << s1 << " " << l1 << " " << s2 << " " << l2;
    ASSERT_LE(g, brute + 1e-12);
  }
}

TEST(Circle, ArcGapZeroIffIntersecting) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Arc a(u(rng), 0.3 * u(rng));
    const Arc b(u(rng), 0.3 * u(rng));
    bool meet = false;
    for (int k = 0; k <= 2000 && !meet; ++k) meet = b.contains(a.at(a.length() * k / 2000.0), 1e-12);
    for (int k = 0; k <= 2000 && !meet; ++k) meet = a.contains(b.at(b.length() * k / 2000.0), 1e-12);
    ASSERT_EQ(arc_gap(a, b) == 0.0, meet);
  }
}

TEST(Circle, UniformNetAndGaps) {
  const auto net = uniform_net(4);
  ASSERT_EQ(net.size(), 4u);
  EXPECT_DOUBLE_EQ(net[0].value(), 0.125);
  EXPECT_DOUBLE_EQ(net[3].value(), 0.875);
  const Gap g = largest_gap({0.1, 0.2, 0.9});
  EXPECT_NEAR(g.length, 0.7, 1e-15);
  EXPECT_NEAR(g.start.value(), 0.2, 1e-15);
  EXPECT_NEAR(largest_gap({0.3}).length, 1.0, 1e-15);
  std::vector<double> pts;
  for (auto p : uniform_net(50)) pts.push_back(p.value());
  EXPECT_TRUE(is_eps_dense(pts, 0.0101));
  EXPECT_FALSE(is_eps_dense(pts, 0.0099));
}
