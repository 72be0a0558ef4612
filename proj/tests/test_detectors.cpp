#include <gtest/gtest.h>

#include <cmath>

#include "ifslab/detectors.hpp"
#include "ifslab/gallery.hpp"

using namespace ifslab;

namespace {

constexpr double kGolden = 0.6180339887498949;

IfsSystem golden() { return IfsSystem({Generator::rotation(kGolden)}); }
IfsSystem north_south() { return IfsSystem({Generator::north_south(0.0, 2.0)}); }
IfsSystem rotation_flip() { return build_example("rotation_flip").system; }

Resolution deep() {
  Resolution res;
  res.depth = 200;
  return res;
}

}  // namespace

TEST(Detectors, ResolutionValidation) {
  Resolution res;
  EXPECT_NO_THROW(res.validate());
  for (double bad : {0.0, -0.1, 0.51}) {
    Resolution e = res;
    e.eps = bad;
    EXPECT_THROW(e.validate(), InvalidInput);
    Resolution r = res;
    r.r = bad;
    EXPECT_THROW(r.validate(), InvalidInput);
  }
  Resolution d = res;
  d.depth = 0;
  EXPECT_THROW(d.validate(), InvalidInput);
  Resolution n = res;
  n.net_size = 0;
  EXPECT_THROW(n.validate(), InvalidInput);
  Resolution b = res;
  b.budget = 0;
  EXPECT_THROW(b.validate(), InvalidInput);
}

TEST(Detectors, ArcFrontierDropsContainedArcs) {
  ArcFrontier f;
  EXPECT_TRUE(f.insert(Arc(0.1, 0.2)));
  EXPECT_FALSE(f.insert(Arc(0.15, 0.1)));
  EXPECT_FALSE(f.insert(Arc(0.1, 0.2)));
  EXPECT_TRUE(f.insert(Arc(0.05, 0.1)));
  EXPECT_TRUE(f.insert(Arc(0.9, 0.3)));   // wraps past 0
  EXPECT_FALSE(f.insert(Arc(0.95, 0.1)));
  EXPECT_FALSE(f.insert(Arc(0.02, 0.1)));
  EXPECT_TRUE(f.insert(Arc(0.0, 1.0)));
  EXPECT_FALSE(f.insert(Arc(0.4, 0.5)));
}

TEST(Detectors, MinimalityExamples) {
  const DensityReport rot = minimality_verdict(golden(), deep());
  EXPECT_TRUE(rot.verdict.holds);
  EXPECT_LE(rot.worst_gap, 0.02);

  const DensityReport ns = minimality_verdict(north_south(), Resolution{});
  EXPECT_FALSE(ns.verdict.holds);
  EXPECT_GT(ns.worst_gap, 0.02);

  Resolution small;
  small.net_size = 10;
  small.budget = 2000;
  const DensityReport ex = minimality_verdict(build_example("ex42_hinges").system, small);
  EXPECT_FALSE(ex.verdict.holds);
  EXPECT_EQ(ex.worst_point, 0.0);
  EXPECT_EQ(ex.worst_gap, 1.0);
  const auto p = std::find_if(ex.per_point.begin(), ex.per_point.end(),
                              [](const OrbitDensity& d) { return d.base == 0.0; });
  ASSERT_NE(p, ex.per_point.end());
  EXPECT_EQ(p->orbit_size, 1);
}

TEST(Detectors, DensityWitnessesReplay) {
  const IfsSystem ifs = build_example("thm34_ns_rotation").system;
  Resolution res;
  res.net_size = 20;
  for (Direction dir : {Direction::forward, Direction::backward}) {
    const DensityReport rep = dir == Direction::forward ? minimality_verdict(ifs, res)
                                                        : strong_transitivity_verdict(ifs, res);
    for (const auto& d : rep.per_point) {
      ASSERT_EQ(d.sample_points.size(), d.sample_words.size());
      for (std::size_t i = 0; i < d.sample_points.size(); ++i) {
        const CirclePoint got = dir == Direction::forward
                                    ? compose_word(ifs, d.sample_words[i], CirclePoint(d.base))
                                    : compose_word(ifs, d.sample_words[i], CirclePoint(d.sample_points[i]));
        const double want = dir == Direction::forward ? d.sample_points[i] : d.base;
        ASSERT_LE(circ_dist(got, CirclePoint(want)), 1e-10);
      }
      if (d.dense) {
        std::vector<double> pts = d.sample_points;
        ASSERT_LE(largest_gap(pts).length, 2.0 * res.eps + 1e-12);
      }
    }
  }
}

TEST(Detectors, StrongTransitivityExamples) {
  EXPECT_TRUE(strong_transitivity_verdict(golden(), deep()).verdict.holds);
  EXPECT_THROW(strong_transitivity_verdict(IfsSystem({Generator::expanding(2)}), Resolution{}),
               NonInvertible);
}

TEST(Detectors, TransitivityExamples) {
  const IfsSystem rf = rotation_flip();
  const TransitivityReport rep = topological_transitivity_verdict(rf, Resolution{});
  EXPECT_TRUE(rep.verdict.holds);
  EXPECT_FALSE(rep.failing_pair.has_value());
  // Witness replay: the image of U_u meets V_v.
  const double r = rep.verdict.resolution.r;
  for (std::size_t u = 0; u < rep.centers.size(); u += 7) {
    for (std::size_t v = 0; v < rep.centers.size(); ++v) {
      ASSERT_TRUE(rep.found[u][v]);
      const Arc img = map_arc_word(rf, rep.words[u][v], Arc::ball(CirclePoint(rep.centers[u]), r));
      ASSERT_LE(arc_gap(img, Arc::ball(CirclePoint(rep.centers[v]), r)), 1e-10);
    }
  }

  const TransitivityReport ns = topological_transitivity_verdict(north_south(), Resolution{});
  EXPECT_FALSE(ns.verdict.holds);
  ASSERT_TRUE(ns.failing_pair.has_value());
}

TEST(Detectors, STransitivityExamples) {
  const IfsSystem g = golden();
  const STransitivityReport rep = s_transitivity_verdict(g, Resolution{});
  EXPECT_TRUE(rep.verdict.holds);
  // Witness replay: the listed images eps-cover every net point.
  const Resolution res = rep.verdict.resolution;
  for (std::size_t i = 0; i < rep.covers.size(); i += 9) {
    const auto& c = rep.covers[i];
    const Arc u = Arc::ball(CirclePoint(c.u_center), res.r);
    std::vector<Arc> images;
    for (const Word& w : c.words) images.push_back(map_arc_word(g, w, u));
    for (CirclePoint p : uniform_net(res.net_size)) {
      double best = 1.0;
      for (const Arc& a : images) best = std::min(best, a.distance_to(p));
      ASSERT_LE(best, res.eps + 1e-10);
    }
  }
  EXPECT_FALSE(s_transitivity_verdict(north_south(), Resolution{}).verdict.holds);
}

TEST(Detectors, SensitivityOfIsometries) {
  const SensitivityReport rep = sensitivity_estimate(rotation_flip(), Resolution{});
  EXPECT_FALSE(rep.verdict.holds);
  EXPECT_LE(rep.delta_hat, 2.0 * 0.01 + 1e-9);
  for (const auto& s : rep.ladder) EXPECT_LE(s.delta_hat, 2.0 * s.r + 1e-12);
  for (const auto& rec : rep.per_point) ASSERT_LE(rec.separation, 2.0 * rec.r + 1e-12);
  EXPECT_EQ(rep.ladder.front().r, 0.1);
  EXPECT_EQ(rep.ladder.back().r, 0.01);
}

TEST(Detectors, SensitivityOfExpandingMap) {
  const IfsSystem e2({Generator::expanding(2)});
  const SensitivityReport rep = sensitivity_estimate(e2, Resolution{});
  EXPECT_TRUE(rep.verdict.holds);
  EXPECT_GE(rep.delta_hat, 0.2);
}

TEST(Detectors, SensitivityRecordsReplay) {
  const IfsSystem ifs = build_example("thm34_ns_rotation").system;
  const SensitivityReport rep = sensitivity_estimate(ifs, Resolution{});
  EXPECT_TRUE(rep.verdict.holds);
  EXPECT_GE(rep.delta_hat, 0.05);
  bool steered = false;
  for (const auto& rec : rep.per_point) {
    steered = steered || rec.strategy == Strategy::repeller_steered;
    ASSERT_LE(circ_dist(CirclePoint(rec.anchor), CirclePoint(rec.x)), rec.r + 1e-12);
    ASSERT_LE(circ_dist(CirclePoint(rec.partner), CirclePoint(rec.x)), rec.r + 1e-12);
    const double replay = circ_dist(compose_word(ifs, rec.word, CirclePoint(rec.anchor)),
                                    compose_word(ifs, rec.word, CirclePoint(rec.partner)));
    ASSERT_NEAR(replay, rec.separation, 1e-10);
  }
  EXPECT_TRUE(steered);
  // delta_hat is the minimum over net points at the smallest radius.
  double m = 1.0;
  for (const auto& rec : rep.per_point)
    if (rec.r == rep.ladder.back().r) m = std::min(m, rec.separation);
  EXPECT_EQ(m, rep.delta_hat);
}

TEST(Detectors, SeparationTimes) {
  const IfsSystem e2({Generator::expanding(2)});
  const int horizon = 40;
  const SeparationTimes st =
      separation_times(e2, Arc(0.3, 0.02), ExtensionRule::constant(1), 0.2, horizon);
  std::vector<int> expected;
  for (int n = 4; n <= horizon; ++n) expected.push_back(n);
  EXPECT_EQ(st.times, expected);
  EXPECT_EQ(st.letters.size(), static_cast<std::size_t>(horizon));

  for (const auto& rule : candidate_rules(2)) {
    EXPECT_TRUE(separation_times(rotation_flip(), Arc(0.1, 0.05), rule, 0.06, 30).times.empty())
        << rule.name();
    const auto t = separation_times(rotation_flip(), Arc(0.1, 0.05), rule, 0.04, 30);
    ASSERT_FALSE(t.times.empty());
    EXPECT_EQ(t.times.front(), 0);
  }
  EXPECT_THROW(separation_times(e2, Arc(0.1, 0.1), ExtensionRule::constant(2), 0.1, 5), InvalidInput);
}

TEST(Detectors, CofiniteSensitivity) {
  const IfsSystem e23({Generator::expanding(2), Generator::expanding(3)});
  const CofiniteReport rep = cofinite_sensitivity_verdict(e23, 0.2, Resolution{}, 100);
  EXPECT_TRUE(rep.verdict.holds);
  EXPECT_LE(rep.max_first_n, 6);
  // Replay one witness branch: the image of U stays separated over the window.
  const auto& w = rep.per_arc.front();
  const Arc u = Arc::ball(CirclePoint(w.u_center), 0.01);
  for (int n = w.first_n; n <= w.first_n + rep.window; ++n) {
    const Word prefix(std::vector<int>(w.letters.begin(), w.letters.begin() + n));
    ASSERT_GT(arc_diameter(map_arc_word(e23, prefix, u)), 0.2);
  }

  EXPECT_FALSE(cofinite_sensitivity_verdict(rotation_flip(), 0.1, Resolution{}, 100).verdict.holds);
  EXPECT_FALSE(cofinite_sensitivity_verdict(golden(), 0.05, Resolution{}, 100).verdict.holds);
  EXPECT_THROW(cofinite_sensitivity_verdict(golden(), 0.05, Resolution{}, 0), InvalidInput);
}

TEST(Detectors, PeriodicDensity) {
  const PeriodicDensityReport rf = periodic_density_verdict(rotation_flip(), 2, Resolution{});
  EXPECT_TRUE(rf.verdict.holds);
  for (const auto& p : rf.points)
    ASSERT_LE(circ_dist(compose_word(rotation_flip(), p.word, p.point), p.point), 1e-9);
  EXPECT_FALSE(periodic_density_verdict(golden(), 8, Resolution{}).verdict.holds);
}

TEST(Detectors, AlmostPeriodicity) {
  EXPECT_TRUE(almost_periodic_verdict(golden(), CirclePoint(0.3), deep()).verdict.holds);
  Resolution small;
  small.budget = 5000;
  const IfsSystem ex = build_example("ex42_hinges").system;
  EXPECT_TRUE(almost_periodic_verdict(ex, CirclePoint(0.0), small).verdict.holds);
  const AlmostPeriodicReport off = almost_periodic_verdict(ex, CirclePoint(0.3), small);
  EXPECT_FALSE(off.verdict.holds);
  ASSERT_TRUE(off.failing_y.has_value());
}

TEST(Detectors, NonminimalityWitness) {
  EXPECT_THROW(sensitivity_witness_from_nonminimality(golden(), deep()), NotApplicable);
  const NonminimalityWitness ns = sensitivity_witness_from_nonminimality(north_south(), Resolution{});
  EXPECT_GT(ns.delta_candidate, 0.0);
  EXPECT_NEAR(ns.delta_candidate, 0.25 * ns.distance, 1e-15);
  EXPECT_FALSE(ns.verification.holds);
}
