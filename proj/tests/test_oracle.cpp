#include <gtest/gtest.h>

#include <cmath>

#include "ifslab/analysis.hpp"
#include "oracle.hpp"

using namespace ifslab;

// Finite rotation/flip groups act on the lattice {i / D}; their verdicts are
// computed exactly by the oracle and compared with the detectors.

namespace {

struct Case {
  const char* name;
  IfsSystem system;
  oracle::LatticeSystem lattice;
};

std::vector<Case> cases() {
  return {
      {"rotation_quarter", IfsSystem({Generator::rotation(0.25)}), {200, {{1, 50}}}},
      {"rotation_sixth_flip", IfsSystem({Generator::rotation(1.0 / 6.0), Generator::flip()}),
       {600, {{1, 100}, {-1, 0}}}},
  };
}

struct Setting {
  double eps, r, delta;
};

// Radii chosen off the lattice spacing so that no distance ties a threshold.
const Setting kSettings[] = {{0.01, 0.01, 0.2}, {0.0913, 0.0512, 0.1}, {0.1313, 0.1313, 0.2}};

}  // namespace

class OracleEquivalence : public ::testing::TestWithParam<int> {};

TEST_P(OracleEquivalence, EveryDetectorAgrees) {
  const Setting s = kSettings[GetParam()];
  for (const Case& c : cases()) {
    AnalysisOptions opt;
    opt.res.eps = s.eps;
    opt.res.r = s.r;
    opt.delta = s.delta;
    const std::int64_t x_lattice = std::llround(opt.x * static_cast<double>(c.lattice.denom));
    ASSERT_EQ(static_cast<double>(x_lattice) / static_cast<double>(c.lattice.denom), opt.x);
    const oracle::LatticeVerdicts want = oracle::lattice_verdicts(
        c.lattice, opt.res.net_size, s.eps, s.r, s.delta, opt.periodic_len, x_lattice);

    const std::pair<const char*, bool> expected[] = {
        {"minimality", want.minimal},
        {"strong_transitivity", want.strongly_transitive},
        {"transitivity", want.transitive},
        {"s_transitivity", want.s_transitive},
        {"sensitivity", want.sensitive},
        {"cofinite_sensitivity", want.cofinitely_sensitive},
        {"periodic_density", want.periodic_dense},
        {"almost_periodic", want.almost_periodic},
        {"expanding", want.expanding},
        {"local_expanding", want.locally_expanding},
        {"repelling_fixed_point", want.has_repelling_fixed_point},
    };
    for (const auto& [prop, holds] : expected) {
      const PropertyResult got = run_property(c.system, prop, opt);
      EXPECT_EQ(got.holds, holds) << c.name << " " << prop << " eps=" << s.eps << " r=" << s.r;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Settings, OracleEquivalence, ::testing::Values(0, 1, 2));

TEST(Oracle, LatticeSelfCheck) {
  // The oracle itself: the quarter rotation has orbit {0, 1/4, 1/2, 3/4}.
  const oracle::LatticeSystem quarter{200, {{1, 50}}};
  EXPECT_EQ(quarter.orbit(0), (std::vector<std::int64_t>{0, 50, 100, 150}));
  EXPECT_EQ(quarter.elements().size(), 4u);
  const oracle::LatticeSystem dihedral{600, {{1, 100}, {-1, 0}}};
  EXPECT_EQ(dihedral.elements().size(), 12u);
  EXPECT_EQ(dihedral.orbit(0).size(), 6u);
}
