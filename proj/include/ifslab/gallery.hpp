#pragma once

// Named example systems with the properties they are expected to have.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifslab/errors.hpp"
#include "ifslab/generators.hpp"
#include "ifslab/semigroup.hpp"

namespace ifslab {

struct Expectation {
  std::string property;
  bool holds = false;
  std::string note;
  std::optional<double> x;      // base point, for pointwise properties
  std::optional<double> delta;  // target constant, for cofinite sensitivity
  std::optional<double> eta;    // expected expansion constant
};

struct GalleryEntry {
  std::string name;
  IfsSystem system;
  std::vector<Expectation> expected;
};

using GalleryParams = std::map<std::string, double>;

inline const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names{"rotation_flip", "ex42_hinges", "thm34_ns_rotation",
                                              "cor33_morse_smale", "prop35_expanding"};
  return names;
}

namespace detail {

inline double golden_conjugate() { return (std::sqrt(5.0) - 1.0) / 2.0; }

inline double take(GalleryParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  const double v = it->second;
  p.erase(it);
  return v;
}

inline void reject_leftovers(const GalleryParams& p, const std::string& name) {
  if (!p.empty())
    throw InvalidInput("gallery entry '" + name + "' has no parameter '" + p.begin()->first + "'");
}

// Hinge maps must stretch U1 = (0, 1/2) and U2 = (1/2, 1) beyond themselves
// while keeping 0 on the boundary of both images.
inline void check_hinges(const Generator& h1, const Generator& h2) {
  const bool fixes_p = h1.lift(0.0) == 0.0 && h1.lift(1.0) == 1.0 && h2.lift(0.0) == 0.0 &&
                       h2.lift(1.0) == 1.0;
  const bool u1_grows = h1.lift(0.5) > 0.5;
  const bool u2_grows = h2.lift(0.5) < 0.5;
  if (!fixes_p || !u1_grows || !u2_grows)
    throw InvalidInput("ex42_hinges: hinge maps must fix 0 and strictly enlarge U1 and U2");
}

}  // namespace detail

/// Builds a gallery system. Recognised overrides: alpha (rotation angle),
/// lambda (north-south multiplier), s (hinge displacement).
inline GalleryEntry build_example(const std::string& name, GalleryParams params = {}) {
  GalleryEntry e;
  e.name = name;
  if (name == "rotation_flip") {
    const double alpha = detail::take(params, "alpha", detail::golden_conjugate());
    detail::reject_leftovers(params, name);
    e.system = IfsSystem({Generator::rotation(alpha), Generator::flip()});
    e.expected = {
        {"transitivity", true, "images of a small arc under rotations reach every arc", {}, {}, {}},
        {"periodic_density", true, "the flip squared fixes every point", {}, {}, {}},
        {"sensitivity", false, "isometries never separate nearby points", {}, {}, {}},
    };
  } else if (name == "ex42_hinges") {
    const double lambda = detail::take(params, "lambda", 1.8);
    const double s = detail::take(params, "s", 0.1);
    detail::reject_leftovers(params, name);
    if (!(lambda > 1.0 && lambda < 2.0))
      throw InvalidInput("ex42_hinges: lambda must lie in (1, 2) so that 1/2 < f'(p) < 1");
    if (!(s > 0.0 && s < 0.5)) throw InvalidInput("ex42_hinges: s must lie in (0, 1/2)");
    const Generator f = Generator::north_south(0.5, lambda);
    const Generator h1 = Generator::piecewise_linear({{0.0, 0.0}, {0.5, 0.5 + s}, {1.0, 1.0}});
    const Generator h2 = Generator::piecewise_linear({{0.0, 0.0}, {0.5, 0.5 - s}, {1.0, 1.0}});
    detail::check_hinges(h1, h2);
    e.system = IfsSystem({f, f.inverse(), h1, h2});
    e.expected = {
        {"s_transitivity", true, "finitely many images of any arc cover the circle", {}, {}, {}},
        {"minimality", false, "every generator fixes p = 0", {}, {}, {}},
        {"strong_transitivity", false, "every inverse generator fixes p = 0", {}, {}, {}},
        {"sensitivity", true, "S-transitive but not minimal", {}, {}, {}},
        {"almost_periodic", false, "orbits away from p accumulate on p", 0.3, {}, {}},
        {"almost_periodic", true, "p is fixed by every generator", 0.0, {}, {}},
    };
  } else if (name == "thm34_ns_rotation") {
    const double alpha = detail::take(params, "alpha", detail::golden_conjugate());
    const double lambda = detail::take(params, "lambda", 2.0);
    detail::reject_leftovers(params, name);
    const Generator f = Generator::north_south(0.0, lambda);
    e.system = IfsSystem({f, f.inverse(), Generator::rotation(alpha), Generator::rotation(-alpha)});
    e.expected = {
        {"strong_transitivity", true, "inverse system contains an irrational rotation", {}, {}, {}},
        {"repelling_fixed_point", true, "the north-south map repels from 0", {}, {}, {}},
        {"sensitivity", true, "strongly transitive with a repelling fixed point", {}, {}, {}},
    };
  } else if (name == "cor33_morse_smale") {
    const double alpha = detail::take(params, "alpha", detail::golden_conjugate());
    detail::reject_leftovers(params, name);
    e.system = IfsSystem({Generator::north_south(0.0, 2.0), Generator::north_south(0.25, 1.5),
                          Generator::rotation(alpha), Generator::rotation(-alpha)});
    e.expected = {
        {"sensitivity", true, "hyperbolic fixed points plus strong transitivity", {}, {}, {}},
    };
  } else if (name == "prop35_expanding") {
    detail::reject_leftovers(params, name);
    e.system = IfsSystem({Generator::expanding(2), Generator::expanding(3)});
    e.expected = {
        {"expanding", true, "derivatives 2 and 3 everywhere", {}, {}, 0.5},
        {"cofinite_sensitivity", true, "images reach the full circle and stay there", {}, 0.2, {}},
    };
  } else {
    throw UnknownExample("unknown gallery entry '" + name + "'");
  }
  return e;
}

}  // namespace ifslab
