#pragma once

// Primitive circle maps. Every map is described by a lift R -> R, which is
// what all composition, derivative and fixed-point code works with.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ifslab/circle.hpp"
#include "ifslab/errors.hpp"

namespace ifslab {

struct Rotation {
  double alpha = 0.0;
};

/// x -> -x mod 1.
struct Flip {};

/// Orientation-preserving Morse-Smale map with a repelling fixed point at
/// `repeller` (multiplier lambda) and an attracting fixed point at the
/// antipode (multiplier 1/lambda). The lift is the tangent conjugate
///   F(t) = arctan(lambda * tan(pi t)) / pi
/// taken continuously and rotated so that t = 0 sits at the repeller.
struct NorthSouth {
  double repeller = 0.0;
  double lambda = 2.0;
};

/// Strictly monotone piecewise-linear lift given by breakpoints (x_i, y_i)
/// over one period: x_n - x_0 = 1 and y_n - y_0 = +-1.
struct PiecewiseLinear {
  std::vector<std::pair<double, double>> breakpoints;
};

/// x -> m x mod 1, m >= 2.
struct Expanding {
  int m = 2;
};

/// One-sided derivatives of a lift at a point.
struct Slopes {
  double left = 1.0;
  double right = 1.0;
};

class Generator {
 public:
  using Kind = std::variant<Rotation, Flip, NorthSouth, PiecewiseLinear, Expanding>;

  static Generator rotation(double alpha) { return Generator(Rotation{alpha}); }
  static Generator flip() { return Generator(Flip{}); }
  static Generator north_south(double repeller, double lambda) {
    if (!(lambda > 1.0) || !std::isfinite(lambda)) {
      throw InvalidInput("north_south: lambda must be a finite real > 1");
    }
    return Generator(NorthSouth{wrap_unit(repeller), lambda});
  }
  static Generator piecewise_linear(std::vector<std::pair<double, double>> breakpoints) {
    validate_pl(breakpoints);
    return Generator(PiecewiseLinear{std::move(breakpoints)});
  }
  static Generator expanding(int m) {
    if (m < 2) throw InvalidInput("expanding: m must be an integer >= 2");
    return Generator(Expanding{m});
  }

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

  [[nodiscard]] bool invertible() const noexcept {
    return !std::holds_alternative<Expanding>(kind_);
  }

  /// Topological degree of the lift: lift(t + 1) = lift(t) + degree.
  [[nodiscard]] int degree() const noexcept {
    return std::visit(
        [](const auto& g) -> int {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Flip>) return -1;
          else if constexpr (std::is_same_v<T, Expanding>) return g.m;
          else if constexpr (std::is_same_v<T, PiecewiseLinear>)
            return g.breakpoints.back().second > g.breakpoints.front().second ? 1 : -1;
          else return 1;
        },
        kind_);
  }

  /// True for maps that preserve circ_dist.
  [[nodiscard]] bool is_isometry() const noexcept {
    return std::holds_alternative<Rotation>(kind_) || std::holds_alternative<Flip>(kind_);
  }

  [[nodiscard]] std::string name() const {
    return std::visit(
        [](const auto& g) -> std::string {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Rotation>) return "rotation";
          else if constexpr (std::is_same_v<T, Flip>) return "flip";
          else if constexpr (std::is_same_v<T, NorthSouth>) return "north_south";
          else if constexpr (std::is_same_v<T, PiecewiseLinear>) return "piecewise_linear";
          else return "expanding";
        },
        kind_);
  }

  /// Lift evaluated on the real line.
  [[nodiscard]] double lift(double t) const {
    return std::visit(
        [t](const auto& g) -> double {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Rotation>) return t + g.alpha;
          else if constexpr (std::is_same_v<T, Flip>) return -t;
          else if constexpr (std::is_same_v<T, NorthSouth>)
            return g.repeller + tangent_lift(t - g.repeller, g.lambda);
          else if constexpr (std::is_same_v<T, PiecewiseLinear>) return pl_lift(g, t);
          else return g.m * t;
        },
        kind_);
  }

  [[nodiscard]] CirclePoint operator()(CirclePoint x) const { return CirclePoint(lift(x.value())); }

  /// The inverse map as a generator of the same family.
  [[nodiscard]] Generator inverse() const {
    return std::visit(
        [this](const auto& g) -> Generator {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Rotation>) return rotation(-g.alpha);
          else if constexpr (std::is_same_v<T, Flip>) return flip();
          else if constexpr (std::is_same_v<T, NorthSouth>)
            // The inverse swaps repeller and attractor and keeps lambda.
            return north_south(g.repeller + 0.5, g.lambda);
          else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
            std::vector<std::pair<double, double>> swapped;
            swapped.reserve(g.breakpoints.size());
            for (auto [x, y] : g.breakpoints) swapped.emplace_back(y, x);
            if (swapped.front().first > swapped.back().first)
              std::reverse(swapped.begin(), swapped.end());
            return piecewise_linear(std::move(swapped));
          } else {
            throw NonInvertible(name() + " map x -> " + std::to_string(g.m) +
                                "x is not invertible");
          }
        },
        kind_);
  }

  [[nodiscard]] CirclePoint eval_inverse(CirclePoint y) const { return inverse()(y); }

  /// One-sided derivatives of the lift; they differ only at breakpoints.
  [[nodiscard]] Slopes slopes(double t) const {
    return std::visit(
        [t](const auto& g) -> Slopes {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Rotation>) return {1.0, 1.0};
          else if constexpr (std::is_same_v<T, Flip>) return {-1.0, -1.0};
          else if constexpr (std::is_same_v<T, NorthSouth>) {
            const double d = tangent_derivative(t - g.repeller, g.lambda);
            return {d, d};
          } else if constexpr (std::is_same_v<T, PiecewiseLinear>) return pl_slopes(g, t);
          else return {static_cast<double>(g.m), static_cast<double>(g.m)};
        },
        kind_);
  }

  /// Derivative of the lift; throws at breakpoints.
  [[nodiscard]] double derivative(double t) const {
    const Slopes s = slopes(t);
    if (s.left != s.right) {
      throw NotDifferentiable("derivative undefined at breakpoint " + std::to_string(t), s.left,
                              s.right);
    }
    return s.left;
  }

  /// Breakpoints reduced to [0, 1); empty for smooth maps.
  [[nodiscard]] std::vector<double> breakpoints() const {
    std::vector<double> out;
    if (const auto* pl = std::get_if<PiecewiseLinear>(&kind_)) {
      for (std::size_t i = 0; i + 1 < pl->breakpoints.size(); ++i)
        out.push_back(wrap_unit(pl->breakpoints[i].first));
      std::sort(out.begin(), out.end());
    }
    return out;
  }

  /// Reparametrised copy of the tangent model, exposed for tests.
  static double tangent_lift(double t, double lambda) {
    const double n = std::floor(t);
    const double s = t - n;
    if (s == 0.0) return n;
    if (s == 0.5) return n + 0.5;
    const double a = std::numbers::pi * s;
    return n + std::atan2(lambda * std::sin(a), std::cos(a)) / std::numbers::pi;
  }

  static double tangent_derivative(double t, double lambda) {
    const double a = std::numbers::pi * (t - std::floor(t));
    const double c = std::cos(a);
    const double s = std::sin(a);
    return lambda / (c * c + lambda * lambda * s * s);
  }

 private:
  explicit Generator(Kind k) : kind_(std::move(k)) {}

  static constexpr double kBreakTol = 1e-12;

  static void validate_pl(const std::vector<std::pair<double, double>>& bp) {
    if (bp.size() < 2) throw InvalidInput("piecewise_linear: need at least two breakpoints");
    for (auto [x, y] : bp) {
      if (!std::isfinite(x) || !std::isfinite(y))
        throw InvalidInput("piecewise_linear: breakpoints must be finite");
    }
    for (std::size_t i = 1; i < bp.size(); ++i) {
      if (!(bp[i].first > bp[i - 1].first))
        throw InvalidInput("piecewise_linear: x coordinates must be strictly increasing");
    }
    if (std::fabs(bp.back().first - bp.front().first - 1.0) > 1e-12)
      throw InvalidInput("piecewise_linear: x range must span exactly one period");
    const double dy = bp.back().second - bp.front().second;
    if (std::fabs(std::fabs(dy) - 1.0) > 1e-12)
      throw InvalidInput("piecewise_linear: y range must be +1 or -1 over one period");
    const bool up = dy > 0;
    for (std::size_t i = 1; i < bp.size(); ++i) {
      const bool step_up = bp[i].second > bp[i - 1].second;
      if (step_up != up || bp[i].second == bp[i - 1].second)
        throw InvalidInput("piecewise_linear: lift must be strictly monotone");
    }
  }

  // Reduces t into the fundamental period [x_0, x_0 + 1); returns the shift.
  static double pl_reduce(const PiecewiseLinear& g, double t, double& s) {
    const double x0 = g.breakpoints.front().first;
    const double k = std::floor(t - x0);
    s = t - k;
    if (s >= x0 + 1.0) {
      s -= 1.0;
      return k + 1.0;
    }
    return k;
  }

  static std::size_t pl_segment(const PiecewiseLinear& g, double s) {
    const auto& bp = g.breakpoints;
    auto it = std::upper_bound(bp.begin(), bp.end(), s,
                               [](double v, const auto& p) { return v < p.first; });
    std::size_t i = static_cast<std::size_t>(it - bp.begin());
    i = std::clamp<std::size_t>(i, 1, bp.size() - 1);
    return i - 1;
  }

  static double pl_slope(const PiecewiseLinear& g, std::size_t seg) {
    const auto& bp = g.breakpoints;
    return (bp[seg + 1].second - bp[seg].second) / (bp[seg + 1].first - bp[seg].first);
  }

  static double pl_lift(const PiecewiseLinear& g, double t) {
    double s = 0.0;
    const double k = pl_reduce(g, t, s);
    const std::size_t seg = pl_segment(g, s);
    const auto& bp = g.breakpoints;
    const double dy = bp.back().second - bp.front().second;
    double y;
    if (s == bp[seg].first) {
      y = bp[seg].second;
    } else {
      y = bp[seg].second + pl_slope(g, seg) * (s - bp[seg].first);
    }
    return y + k * dy;
  }

  static Slopes pl_slopes(const PiecewiseLinear& g, double t) {
    double s = 0.0;
    pl_reduce(g, t, s);
    const auto& bp = g.breakpoints;
    const std::size_t nseg = bp.size() - 1;
    const std::size_t seg = pl_segment(g, s);
    const double here = pl_slope(g, seg);
    if (std::fabs(s - bp[seg].first) <= kBreakTol) {
      const double prev = pl_slope(g, seg == 0 ? nseg - 1 : seg - 1);
      return {prev, here};
    }
    if (std::fabs(bp[seg + 1].first - s) <= kBreakTol) {
      const double next = pl_slope(g, seg + 1 == nseg ? 0 : seg + 1);
      return {here, next};
    }
    return {here, here};
  }

  Kind kind_;
};

// ---------------------------------------------------------------------------
// Fixed points.

enum class FixedPointClass { attracting, repelling, semistable, nonhyperbolic };

inline const char* to_string(FixedPointClass c) {
  switch (c) {
    case FixedPointClass::attracting: return "attracting";
    case FixedPointClass::repelling: return "repelling";
    case FixedPointClass::semistable: return "semistable";
    case FixedPointClass::nonhyperbolic: return "nonhyperbolic";
  }
  return "?";
}

struct FixedPointRecord {
  CirclePoint location;
  Slopes multipliers;
  FixedPointClass classification = FixedPointClass::nonhyperbolic;
  Arc basin;
};

/// Classification by absolute one-sided multipliers; a side within `tol`
/// of 1 makes the point nonhyperbolic.
inline FixedPointClass classify_multipliers(Slopes m, double tol = 1e-9) {
  const double l = std::fabs(m.left);
  const double r = std::fabs(m.right);
  if (std::fabs(l - 1.0) <= tol || std::fabs(r - 1.0) <= tol) return FixedPointClass::nonhyperbolic;
  if (l > 1.0 && r > 1.0) return FixedPointClass::repelling;
  if (l < 1.0 && r < 1.0) return FixedPointClass::attracting;
  return FixedPointClass::semistable;
}

/// Roots of lift(x) - x - m on [0, 1) over every admissible integer m.
struct LiftRoots {
  std::vector<double> roots;
  bool identity = false;  // the map fixes every sample point
};

template <class Lift>
LiftRoots lift_fixed_points(Lift&& lift, double tol = 1e-12, int grid = 4096) {
  LiftRoots out;
  std::vector<double> d(static_cast<std::size_t>(grid) + 1);
  for (int i = 0; i <= grid; ++i) {
    const double x = static_cast<double>(i) / grid;
    d[static_cast<std::size_t>(i)] = lift(x) - x;
  }
  const double m0 = std::round(d[0]);
  out.identity = std::all_of(d.begin(), d.end(), [m0](double v) { return std::fabs(v - m0) <= 1e-12; });
  if (out.identity) return out;

  auto residual = [&](double x, double m) { return lift(x) - x - m; };
  for (int i = 0; i < grid; ++i) {
    const double x0 = static_cast<double>(i) / grid;
    const double x1 = static_cast<double>(i + 1) / grid;
    const double d0 = d[static_cast<std::size_t>(i)];
    const double d1 = d[static_cast<std::size_t>(i) + 1];
    const double lo = std::floor(std::min(d0, d1));
    const double hi = std::ceil(std::max(d0, d1));
    for (double m = lo; m <= hi; m += 1.0) {
      const double r0 = d0 - m;
      const double r1 = d1 - m;
      if (std::fabs(r0) <= 1e-13) {
        out.roots.push_back(x0);
        continue;
      }
      if (r0 * r1 >= 0.0) continue;
      double a = x0, b = x1, fa = r0;
      while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        const double fm = residual(mid, m);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if ((fm < 0) == (fa < 0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      out.roots.push_back(0.5 * (a + b));
    }
  }
  for (double& r : out.roots) r = wrap_unit(r);
  std::sort(out.roots.begin(), out.roots.end());
  std::vector<double> unique;
  for (double r : out.roots) {
    if (unique.empty() || circ_dist(r, unique.back()) > 1e-9) unique.push_back(r);
  }
  if (unique.size() > 1 && circ_dist(unique.front(), unique.back()) <= 1e-9) unique.pop_back();
  out.roots = std::move(unique);
  return out;
}

namespace detail {

// True when forward iteration of `map` sends every probe point of
// B(p, rho) to within 1e-9 of p.
template <class Map>
bool ball_converges(const Map& map, CirclePoint p, double rho) {
  constexpr int kProbes = 8;
  constexpr int kIterations = 4000;
  for (int j = 0; j < kProbes; ++j) {
    const double offset = rho * (2.0 * j / (kProbes - 1) - 1.0);
    if (offset == 0.0) continue;
    CirclePoint y = p.shifted(offset);
    for (int it = 0; it < kIterations && circ_dist(y, p) > 1e-10; ++it) y = map(y);
    if (circ_dist(y, p) > 1e-9) return false;
  }
  return true;
}

template <class Map>
Arc grow_basin(const Map& map, CirclePoint p) {
  double good = 0.0;
  double bad = 0.5;
  for (double rho = 0.25; rho > 1e-9; rho *= 0.5) {
    if (ball_converges(map, p, rho)) {
      good = rho;
      break;
    }
    bad = rho;
  }
  if (good == 0.0) return Arc(p, 0.0);
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (good + bad);
    if (ball_converges(map, p, mid)) good = mid;
    else bad = mid;
  }
  return Arc::ball(p, good);
}

}  // namespace detail

/// Fixed points of a generator, classified by one-sided multipliers. Basins
/// are grown by forward iteration (attracting) or inverse iteration
/// (repelling, invertible maps only). A map that fixes everything reports
/// the `identity_net` uniform net as nonhyperbolic points.
inline std::vector<FixedPointRecord> fixed_points(const Generator& g, double tol = 1e-12,
                                                  int identity_net = 100) {
  std::vector<FixedPointRecord> out;
  const LiftRoots roots = lift_fixed_points([&g](double t) { return g.lift(t); }, tol);
  if (roots.identity) {
    for (CirclePoint p : uniform_net(identity_net))
      out.push_back({p, {1.0, 1.0}, FixedPointClass::nonhyperbolic, Arc(p, 0.0)});
    return out;
  }
  for (double r : roots.roots) {
    FixedPointRecord rec;
    rec.location = CirclePoint(r);
    rec.multipliers = g.slopes(r);
    rec.classification = classify_multipliers(rec.multipliers);
    rec.basin = Arc(rec.location, 0.0);
    if (rec.classification == FixedPointClass::attracting) {
      rec.basin = detail::grow_basin(g, rec.location);
    } else if (rec.classification == FixedPointClass::repelling && g.invertible()) {
      const Generator inv = g.inverse();
      rec.basin = detail::grow_basin(inv, rec.location);
    }
    out.push_back(rec);
  }
  return out;
}

/// Image of an arc. Invertible maps send endpoints to endpoints; an
/// m-fold cover stretches the arc by m, saturating at the full circle.
inline Arc map_arc(const Generator& g, const Arc& a) {
  if (a.is_full()) return Arc::full_circle();
  const double s = a.start().value();
  const double u = g.lift(s);
  const double v = g.lift(s + a.length());
  const double len = std::fabs(v - u);
  if (len >= 1.0) return Arc::full_circle();
  return Arc(std::min(u, v), len);
}

}  // namespace ifslab
