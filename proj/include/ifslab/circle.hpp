#pragma once

// Geometry of the unit circle R/Z: points, the arc-length metric and
// counterclockwise arcs.

#include <algorithm>
#include <cmath>
#include <compare>
#include <vector>

namespace ifslab {

/// Reduces a real number to [0, 1). Values within 1e-15 below 1 map to 0.
inline double wrap_unit(double t) noexcept {
  double v = t - std::floor(t);
  if (v >= 1.0 - 1e-15) v = 0.0;
  return v;
}

/// A point of the circle, stored as an angle in full turns.
class CirclePoint {
 public:
  constexpr CirclePoint() = default;
  explicit CirclePoint(double t) noexcept : value_(wrap_unit(t)) {}

  [[nodiscard]] double value() const noexcept { return value_; }

  /// Counterclockwise translation.
  [[nodiscard]] CirclePoint shifted(double turns) const noexcept {
    return CirclePoint(value_ + turns);
  }

  friend bool operator==(const CirclePoint&, const CirclePoint&) = default;
  friend auto operator<=>(const CirclePoint&, const CirclePoint&) = default;

 private:
  double value_ = 0.0;
};

/// Circle metric, normalised so that the circumference is 1.
inline double circ_dist(CirclePoint a, CirclePoint b) noexcept {
  const double d = std::fabs(a.value() - b.value());
  return std::min(d, 1.0 - d);
}

inline double circ_dist(double a, double b) noexcept {
  return circ_dist(CirclePoint(a), CirclePoint(b));
}

/// Counterclockwise distance travelled from `from` to reach `to`, in [0, 1).
inline double ccw_offset(CirclePoint from, CirclePoint to) noexcept {
  return wrap_unit(to.value() - from.value());
}

/// Closed counterclockwise arc [start, start + length]. Length 1 is the
/// whole circle and length 0 a single point.
class Arc {
 public:
  Arc() = default;
  Arc(CirclePoint start, double length) noexcept
      : start_(start), length_(std::clamp(length, 0.0, 1.0)) {}
  Arc(double start, double length) noexcept : Arc(CirclePoint(start), length) {}

  /// The arc of radius `radius` centred at `center`: B(center, radius).
  static Arc ball(CirclePoint center, double radius) noexcept {
    if (radius >= 0.5) return Arc(center.shifted(-0.5), 1.0);
    return Arc(center.shifted(-radius), 2.0 * radius);
  }

  static Arc full_circle() noexcept { return Arc(0.0, 1.0); }

  [[nodiscard]] CirclePoint start() const noexcept { return start_; }
  [[nodiscard]] CirclePoint end() const noexcept { return start_.shifted(length_); }
  [[nodiscard]] double length() const noexcept { return length_; }
  [[nodiscard]] bool is_full() const noexcept { return length_ >= 1.0; }
  [[nodiscard]] CirclePoint midpoint() const noexcept { return start_.shifted(0.5 * length_); }

  /// Membership with wraparound; `slack` widens the arc on both sides.
  [[nodiscard]] bool contains(CirclePoint p, double slack = 0.0) const noexcept {
    if (length_ + 2.0 * slack >= 1.0) return true;
    return wrap_unit(p.value() - start_.value() + slack) <= length_ + 2.0 * slack;
  }

  /// Distance from p to the arc (0 inside).
  [[nodiscard]] double distance_to(CirclePoint p) const noexcept {
    if (contains(p)) return 0.0;
    return std::min(circ_dist(p, start_), circ_dist(p, end()));
  }

  /// Point at counterclockwise offset `t` in [0, length] from the start.
  [[nodiscard]] CirclePoint at(double t) const noexcept { return start_.shifted(t); }

  friend bool operator==(const Arc&, const Arc&) = default;

 private:
  CirclePoint start_;
  double length_ = 0.0;
};

/// Supremum of circ_dist over pairs of points of the arc.
inline double arc_diameter(const Arc& a) noexcept { return std::min(a.length(), 0.5); }

/// Infimum of circ_dist over pairs (p in a, q in b); zero when they meet.
inline double arc_gap(const Arc& a, const Arc& b) noexcept {
  if (a.is_full() || b.is_full()) return 0.0;
  if (a.contains(b.start()) || b.contains(a.start())) return 0.0;
  // Disjoint: the two complementary gaps are traversed counterclockwise
  // from the end of one arc to the start of the other.
  const double g1 = ccw_offset(a.end(), b.start());
  const double g2 = ccw_offset(b.end(), a.start());
  return std::min(g1, g2);
}

/// Deterministic uniform net of `n` points at (i + 1/2)/n.
inline std::vector<CirclePoint> uniform_net(int n) {
  std::vector<CirclePoint> net;
  net.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) net.emplace_back((i + 0.5) / n);
  return net;
}

/// Largest counterclockwise gap between consecutive points of a finite set.
/// Returns the gap length and the point at which it starts. An empty set
/// has gap 1.
struct Gap {
  double length = 1.0;
  CirclePoint start;
};

/// Largest gap of points already in [0, 1) and sorted.
inline Gap largest_gap_sorted(const std::vector<double>& points) {
  Gap best;
  if (points.empty()) return best;
  best.length = points.front() + 1.0 - points.back();
  best.start = CirclePoint(points.back());
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double g = points[i] - points[i - 1];
    if (g > best.length) {
      best.length = g;
      best.start = CirclePoint(points[i - 1]);
    }
  }
  return best;
}

inline Gap largest_gap(std::vector<double> points) {
  for (double& p : points) p = wrap_unit(p);
  std::sort(points.begin(), points.end());
  return largest_gap_sorted(points);
}

/// True when every point of the circle lies within eps of the set.
inline bool is_eps_dense(const std::vector<double>& points, double eps) {
  return largest_gap(points).length <= 2.0 * eps;
}

}  // namespace ifslab
