#pragma once

// The iterated function system: composition along words, derivatives along
// trajectories, total forward/backward orbits and periodic points.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ifslab/circle.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/generators.hpp"
#include "ifslab/symbolic.hpp"

namespace ifslab {

class IfsSystem {
 public:
  IfsSystem() = default;
  explicit IfsSystem(std::vector<Generator> generators) : generators_(std::move(generators)) {
    if (generators_.empty()) throw InvalidInput("an IFS needs at least one generator");
  }

  [[nodiscard]] int size() const noexcept { return static_cast<int>(generators_.size()); }

  /// Generator for a 1-based word letter.
  [[nodiscard]] const Generator& operator[](int letter) const {
    return generators_.at(static_cast<std::size_t>(letter - 1));
  }

  [[nodiscard]] const std::vector<Generator>& generators() const noexcept { return generators_; }

  [[nodiscard]] bool all_invertible() const noexcept {
    return std::all_of(generators_.begin(), generators_.end(),
                       [](const Generator& g) { return g.invertible(); });
  }

  [[nodiscard]] bool is_isometric() const noexcept {
    return std::all_of(generators_.begin(), generators_.end(),
                       [](const Generator& g) { return g.is_isometry(); });
  }

  /// The system generated by the inverses, letter for letter.
  [[nodiscard]] IfsSystem inverse_system() const {
    std::vector<Generator> inv;
    inv.reserve(generators_.size());
    for (const Generator& g : generators_) inv.push_back(g.inverse());
    return IfsSystem(std::move(inv));
  }

 private:
  std::vector<Generator> generators_;
};

namespace detail {

// Integer shifts keep lifted values bounded; they are exact in floating
// point, so two evaluations that follow the same steps agree bit for bit.
inline double renormalize(double v) {
  if (v >= 1.0 || v < -1.0) v -= std::floor(v);
  return v;
}

}  // namespace detail

/// f^n_w(x): letter w_1 applied first, w_n last.
inline CirclePoint compose_word(const IfsSystem& ifs, const Word& w, CirclePoint x) {
  double v = x.value();
  for (int letter : w) v = detail::renormalize(ifs[letter].lift(v));
  return CirclePoint(v);
}

/// (f^n_w)^{-1}(y): inverse of w_n applied first, inverse of w_1 last.
inline CirclePoint compose_inverse_word(const IfsSystem& ifs, const Word& w, CirclePoint y) {
  double v = y.value();
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it)
    v = detail::renormalize(ifs[*it].inverse().lift(v));
  return CirclePoint(v);
}

/// Lift of the composed map, without reduction (continuous in t).
inline double word_lift(const IfsSystem& ifs, const Word& w, double t) {
  for (int letter : w) t = ifs[letter].lift(t);
  return t;
}

/// One-sided derivatives of f^n_w at x by the chain rule, tracking which
/// side each intermediate point is approached from.
inline Slopes word_slopes(const IfsSystem& ifs, const Word& w, CirclePoint x) {
  double v = x.value();
  double left = 1.0;
  double right = 1.0;
  bool swapped = false;  // true when the original right side is now on the left
  for (int letter : w) {
    const Generator& g = ifs[letter];
    const Slopes s = g.slopes(v);
    const double for_right = swapped ? s.left : s.right;
    const double for_left = swapped ? s.right : s.left;
    right *= for_right;
    left *= for_left;
    if (for_right < 0) swapped = !swapped;
    v = detail::renormalize(g.lift(v));
  }
  return {left, right};
}

/// Chain-rule derivative of f^n_w at x.
inline double word_derivative(const IfsSystem& ifs, const Word& w, CirclePoint x) {
  double v = x.value();
  double d = 1.0;
  for (int letter : w) {
    const Generator& g = ifs[letter];
    d *= g.derivative(v);
    v = detail::renormalize(g.lift(v));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Arcs along words.

/// Lifted images (a, b) of the two endpoints of an arc. The arc they bound
/// is saturated to the full circle once |b - a| reaches 1.
struct LiftedArc {
  double a = 0.0;
  double b = 0.0;

  static LiftedArc from(const Arc& arc) {
    const double s = arc.start().value();
    return {s, s + arc.length()};
  }

  [[nodiscard]] double length() const noexcept { return std::min(std::fabs(b - a), 1.0); }
  [[nodiscard]] bool full() const noexcept { return std::fabs(b - a) >= 1.0; }
  [[nodiscard]] Arc arc() const {
    if (full()) return Arc::full_circle();
    return Arc(std::min(a, b), std::fabs(b - a));
  }

  void apply(const Generator& g) {
    double na = g.lift(a);
    double nb = g.lift(b);
    if (na >= 1.0 || na < -1.0) {
      const double n = std::floor(na);
      na -= n;
      nb -= n;
    }
    if (nb - na >= 1.0) nb = na + 1.0;
    else if (na - nb >= 1.0) nb = na - 1.0;
    a = na;
    b = nb;
  }
};

/// Image of an arc under f^n_w.
inline Arc map_arc_word(const IfsSystem& ifs, const Word& w, const Arc& arc) {
  LiftedArc s = LiftedArc::from(arc);
  for (int letter : w) s.apply(ifs[letter]);
  return s.arc();
}

// ---------------------------------------------------------------------------
// Orbits.

enum class Direction { forward, backward };

struct OrbitPoint {
  CirclePoint point;
  Word word;
};

/// A finite piece of a total orbit. Forward points satisfy
/// point = compose_word(word, base); backward points satisfy
/// point = compose_inverse_word(word, base).
struct OrbitSet {
  CirclePoint base;
  Direction direction = Direction::forward;
  int depth = 0;
  std::vector<OrbitPoint> points;  // sorted by point value
};

/// Breadth-first orbit expansion with deduplication at `tol`. Points are
/// discovered level by level (level n = words of length n) and the first
/// word reaching a point is kept, so witnesses are shortest words.
class OrbitExplorer {
 public:
  OrbitExplorer(const IfsSystem& ifs, CirclePoint base, Direction dir, int depth, std::int64_t cap,
                double tol = 1e-12)
      : direction_(dir), depth_(depth), cap_(cap), tol_(tol) {
    if (!(tol > 0.0)) throw InvalidInput("orbit tolerance must be positive");
    if (dir == Direction::backward) {
      if (!ifs.all_invertible())
        throw NonInvertible("backward orbit needs every generator to be invertible");
      maps_ = ifs.inverse_system().generators();
    } else {
      maps_ = ifs.generators();
    }
    if (cap_ > 0) index_.reserve(static_cast<std::size_t>(cap_));
    nodes_.push_back({base.value(), -1, 0});
    insert(base.value(), 0);
    sorted_.push_back(base.value());
    level_end_ = 1;
  }

  /// Adds the next level. Returns false when no further points can appear
  /// (depth or cap reached, or the previous level added nothing).
  bool expand_level() {
    if (!can_expand()) return false;
    const std::size_t begin = level_begin_;
    const std::size_t end = level_end_;
    for (std::size_t i = begin; i < end && !capped(); ++i) {
      for (std::size_t g = 0; g < maps_.size() && !capped(); ++g) {
        const double v = detail::renormalize(maps_[g].lift(nodes_[i].value));
        if (find(wrap_unit(v)) >= 0) continue;
        nodes_.push_back({v, static_cast<std::int32_t>(i), static_cast<std::int32_t>(g + 1)});
        insert(wrap_unit(v), static_cast<std::int32_t>(nodes_.size() - 1));
      }
    }
    level_begin_ = end;
    level_end_ = nodes_.size();
    const auto mid = static_cast<std::ptrdiff_t>(sorted_.size());
    for (std::size_t i = level_begin_; i < level_end_; ++i) sorted_.push_back(wrap_unit(nodes_[i].value));
    std::sort(sorted_.begin() + mid, sorted_.end());
    std::inplace_merge(sorted_.begin(), sorted_.begin() + mid, sorted_.end());
    ++level_;
    return true;
  }

  void expand_all() {
    while (expand_level()) {
    }
  }

  [[nodiscard]] bool can_expand() const noexcept {
    return level_ < depth_ && !capped() && level_end_ > level_begin_;
  }
  [[nodiscard]] bool capped() const noexcept {
    return cap_ >= 0 && static_cast<std::int64_t>(nodes_.size()) >= cap_;
  }
  /// Every word up to the current level produced only known points.
  [[nodiscard]] bool closed() const noexcept { return level_end_ == level_begin_; }
  [[nodiscard]] int level() const noexcept { return level_; }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] CirclePoint point(std::size_t i) const { return CirclePoint(nodes_[i].value); }

  [[nodiscard]] std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(wrap_unit(n.value));
    return out;
  }

  /// The same points in increasing order, kept up to date level by level.
  [[nodiscard]] const std::vector<double>& sorted_values() const noexcept { return sorted_; }

  [[nodiscard]] Word word_of(std::size_t i) const {
    std::vector<int> letters;
    for (auto n = static_cast<std::int32_t>(i); nodes_[static_cast<std::size_t>(n)].parent >= 0;
         n = nodes_[static_cast<std::size_t>(n)].parent)
      letters.push_back(nodes_[static_cast<std::size_t>(n)].letter);
    // Parent chains run from the newest letter back to the base. Forward
    // words append letters, backward words prepend them.
    if (direction_ == Direction::forward) std::reverse(letters.begin(), letters.end());
    return Word(std::move(letters));
  }

  /// Index of a known point within `tol`, or -1. Among several, the one
  /// with the smallest value.
  [[nodiscard]] std::int32_t find(double x) const {
    std::int32_t hit = probe(x - tol_, x + tol_);
    if (hit >= 0) return hit;
    if (x < tol_) hit = probe(1.0 + x - tol_, 1.0);
    if (hit < 0 && x > 1.0 - tol_) hit = probe(0.0, x + tol_ - 1.0);
    return hit;
  }

  [[nodiscard]] OrbitSet to_orbit_set(CirclePoint base) const {
    OrbitSet out;
    out.base = base;
    out.direction = direction_;
    out.depth = depth_;
    out.points.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) out.points.push_back({point(i), word_of(i)});
    std::sort(out.points.begin(), out.points.end(),
              [](const OrbitPoint& l, const OrbitPoint& r) { return l.point < r.point; });
    return out;
  }

 private:
  [[nodiscard]] std::int64_t bucket(double x) const {
    return static_cast<std::int64_t>(std::floor(x / tol_));
  }
  void insert(double x, std::int32_t i) { index_.emplace(bucket(x), i); }

  [[nodiscard]] std::int32_t probe(double lo, double hi) const {
    std::int32_t best = -1;
    for (std::int64_t b = bucket(lo), last = bucket(hi); b <= last; ++b) {
      auto [it, end] = index_.equal_range(b);
      for (; it != end; ++it) {
        const double v = wrap_unit(nodes_[static_cast<std::size_t>(it->second)].value);
        if (v < lo || v > hi) continue;
        if (best < 0 || v < wrap_unit(nodes_[static_cast<std::size_t>(best)].value)) best = it->second;
      }
    }
    return best;
  }

  struct Node {
    double value;
    std::int32_t parent;
    std::int32_t letter;
  };

  Direction direction_;
  int depth_;
  std::int64_t cap_;
  double tol_;
  std::vector<Generator> maps_;
  std::vector<Node> nodes_;
  std::vector<double> sorted_;
  // Buckets of width tol: points within tol of x sit in adjacent buckets.
  std::unordered_multimap<std::int64_t, std::int32_t> index_;
  std::size_t level_begin_ = 0;
  std::size_t level_end_ = 0;
  int level_ = 0;
};

/// Distinct images of x under words of length <= depth, at most `cap`
/// points, breadth-first.
inline OrbitSet forward_orbit(const IfsSystem& ifs, CirclePoint x, int depth, std::int64_t cap) {
  OrbitExplorer e(ifs, x, Direction::forward, depth, cap);
  e.expand_all();
  return e.to_orbit_set(x);
}

/// Distinct preimages h^{-1}(x), h a word of length <= depth.
inline OrbitSet backward_orbit(const IfsSystem& ifs, CirclePoint x, int depth, std::int64_t cap) {
  OrbitExplorer e(ifs, x, Direction::backward, depth, cap);
  e.expand_all();
  return e.to_orbit_set(x);
}

/// Fixed points of every word of length 1..max_len, deduplicated at `tol`
/// keeping the shortest witness. Words acting as the identity contribute
/// the uniform net of `identity_net` points.
inline std::vector<OrbitPoint> periodic_points(const IfsSystem& ifs, int max_len, double tol = 1e-9,
                                               int identity_net = 100) {
  if (max_len < 1) throw InvalidInput("periodic_points: max_len must be >= 1");
  std::map<double, Word> found;
  auto known = [&found, tol](double x) {
    auto it = found.lower_bound(x - tol);
    if (it != found.end() && it->first <= x + tol) return true;
    if (x < tol && !found.empty() && found.rbegin()->first >= 1.0 + x - tol) return true;
    if (x > 1.0 - tol && !found.empty() && found.begin()->first <= x + tol - 1.0) return true;
    return false;
  };
  WordEnumerator words(ifs.size(), max_len);
  while (auto w = words.next()) {
    if (w->empty()) continue;
    const LiftRoots roots =
        lift_fixed_points([&ifs, &w](double t) { return word_lift(ifs, *w, t); }, 1e-12);
    std::vector<double> pts = roots.roots;
    if (roots.identity) {
      pts.clear();
      for (CirclePoint p : uniform_net(identity_net)) pts.push_back(p.value());
    }
    for (double p : pts) {
      if (!known(p)) found.emplace(p, *w);
    }
  }
  std::vector<OrbitPoint> out;
  out.reserve(found.size());
  for (auto& [p, w] : found) out.push_back({CirclePoint(p), w});
  return out;
}

}  // namespace ifslab
