#pragma once

// Resolution-parameterised deciders for orbit density, transitivity,
// sensitivity and almost periodicity. Universal quantifiers ("for every x",
// "for every open U") range over a uniform net; existential ones are
// searched breadth-first within depth and budget bounds. A positive verdict
// carries witnesses that replay; a negative one means "not found within
// these bounds".

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <map>
#include <utility>
#include <vector>

#include "ifslab/circle.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/generators.hpp"
#include "ifslab/parallel.hpp"
#include "ifslab/semigroup.hpp"
#include "ifslab/symbolic.hpp"

namespace ifslab {

struct Resolution {
  double eps = 0.01;              // density / covering tolerance
  double r = 0.01;                // test-ball radius
  int depth = 60;                 // maximal word length
  int net_size = 100;             // sample points on the circle
  std::int64_t budget = 100000;   // maximal states per search

  void validate() const {
    if (!(eps > 0.0 && eps <= 0.5)) throw InvalidInput("resolution: eps must lie in (0, 1/2]");
    if (!(r > 0.0 && r <= 0.5)) throw InvalidInput("resolution: r must lie in (0, 1/2]");
    if (depth < 1) throw InvalidInput("resolution: depth must be >= 1");
    if (net_size < 1) throw InvalidInput("resolution: net_size must be >= 1");
    if (budget < 1) throw InvalidInput("resolution: budget must be >= 1");
  }

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

struct Verdict {
  std::string property;
  bool holds = false;
  Resolution resolution;
  std::string caveat;
};

// ---------------------------------------------------------------------------
// Search machinery shared by the detectors.

/// Arcs seen so far, kept as the Pareto frontier under inclusion: sorted by
/// start, with strictly increasing ends. Answers "is this arc inside one
/// already seen?" exactly, with wraparound.
class ArcFrontier {
 public:
  /// Inserts the arc unless a known arc contains it; returns true if inserted.
  bool insert(const Arc& arc) {
    if (full_) return false;
    if (arc.is_full()) {
      full_ = true;
      return true;
    }
    const double s = arc.start().value();
    const double e = s + arc.length();
    if (covered(s, e)) return false;
    auto it = ends_.try_emplace(s, e).first;
    it->second = e;
    for (auto next = std::next(it); next != ends_.end() && next->second <= e;)
      next = ends_.erase(next);
    return true;
  }

 private:
  bool covered(double s, double e) const {
    if (ends_.empty()) return false;
    auto it = ends_.upper_bound(s);
    if (it != ends_.begin() && std::prev(it)->second >= e) return true;
    // Arcs that wrap past 1 also contain [s, e] shifted by one turn.
    return std::prev(ends_.end())->second - 1.0 >= e;
  }

  std::map<double, double> ends_;
  bool full_ = false;
};

/// Exploration of the images of one arc, breadth-first or longest-arc
/// first. A state whose arc lies inside an arc seen earlier is dropped: its
/// images stay inside the images of that arc.
class ArcExplorer {
 public:
  enum class Order { breadth_first, longest_first };

  ArcExplorer(const IfsSystem& ifs, const Arc& start, int depth, std::int64_t budget,
              Order order = Order::breadth_first)
      : ifs_(ifs), depth_(depth), budget_(budget), order_(order) {
    // The root stays out of the frontier: an image T(U) equal to or inside
    // U is still an image and must be visited.
    nodes_.push_back({LiftedArc::from(start), -1, 0, 0});
  }

  /// visit(node_index, state) is called once per state, root first;
  /// returning false stops the search.
  template <class Visit>
  void run(Visit&& visit) {
    auto worse = [this](std::size_t a, std::size_t b) {
      const Node& x = nodes_[a];
      const Node& y = nodes_[b];
      if (x.state.length() != y.state.length()) return x.state.length() < y.state.length();
      if (x.depth != y.depth) return x.depth > y.depth;
      return a > b;
    };
    std::vector<std::size_t> heap;
    std::size_t cursor = 0;
    auto pop = [&](std::size_t& i) {
      if (order_ == Order::breadth_first) {
        if (cursor >= nodes_.size()) return false;
        i = cursor++;
        return true;
      }
      if (cursor < nodes_.size()) {  // root
        i = cursor++;
        return true;
      }
      if (heap.empty()) return false;
      std::pop_heap(heap.begin(), heap.end(), worse);
      i = heap.back();
      heap.pop_back();
      return true;
    };
    for (std::size_t i = 0; pop(i);) {
      if (!visit(i, nodes_[i].state)) return;
      if (nodes_[i].depth >= depth_) continue;
      for (int g = 1; g <= ifs_.size(); ++g) {
        if (static_cast<std::int64_t>(nodes_.size()) >= budget_) break;
        LiftedArc child = nodes_[i].state;
        child.apply(ifs_[g]);
        if (!seen_.insert(child.arc())) continue;
        nodes_.push_back({child, static_cast<std::int32_t>(i), g, nodes_[i].depth + 1});
        if (order_ == Order::longest_first) {
          heap.push_back(nodes_.size() - 1);
          std::push_heap(heap.begin(), heap.end(), worse);
          cursor = nodes_.size();
        }
      }
    }
  }

  [[nodiscard]] Word word_of(std::size_t i) const {
    std::vector<int> letters;
    for (auto n = static_cast<std::int32_t>(i); nodes_[static_cast<std::size_t>(n)].parent >= 0;
         n = nodes_[static_cast<std::size_t>(n)].parent)
      letters.push_back(nodes_[static_cast<std::size_t>(n)].letter);
    std::reverse(letters.begin(), letters.end());
    return Word(std::move(letters));
  }

  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    LiftedArc state;
    std::int32_t parent;
    std::int32_t letter;
    std::int32_t depth;
  };

  const IfsSystem& ifs_;
  int depth_;
  std::int64_t budget_;
  Order order_;
  std::vector<Node> nodes_;
  ArcFrontier seen_;
};

/// Tracks which points of a uniform net lie within `radius` of the arcs
/// seen so far.
class NetCoverage {
 public:
  NetCoverage(int net_size, double radius)
      : n_(net_size), radius_(radius), covered_(static_cast<std::size_t>(net_size), false) {}

  /// Marks newly covered net points; returns how many were new.
  int mark(const Arc& arc, std::vector<int>* newly = nullptr) {
    int fresh = 0;
    auto visit = [&](int j) {
      if (covered_[static_cast<std::size_t>(j)]) return;
      if (arc.distance_to(center(j)) > radius_) return;
      covered_[static_cast<std::size_t>(j)] = true;
      ++count_;
      ++fresh;
      if (newly) newly->push_back(j);
    };
    if (arc.length() + 2.0 * radius_ + 2.0 / n_ >= 1.0) {
      for (int j = 0; j < n_; ++j) visit(j);
      return fresh;
    }
    const double lo = arc.start().value() - radius_;
    const int first = static_cast<int>(std::floor(lo * n_ - 0.5)) - 1;
    const int span = static_cast<int>(std::ceil((arc.length() + 2.0 * radius_) * n_)) + 3;
    for (int s = 0; s < span; ++s) visit(((first + s) % n_ + n_) % n_);
    return fresh;
  }

  [[nodiscard]] bool all() const noexcept { return count_ == n_; }
  [[nodiscard]] int count() const noexcept { return count_; }
  [[nodiscard]] bool covered(int j) const { return covered_[static_cast<std::size_t>(j)]; }
  [[nodiscard]] CirclePoint center(int j) const { return CirclePoint((j + 0.5) / n_); }
  [[nodiscard]] int first_uncovered() const {
    for (int j = 0; j < n_; ++j)
      if (!covered_[static_cast<std::size_t>(j)]) return j;
    return -1;
  }

 private:
  int n_;
  double radius_;
  std::vector<bool> covered_;
  int count_ = 0;
};

struct CoverResult {
  bool covered = false;
  std::vector<Word> words;     // images that added coverage, in discovery order
  std::int64_t explored = 0;   // arc states examined
  double first_uncovered = -1; // a net point left uncovered, when any
};

/// Searches the images of `u`: half of the budget goes to breadth-first
/// words and, if `visit` has not stopped the search by then, the rest to a
/// longest-arc-first search, which reaches the long words that pull an arc
/// across a repeller. visit(explorer, node, state) returns false to stop.
template <class Visit>
void explore_images(const IfsSystem& ifs, const Arc& u, const Resolution& res, Visit&& visit) {
  const std::int64_t first = std::max<std::int64_t>(1, res.budget / 2);
  for (auto order : {ArcExplorer::Order::breadth_first, ArcExplorer::Order::longest_first}) {
    const bool bfs = order == ArcExplorer::Order::breadth_first;
    const std::int64_t budget = bfs ? first : res.budget - first;
    if (budget < 1) return;
    ArcExplorer explorer(ifs, u, res.depth, budget, order);
    bool stopped = false;
    explorer.run([&](std::size_t node, const LiftedArc& s) {
      stopped = !visit(explorer, node, s);
      return !stopped;
    });
    if (stopped) return;
  }
}

/// Greedy cover search: images T(U) keeping every word that covers a new
/// net point (within eps), until the whole net is covered or the bounds are
/// exhausted. `observe(explorer, node, state)` sees every state and may
/// stop the search by returning true.
template <class Observer>
CoverResult cover_search(const IfsSystem& ifs, const Arc& u, const Resolution& res,
                         Observer&& observe) {
  CoverResult out;
  NetCoverage coverage(res.net_size, res.eps);
  explore_images(ifs, u, res, [&](const ArcExplorer& ex, std::size_t node, const LiftedArc& s) {
    ++out.explored;
    if (node > 0 && coverage.mark(s.arc()) > 0) out.words.push_back(ex.word_of(node));
    if (observe(ex, node, s)) return false;
    return !coverage.all();
  });
  out.covered = coverage.all();
  if (!out.covered) out.first_uncovered = coverage.center(coverage.first_uncovered()).value();
  return out;
}

inline CoverResult cover_search(const IfsSystem& ifs, const Arc& u, const Resolution& res) {
  return cover_search(ifs, u, res, [](const ArcExplorer&, std::size_t, const LiftedArc&) { return false; });
}

/// Fixed points of individual generators, tagged with their letter.
struct GeneratorFixedPoint {
  int letter = 0;
  FixedPointRecord record;
};

inline std::vector<GeneratorFixedPoint> generator_fixed_points(const IfsSystem& ifs) {
  std::vector<GeneratorFixedPoint> out;
  for (int g = 1; g <= ifs.size(); ++g) {
    for (const auto& rec : fixed_points(ifs[g], 1e-12, 0)) out.push_back({g, rec});
  }
  return out;
}

namespace detail {

// Net plus the fixed points of the generators. Closed invariant sets of
// the gallery systems sit on such points and a uniform net alone would
// step over them.
inline std::vector<CirclePoint> augmented_net(const IfsSystem& ifs, int net_size) {
  std::vector<CirclePoint> pts = uniform_net(net_size);
  for (const auto& fp : generator_fixed_points(ifs)) pts.push_back(fp.record.location);
  std::sort(pts.begin(), pts.end());
  std::vector<CirclePoint> out;
  for (CirclePoint p : pts) {
    if (out.empty() || circ_dist(p, out.back()) > 1e-12) out.push_back(p);
  }
  if (out.size() > 1 && circ_dist(out.front(), out.back()) <= 1e-12) out.pop_back();
  return out;
}

// Subset of sorted points whose consecutive gaps stay within `max_gap`
// wherever the full set's gaps do.
inline std::vector<std::size_t> thin_sorted(const std::vector<double>& sorted, double max_gap) {
  std::vector<std::size_t> keep;
  if (sorted.empty()) return keep;
  keep.push_back(0);
  double last = sorted[0];
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double next = (i + 1 < sorted.size()) ? sorted[i + 1] : sorted[0] + 1.0;
    if (next - last > max_gap || i + 1 == sorted.size()) {
      keep.push_back(i);
      last = sorted[i];
    }
  }
  return keep;
}

inline std::vector<std::size_t> sort_order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

// Distance from p to the nearest point of a sorted set on the circle.
inline double distance_to_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 1.0;
  auto it = std::lower_bound(sorted.begin(), sorted.end(), p);
  double best = 1.0;
  if (it != sorted.end()) best = std::min(best, circ_dist(*it, p));
  if (it != sorted.begin()) best = std::min(best, circ_dist(*std::prev(it), p));
  best = std::min(best, circ_dist(sorted.front(), p));
  best = std::min(best, circ_dist(sorted.back(), p));
  return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Orbit density: forward minimality and strong transitivity.

struct OrbitDensity {
  double base = 0.0;
  bool dense = false;
  double max_gap = 1.0;
  double gap_start = 0.0;
  std::int64_t orbit_size = 0;
  int levels = 0;
  // Thinned subset of the orbit that is still eps-dense when the orbit is;
  // sample_words[i] carries sample_points[i] back to (or from) the base.
  std::vector<double> sample_points;
  std::vector<Word> sample_words;
};

struct DensityReport {
  Verdict verdict;
  Direction direction = Direction::forward;
  std::vector<OrbitDensity> per_point;
  double worst_point = 0.0;
  double worst_gap = 0.0;
};

namespace detail {

inline OrbitDensity orbit_density(const IfsSystem& ifs, CirclePoint base, Direction dir,
                                  const Resolution& res, bool stop_when_dense = true) {
  OrbitExplorer e(ifs, base, dir, res.depth, res.budget);
  OrbitDensity out;
  out.base = base.value();
  Gap gap;
  for (;;) {
    gap = largest_gap_sorted(e.sorted_values());
    if (stop_when_dense && gap.length <= 2.0 * res.eps) break;
    if (!e.expand_level()) {
      gap = largest_gap_sorted(e.sorted_values());
      break;
    }
  }
  out.dense = gap.length <= 2.0 * res.eps;
  out.max_gap = gap.length;
  out.gap_start = gap.start.value();
  out.orbit_size = static_cast<std::int64_t>(e.size());
  out.levels = e.level();
  const std::vector<double> vals = e.values();
  const auto order = sort_order(vals);
  std::vector<double> sorted;
  sorted.reserve(order.size());
  for (std::size_t i : order) sorted.push_back(vals[i]);
  for (std::size_t k : thin_sorted(sorted, 2.0 * res.eps)) {
    out.sample_points.push_back(sorted[k]);
    out.sample_words.push_back(e.word_of(order[k]));
  }
  return out;
}

inline DensityReport density_verdict(const IfsSystem& ifs, const Resolution& res, Direction dir,
                                     Execution exec, const char* property) {
  res.validate();
  if (dir == Direction::backward && !ifs.all_invertible())
    throw NonInvertible(std::string(property) + " needs every generator to be invertible");
  const std::vector<CirclePoint> bases = augmented_net(ifs, res.net_size);
  DensityReport rep;
  rep.direction = dir;
  rep.per_point.resize(bases.size());
  parallel_for(bases.size(), exec,
               [&](std::size_t i) { rep.per_point[i] = orbit_density(ifs, bases[i], dir, res); });
  rep.verdict.property = property;
  rep.verdict.resolution = res;
  rep.verdict.holds = true;
  rep.worst_gap = -1.0;
  for (const auto& d : rep.per_point) {
    rep.verdict.holds = rep.verdict.holds && d.dense;
    if (d.max_gap > rep.worst_gap) {
      rep.worst_gap = d.max_gap;
      rep.worst_point = d.base;
    }
  }
  rep.verdict.caveat =
      rep.verdict.holds
          ? "every sampled orbit is eps-dense; density between net points is not certified"
          : "an orbit failed to become eps-dense within the depth and budget bounds";
  return rep;
}

}  // namespace detail

/// Forward minimality: every sampled forward orbit is eps-dense.
inline DensityReport minimality_verdict(const IfsSystem& ifs, const Resolution& res,
                                        Execution exec = {}) {
  return detail::density_verdict(ifs, res, Direction::forward, exec, "minimality");
}

/// Strong transitivity (backward minimality): every sampled backward orbit
/// is eps-dense. Sample words w satisfy compose_word(w, point) = base.
inline DensityReport strong_transitivity_verdict(const IfsSystem& ifs, const Resolution& res,
                                                 Execution exec = {}) {
  return detail::density_verdict(ifs, res, Direction::backward, exec, "strong_transitivity");
}

// ---------------------------------------------------------------------------
// Topological transitivity and S-transitivity.

struct TransitivityReport {
  Verdict verdict;
  std::vector<double> centers;            // centres of the test arcs
  std::vector<std::vector<Word>> words;   // words[u][v]: image of U_u meets V_v
  std::vector<std::vector<bool>> found;
  std::optional<std::pair<double, double>> failing_pair;
};

inline TransitivityReport topological_transitivity_verdict(const IfsSystem& ifs,
                                                           const Resolution& res,
                                                           Execution exec = {}) {
  res.validate();
  const int n = res.net_size;
  TransitivityReport rep;
  for (CirclePoint c : uniform_net(n)) rep.centers.push_back(c.value());
  rep.words.assign(static_cast<std::size_t>(n), std::vector<Word>(static_cast<std::size_t>(n)));
  rep.found.assign(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  parallel_for(static_cast<std::size_t>(n), exec, [&](std::size_t u) {
    const Arc arc_u = Arc::ball(CirclePoint(rep.centers[u]), res.r);
    NetCoverage hit(n, res.r);
    std::vector<int> fresh;
    explore_images(ifs, arc_u, res, [&](const ArcExplorer& ex, std::size_t node, const LiftedArc& s) {
      if (node == 0) return true;
      fresh.clear();
      if (hit.mark(s.arc(), &fresh) > 0) {
        const Word w = ex.word_of(node);
        for (int v : fresh) {
          rep.words[u][static_cast<std::size_t>(v)] = w;
          rep.found[u][static_cast<std::size_t>(v)] = true;
        }
      }
      return !hit.all();
    });
  });
  rep.verdict.property = "topological_transitivity";
  rep.verdict.resolution = res;
  rep.verdict.holds = true;
  for (int u = 0; u < n && rep.verdict.holds; ++u) {
    for (int v = 0; v < n; ++v) {
      if (!rep.found[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) {
        rep.verdict.holds = false;
        rep.failing_pair = {rep.centers[static_cast<std::size_t>(u)],
                            rep.centers[static_cast<std::size_t>(v)]};
        break;
      }
    }
  }
  rep.verdict.caveat = rep.verdict.holds
                           ? "every pair of net arcs is connected by a witnessed word"
                           : "no connecting word found within the depth and budget bounds";
  return rep;
}

struct CoverWitness {
  double u_center = 0.0;
  bool covered = false;
  std::vector<Word> words;
  std::int64_t explored = 0;
  double first_uncovered = -1.0;
};

struct STransitivityReport {
  Verdict verdict;
  std::vector<CoverWitness> covers;
};

/// For each test arc U, finitely many images T_i(U) whose union is
/// eps-dense on the net.
inline STransitivityReport s_transitivity_verdict(const IfsSystem& ifs, const Resolution& res,
                                                  Execution exec = {}) {
  res.validate();
  const std::vector<CirclePoint> net = uniform_net(res.net_size);
  STransitivityReport rep;
  rep.covers.resize(net.size());
  parallel_for(net.size(), exec, [&](std::size_t i) {
    const CoverResult c = cover_search(ifs, Arc::ball(net[i], res.r), res);
    rep.covers[i] = {net[i].value(), c.covered, c.words, c.explored, c.first_uncovered};
  });
  rep.verdict.property = "s_transitivity";
  rep.verdict.resolution = res;
  rep.verdict.holds = std::all_of(rep.covers.begin(), rep.covers.end(),
                                  [](const CoverWitness& c) { return c.covered; });
  rep.verdict.caveat = rep.verdict.holds
                           ? "each net arc has an explicit finite eps-cover by its images"
                           : "some net arc has no eps-cover within the depth and budget bounds";
  return rep;
}

// ---------------------------------------------------------------------------
// Sensitivity.

enum class Strategy { breadth_first, repeller_steered };

inline const char* to_string(Strategy s) {
  return s == Strategy::breadth_first ? "breadth_first" : "repeller_steered";
}

/// Best separation found for one test ball B(x, r): the two points
/// `anchor`, `partner` of the ball satisfy
/// circ_dist(f_w(anchor), f_w(partner)) = separation.
struct SeparationRecord {
  double x = 0.0;
  double r = 0.0;
  Word word;
  double anchor = 0.0;
  double partner = 0.0;
  double separation = 0.0;
  Strategy strategy = Strategy::breadth_first;
  bool capped = false;  // image arc longer than 1/2; diameter capped at 1/2
};

struct RadiusSummary {
  double r = 0.0;
  double delta_hat = 0.0;
  double worst_x = 0.0;
};

struct SensitivityReport {
  Verdict verdict;
  double delta_hat = 0.0;  // at the smallest radius
  std::vector<RadiusSummary> ladder;
  std::vector<SeparationRecord> per_point;
  std::vector<std::string> strategy_notes;
};

/// Radii 0.1, 0.05, 0.025, ... while above r_min, then r_min itself.
inline std::vector<double> radius_ladder(double r_min) {
  std::vector<double> out;
  for (double r = 0.1; r > r_min * (1.0 + 1e-12); r *= 0.5) out.push_back(r);
  out.push_back(r_min);
  return out;
}

namespace detail {

struct Repeller {
  int letter = 0;
  CirclePoint q;
  std::vector<double> points;  // backward orbit of q, sorted
  std::vector<Word> words;     // compose_word(words[i], points[i]) == q
};

inline std::vector<Repeller> repellers(const IfsSystem& ifs, const Resolution& res) {
  std::vector<Repeller> out;
  if (!ifs.all_invertible()) return out;
  for (const auto& fp : generator_fixed_points(ifs)) {
    if (fp.record.classification != FixedPointClass::repelling) continue;
    Repeller rep;
    rep.letter = fp.letter;
    rep.q = fp.record.location;
    const OrbitSet orbit = backward_orbit(ifs, rep.q, res.depth, res.budget);
    for (const auto& p : orbit.points) {
      rep.points.push_back(p.point.value());
      rep.words.push_back(p.word);
    }
    out.push_back(std::move(rep));
  }
  return out;
}

struct Candidate {
  Word word;
  double diameter = -1.0;
  Strategy strategy = Strategy::breadth_first;
};

// Repeller-steered search: pick T with T^{-1}(q) in B(x, r), so T(B) holds
// the repeller q, then iterate the generator that repels from q.
inline Candidate steered_search(const IfsSystem& ifs, const std::vector<Repeller>& reps,
                                CirclePoint x, double r, int depth) {
  constexpr std::size_t kTries = 8;
  Candidate best;
  best.strategy = Strategy::repeller_steered;
  const Arc ball = Arc::ball(x, r);
  for (const Repeller& rep : reps) {
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
      if (circ_dist(rep.points[i], x.value()) <= r &&
          static_cast<int>(rep.words[i].size()) < depth)
        inside.push_back(i);
    }
    std::stable_sort(inside.begin(), inside.end(), [&](std::size_t a, std::size_t b) {
      const double da = circ_dist(rep.points[a], x.value());
      const double db = circ_dist(rep.points[b], x.value());
      if (da != db) return da < db;
      return rep.words[a].size() < rep.words[b].size();
    });
    if (inside.size() > kTries) inside.resize(kTries);
    for (std::size_t i : inside) {
      LiftedArc s = LiftedArc::from(ball);
      Word w = rep.words[i];
      for (int letter : w) s.apply(ifs[letter]);
      if (!w.empty() && s.length() > best.diameter + 1e-15) {
        best.diameter = std::min(s.length(), 0.5);
        best.word = w;
      }
      while (static_cast<int>(w.size()) < depth && best.diameter < 0.5) {
        s.apply(ifs[rep.letter]);
        w.push_back(rep.letter);
        const double d = std::min(s.length(), 0.5);
        if (d > best.diameter + 1e-15) {
          best.diameter = d;
          best.word = w;
        }
      }
      if (best.diameter >= 0.5) return best;
    }
  }
  return best;
}

inline Candidate breadth_first_search(const IfsSystem& ifs, CirclePoint x, double r,
                                      const Resolution& res) {
  Candidate best;
  best.strategy = Strategy::breadth_first;
  ArcExplorer explorer(ifs, Arc::ball(x, r), res.depth, res.budget);
  explorer.run([&](std::size_t node, const LiftedArc& s) {
    if (node == 0) return true;
    const double d = std::min(s.length(), 0.5);
    if (d > best.diameter + 1e-15) {
      best.diameter = d;
      best.word = explorer.word_of(node);
    }
    return best.diameter < 0.5;
  });
  return best;
}

// Chooses the partner in B(x, r) and records the separation by direct
// evaluation, so that the record replays exactly.
inline SeparationRecord realise(const IfsSystem& ifs, CirclePoint x, double r, const Candidate& c) {
  SeparationRecord rec;
  rec.x = x.value();
  rec.r = r;
  rec.word = c.word;
  rec.strategy = c.strategy;
  const Arc ball = Arc::ball(x, r);
  const CirclePoint anchor = ball.start();
  auto image_extent = [&](double offset) {
    LiftedArc s{anchor.value(), anchor.value() + offset};
    for (int letter : c.word) s.apply(ifs[letter]);
    return std::fabs(s.b - s.a);
  };
  double partner_offset = ball.length();
  if (image_extent(ball.length()) > 0.5) {
    rec.capped = true;
    double lo = 0.0, hi = ball.length();
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (image_extent(mid) > 0.5) hi = mid;
      else lo = mid;
    }
    partner_offset = lo;
  }
  const CirclePoint partner = anchor.shifted(partner_offset);
  rec.anchor = anchor.value();
  rec.partner = partner.value();
  rec.separation = circ_dist(compose_word(ifs, c.word, anchor), compose_word(ifs, c.word, partner));
  return rec;
}

}  // namespace detail

/// Sensitivity estimate over the net and the radius ladder. The verdict
/// holds when the smallest radius still yields delta_hat >= eps and the
/// separation exceeds the initial ball diameter 2r, i.e. some word really
/// pulls nearby points apart.
inline SensitivityReport sensitivity_estimate(const IfsSystem& ifs, const Resolution& res,
                                              Execution exec = {}) {
  res.validate();
  const std::vector<CirclePoint> net = uniform_net(res.net_size);
  const std::vector<double> radii = radius_ladder(res.r);
  const std::vector<detail::Repeller> reps = detail::repellers(ifs, res);

  SensitivityReport rep;
  rep.per_point.resize(net.size() * radii.size());
  parallel_for(rep.per_point.size(), exec, [&](std::size_t t) {
    const double r = radii[t / net.size()];
    const CirclePoint x = net[t % net.size()];
    detail::Candidate best = detail::steered_search(ifs, reps, x, r, res.depth);
    if (best.diameter < 0.5) {
      detail::Candidate plain = detail::breadth_first_search(ifs, x, r, res);
      if (plain.diameter > best.diameter) best = std::move(plain);
    }
    rep.per_point[t] = detail::realise(ifs, x, r, best);
  });

  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    RadiusSummary s{radii[ri], std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < net.size(); ++i) {
      const auto& rec = rep.per_point[ri * net.size() + i];
      if (rec.separation < s.delta_hat) {
        s.delta_hat = rec.separation;
        s.worst_x = rec.x;
      }
    }
    rep.ladder.push_back(s);
  }
  rep.delta_hat = rep.ladder.back().delta_hat;

  if (reps.empty()) {
    rep.strategy_notes.push_back(ifs.all_invertible()
                                     ? "repeller_steered: no generator has a repelling fixed point"
                                     : "repeller_steered: unavailable, some generator is not invertible");
  } else {
    for (const auto& r : reps)
      rep.strategy_notes.push_back("repeller_steered: letter " + std::to_string(r.letter) +
                                   " repels from " + std::to_string(r.q.value()) + ", " +
                                   std::to_string(r.points.size()) + " backward-orbit points");
  }
  rep.strategy_notes.push_back(
      "breadth_first: run whenever the steered search stays below the diameter cap 1/2");

  const double r_min = radii.back();
  rep.verdict.property = "sensitivity";
  rep.verdict.resolution = res;
  rep.verdict.holds = rep.delta_hat >= res.eps && rep.delta_hat > 2.0 * r_min + 1e-9;
  rep.verdict.caveat =
      rep.verdict.holds
          ? "delta_hat is a lower estimate of the sensitivity constant"
          : "no separation beyond max(eps, 2r) found at the smallest radius within the bounds";
  return rep;
}

// ---------------------------------------------------------------------------
// Separation times and cofinite sensitivity.

/// Deterministic rule supplying letter n+1 from the first n letters.
struct ExtensionRule {
  enum class Kind { constant, periodic, greedy_diameter };
  Kind kind = Kind::greedy_diameter;
  Word pattern;  // constant: one letter; periodic: the repeated block

  static ExtensionRule constant(int letter) { return {Kind::constant, Word{letter}}; }
  static ExtensionRule periodic(Word block) { return {Kind::periodic, std::move(block)}; }
  static ExtensionRule greedy() { return {Kind::greedy_diameter, {}}; }

  [[nodiscard]] std::string name() const {
    switch (kind) {
      case Kind::constant: return "constant" + pattern.to_string();
      case Kind::periodic: return "periodic" + pattern.to_string();
      case Kind::greedy_diameter: return "greedy_diameter";
    }
    return "?";
  }
};

struct SeparationTimes {
  std::vector<int> times;  // ascending
  Word letters;            // the first `horizon` letters of the branch
};

/// {n <= horizon : diam(f^n_w(U)) > delta} along the branch the rule builds.
inline SeparationTimes separation_times(const IfsSystem& ifs, const Arc& u,
                                        const ExtensionRule& rule, double delta, int horizon) {
  if (horizon < 0) throw InvalidInput("separation_times: horizon must be >= 0");
  if (rule.kind != ExtensionRule::Kind::greedy_diameter) {
    if (rule.pattern.empty()) throw InvalidInput("separation_times: empty rule pattern");
    rule.pattern.check_alphabet(ifs.size());
  }
  SeparationTimes out;
  LiftedArc s = LiftedArc::from(u);
  for (int n = 0;; ++n) {
    if (std::min(s.length(), 0.5) > delta) out.times.push_back(n);
    if (n == horizon) break;
    int letter = 1;
    switch (rule.kind) {
      case ExtensionRule::Kind::constant: letter = rule.pattern[0]; break;
      case ExtensionRule::Kind::periodic:
        letter = rule.pattern[static_cast<std::size_t>(n) % rule.pattern.size()];
        break;
      case ExtensionRule::Kind::greedy_diameter: {
        double best = -1.0;
        for (int g = 1; g <= ifs.size(); ++g) {
          LiftedArc trial = s;
          trial.apply(ifs[g]);
          const double d = std::min(trial.length(), 0.5);
          if (d > best) {
            best = d;
            letter = g;
          }
        }
        break;
      }
    }
    s.apply(ifs[letter]);
    out.letters.push_back(letter);
  }
  return out;
}

struct CofiniteWitness {
  double u_center = 0.0;
  bool found = false;
  std::string rule;
  int first_n = -1;  // N with [N, N + window] inside the separation times
  Word letters;      // branch prefix of length N + window
};

struct CofiniteReport {
  Verdict verdict;
  double delta = 0.0;
  int window = 0;
  int max_first_n = -1;
  std::vector<CofiniteWitness> per_arc;
};

inline std::vector<ExtensionRule> candidate_rules(int k) {
  std::vector<ExtensionRule> rules{ExtensionRule::greedy()};
  for (int g = 1; g <= k; ++g) rules.push_back(ExtensionRule::constant(g));
  for (int a = 1; a <= k; ++a)
    for (int b = 1; b <= k; ++b)
      if (a != b) rules.push_back(ExtensionRule::periodic(Word{a, b}));
  return rules;
}

/// For every test arc, a branch whose separation times contain a whole
/// window [N, N + window] with N <= depth.
inline CofiniteReport cofinite_sensitivity_verdict(const IfsSystem& ifs, double delta,
                                                   const Resolution& res, int window,
                                                   Execution exec = {}) {
  res.validate();
  if (window < 1) throw InvalidInput("cofinite_sensitivity: window must be >= 1");
  if (!(delta > 0.0)) throw InvalidInput("cofinite_sensitivity: delta must be > 0");
  const std::vector<CirclePoint> net = uniform_net(res.net_size);
  const std::vector<ExtensionRule> rules = candidate_rules(ifs.size());
  const int horizon = res.depth + window;
  CofiniteReport rep;
  rep.delta = delta;
  rep.window = window;
  rep.per_arc.resize(net.size());
  parallel_for(net.size(), exec, [&](std::size_t i) {
    CofiniteWitness w;
    w.u_center = net[i].value();
    const Arc u = Arc::ball(net[i], res.r);
    for (const ExtensionRule& rule : rules) {
      const SeparationTimes st = separation_times(ifs, u, rule, delta, horizon);
      std::vector<bool> in(static_cast<std::size_t>(horizon) + 1, false);
      for (int t : st.times) in[static_cast<std::size_t>(t)] = true;
      int run = 0;
      for (int n = 0; n <= horizon; ++n) {
        run = in[static_cast<std::size_t>(n)] ? run + 1 : 0;
        if (run == window + 1) {
          w.found = true;
          w.first_n = n - window;
          break;
        }
      }
      if (w.found) {
        w.rule = rule.name();
        w.letters = Word(std::vector<int>(st.letters.begin(),
                                          st.letters.begin() + w.first_n + window));
        break;
      }
    }
    rep.per_arc[i] = std::move(w);
  });
  rep.verdict.property = "cofinite_sensitivity";
  rep.verdict.resolution = res;
  rep.verdict.holds = true;
  for (const auto& w : rep.per_arc) {
    rep.verdict.holds = rep.verdict.holds && w.found;
    rep.max_first_n = std::max(rep.max_first_n, w.first_n);
  }
  rep.verdict.caveat = "separation is checked on [N, N + window] only; cofiniteness beyond the "
                       "window is extrapolated";
  return rep;
}

// ---------------------------------------------------------------------------
// Periodic points and almost periodicity.

struct PeriodicDensityReport {
  Verdict verdict;
  int max_len = 0;
  std::vector<OrbitPoint> points;
  double max_gap = 1.0;
};

/// Periodic points of words up to max_len are eps-dense.
inline PeriodicDensityReport periodic_density_verdict(const IfsSystem& ifs, int max_len,
                                                      const Resolution& res) {
  res.validate();
  PeriodicDensityReport rep;
  rep.max_len = max_len;
  rep.points = periodic_points(ifs, max_len, 1e-9, res.net_size);
  std::vector<double> vals;
  for (const auto& p : rep.points) vals.push_back(p.point.value());
  rep.max_gap = largest_gap(vals).length;
  rep.verdict.property = "periodic_density";
  rep.verdict.resolution = res;
  rep.verdict.holds = rep.max_gap <= 2.0 * res.eps;
  rep.verdict.caveat = "only words of length <= " + std::to_string(max_len) + " are searched";
  return rep;
}

struct AlmostPeriodicReport {
  Verdict verdict;
  double x = 0.0;
  std::int64_t orbit_size = 0;
  std::vector<double> closure;       // eps-thinned approximation of the orbit closure
  std::vector<double> limit_points;  // attracting fixed points added to the closure
  std::optional<double> failing_y;   // a closure point whose orbit misses part of it
  double uncovered = -1.0;           // the missed closure point
};

/// x is almost periodic when its orbit closure is minimal: every point y of
/// the closure approximation S has an orbit eps-dense in S. S holds the
/// eps-thinned orbit plus every attracting generator fixed point whose
/// basin meets the orbit (such a point is a limit of the orbit).
inline AlmostPeriodicReport almost_periodic_verdict(const IfsSystem& ifs, CirclePoint x,
                                                    const Resolution& res, Execution exec = {}) {
  res.validate();
  AlmostPeriodicReport rep;
  rep.x = x.value();
  rep.verdict.property = "almost_periodic";
  rep.verdict.resolution = res;

  OrbitExplorer e(ifs, x, Direction::forward, res.depth, res.budget);
  e.expand_all();
  rep.orbit_size = static_cast<std::int64_t>(e.size());
  std::vector<double> orbit = e.values();
  std::sort(orbit.begin(), orbit.end());

  for (const auto& fp : generator_fixed_points(ifs)) {
    if (fp.record.classification != FixedPointClass::attracting) continue;
    const Arc& basin = fp.record.basin;
    const bool reached = std::any_of(orbit.begin(), orbit.end(),
                                     [&basin](double p) { return basin.contains(CirclePoint(p)); });
    const double loc = fp.record.location.value();
    if (reached && std::find(rep.limit_points.begin(), rep.limit_points.end(), loc) ==
                       rep.limit_points.end())
      rep.limit_points.push_back(loc);
  }
  std::sort(rep.limit_points.begin(), rep.limit_points.end());

  // eps-thinning: keep points at mutual distance >= eps, limit points first.
  std::vector<double> closure = rep.limit_points;
  for (double p : orbit) {
    if (detail::distance_to_sorted(closure, p) >= res.eps) {
      closure.insert(std::upper_bound(closure.begin(), closure.end(), p), p);
    }
  }
  rep.closure = closure;

  // Candidates in canonical order: limit points, then the rest.
  std::vector<double> order = rep.limit_points;
  for (double p : closure)
    if (std::find(order.begin(), order.end(), p) == order.end()) order.push_back(p);

  auto first_missed_from = [&](double y) {
    OrbitExplorer ey(ifs, CirclePoint(y), Direction::forward, res.depth, res.budget);
    auto first_missed = [&]() -> double {
      const std::vector<double>& pts = ey.sorted_values();
      for (double s : closure)
        if (detail::distance_to_sorted(pts, s) > res.eps) return s;
      return -1.0;
    };
    double m = first_missed();
    while (m >= 0.0 && ey.expand_level()) m = first_missed();
    return m;
  };
  // Blocks of candidates in order; stop after the first block with a miss,
  // so the reported candidate does not depend on the thread count.
  rep.verdict.holds = true;
  const std::size_t block = std::max(1u, exec.threads);
  std::vector<double> missed;
  for (std::size_t lo = 0; lo < order.size() && rep.verdict.holds; lo += block) {
    const std::size_t n = std::min(block, order.size() - lo);
    missed.assign(n, -1.0);
    parallel_for(n, exec, [&](std::size_t k) { missed[k] = first_missed_from(order[lo + k]); });
    for (std::size_t k = 0; k < n; ++k) {
      if (missed[k] >= 0.0) {
        rep.verdict.holds = false;
        rep.failing_y = order[lo + k];
        rep.uncovered = missed[k];
        break;
      }
    }
  }
  rep.verdict.caveat = rep.verdict.holds
                           ? "every sampled closure point has an eps-dense orbit in the closure"
                           : "some closure point's orbit stays away from part of the closure";
  return rep;
}

// ---------------------------------------------------------------------------
// Sensitivity from non-minimality.

struct DoubleCoverWitness {
  double u_center = 0.0;
  bool ok = false;
  Word first;   // T_s: a cover word of U whose image comes closest to y
  Word second;  // T': a cover word of T_s(U) whose image meets V
  double diameter = 0.0;  // diam(T'(T_s(U)))
};

struct NonminimalityWitness {
  double y = 0.0;                  // point with a non-dense orbit
  std::vector<double> closure;     // its orbit (approximate closure)
  double z = 0.0;                  // point farthest from that closure
  double distance = 0.0;           // d(z, closure)
  double delta_candidate = 0.0;    // distance / 4
  std::vector<DoubleCoverWitness> checks;
  Verdict verification;
};

/// A non-dense orbit closure K of some y and a point z off it give the
/// candidate constant delta = d(z, K)/4. Verification: for each test arc U,
/// a cover word T_s of U whose image approaches y, then a cover word T' of
/// T_s(U) whose image meets V = B(z, delta) with diameter above delta.
inline NonminimalityWitness sensitivity_witness_from_nonminimality(const IfsSystem& ifs,
                                                                   const Resolution& res,
                                                                   Execution exec = {}) {
  const DensityReport minimal = minimality_verdict(ifs, res, exec);
  if (minimal.verdict.holds)
    throw NotApplicable("every sampled forward orbit is eps-dense; no non-minimality witness");

  const OrbitDensity* worst = &minimal.per_point.front();
  for (const auto& d : minimal.per_point)
    if (d.max_gap > worst->max_gap) worst = &d;

  NonminimalityWitness out;
  out.y = worst->base;
  OrbitExplorer e(ifs, CirclePoint(out.y), Direction::forward, res.depth, res.budget);
  e.expand_all();
  out.closure = e.values();
  std::sort(out.closure.begin(), out.closure.end());
  const Gap gap = largest_gap(out.closure);
  out.z = gap.start.shifted(0.5 * gap.length).value();
  out.distance = 0.5 * gap.length;
  out.delta_candidate = 0.25 * out.distance;

  const double delta = out.delta_candidate;
  const CirclePoint y(out.y);
  const Arc v = Arc::ball(CirclePoint(out.z), delta);
  const std::vector<CirclePoint> net = uniform_net(res.net_size);
  out.checks.resize(net.size());
  parallel_for(net.size(), exec, [&](std::size_t i) {
    DoubleCoverWitness w;
    w.u_center = net[i].value();
    const Arc u = Arc::ball(net[i], res.r);
    const CoverResult h1 = cover_search(ifs, u, res);
    if (h1.covered) {
      std::vector<std::size_t> order(h1.words.size());
      std::vector<double> dist(h1.words.size());
      for (std::size_t j = 0; j < order.size(); ++j) {
        order[j] = j;
        dist[j] = map_arc_word(ifs, h1.words[j], u).distance_to(y);
      }
      std::stable_sort(order.begin(), order.end(),
                       [&dist](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
      for (std::size_t j : order) {
        const Word& ts = h1.words[j];
        const Arc image = map_arc_word(ifs, ts, u);
        std::optional<Word> hit;
        cover_search(ifs, image, res, [&](const ArcExplorer& ex, std::size_t node, const LiftedArc& s) {
          if (node == 0) return false;
          const Arc a = s.arc();
          if (arc_gap(a, v) > 0.0 || arc_diameter(a) <= delta) return false;
          hit = ex.word_of(node);
          return true;
        });
        if (!hit) continue;
        const Arc composite = map_arc_word(ifs, concat(ts, *hit), u);
        if (arc_diameter(composite) > delta && arc_gap(composite, v) <= 1e-10) {
          w.ok = true;
          w.first = ts;
          w.second = *hit;
          w.diameter = arc_diameter(composite);
          break;
        }
      }
    }
    out.checks[i] = std::move(w);
  });
  out.verification.property = "sensitivity_from_nonminimality";
  out.verification.resolution = res;
  out.verification.holds = std::all_of(out.checks.begin(), out.checks.end(),
                                       [](const DoubleCoverWitness& w) { return w.ok; });
  out.verification.caveat =
      out.verification.holds
          ? "every net arc has a double-cover word whose image exceeds delta_candidate"
          : "some net arc has no double-cover witness within the bounds";
  return out;
}

}  // namespace ifslab
