#pragma once

// Derivative-based conditions: expanding and locally expanding systems,
// expanding covers and their Lebesgue numbers, admissible itineraries.
// On the circle the norm and co-norm of Dh(x) are both |h'(x)|.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ifslab/circle.hpp"
#include "ifslab/detectors.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/parallel.hpp"
#include "ifslab/semigroup.hpp"
#include "ifslab/symbolic.hpp"

namespace ifslab {

struct ExpandingVerdict {
  bool holds = false;
  double eta = 0.0;  // max of 1/|f_i'| over generators and grid points
};

/// Every generator has |derivative| > 1 on a uniform grid of `grid` points.
/// A grid point on a breakpoint triggers one retry on the half-step shifted
/// grid.
inline ExpandingVerdict expanding_verdict(const IfsSystem& ifs, int grid) {
  if (grid < 2) throw InvalidInput("expanding_verdict: grid must be >= 2");
  auto scan = [&](const Generator& g, double offset, ExpandingVerdict& out) {
    for (int i = 0; i < grid; ++i) {
      const double d = std::fabs(g.derivative((i + offset) / grid));
      out.holds = out.holds && d > 1.0;
      out.eta = std::max(out.eta, 1.0 / d);
    }
  };
  ExpandingVerdict out{true, 0.0};
  for (const Generator& g : ifs.generators()) {
    ExpandingVerdict part{true, 0.0};
    try {
      scan(g, 0.0, part);
    } catch (const NotDifferentiable&) {
      part = {true, 0.0};
      scan(g, 0.5, part);
    }
    out.holds = out.holds && part.holds;
    out.eta = std::max(out.eta, part.eta);
  }
  return out;
}

struct CoverPiece {
  Arc v;
  Word h;
  double sigma_local = 0.0;  // bound on 1/|h'| over v, < 1
};

struct ExpandingCover {
  std::vector<CoverPiece> pieces;  // sorted by start
  double sigma = 0.0;
  double lebesgue = 0.0;
};

/// The largest rho such that every ball B(x, rho), x on the uniform net,
/// lies inside a single arc of the cover; capped at 1/2.
inline double lebesgue_number(const std::vector<Arc>& cover, int net) {
  if (net < 1) throw InvalidInput("lebesgue_number: net must be >= 1");
  double rho = 0.5;
  for (CirclePoint c : uniform_net(net)) {
    double best = -1.0;
    for (const Arc& a : cover) {
      if (a.is_full()) {
        best = 0.5;
        break;
      }
      if (!a.contains(c)) continue;
      const double off = ccw_offset(a.start(), c);
      const double inside = off > a.length() ? 0.0 : std::min(off, a.length() - off);
      best = std::max(best, inside);
    }
    if (best < 0.0) throw NotACover("point not covered by any arc", c.value());
    rho = std::min(rho, best);
  }
  return rho;
}

namespace detail {

inline double min_abs_slope(const IfsSystem& ifs, const Word& h, CirclePoint x) {
  const Slopes s = word_slopes(ifs, h, x);
  return std::min(std::fabs(s.left), std::fabs(s.right));
}

// Sampled bound on 1/|h'| over an arc: the sample maximum plus the largest
// jump between neighbouring samples.
inline double sampled_sigma(const IfsSystem& ifs, const Word& h, const Arc& v, int samples = 4001) {
  double worst = 0.0, jump = 0.0, prev = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = samples == 1 ? 0.0 : v.length() * i / (samples - 1);
    const double m = min_abs_slope(ifs, h, v.at(t));
    const double inv = m > 0.0 ? 1.0 / m : std::numeric_limits<double>::infinity();
    if (i > 0) jump = std::max(jump, std::fabs(inv - prev));
    worst = std::max(worst, inv);
    prev = inv;
  }
  return worst + jump;
}

inline Arc arc_union(const Arc& a, const Arc& b) {
  if (a.is_full() || b.is_full()) return Arc::full_circle();
  auto from = [](const Arc& x, const Arc& y) -> std::optional<Arc> {
    const double o = ccw_offset(x.start(), y.start());
    if (o > x.length()) return std::nullopt;
    const double len = std::max(x.length(), o + y.length());
    return len >= 1.0 ? Arc::full_circle() : Arc(x.start(), len);
  };
  auto ab = from(a, b);
  auto ba = from(b, a);
  if (ab && ba) return ab->length() <= ba->length() ? *ab : *ba;
  if (ab) return *ab;
  if (ba) return *ba;
  throw InvalidInput("arc_union: arcs are disjoint");
}

}  // namespace detail

/// For each net point the shortest word expanding there, an arc grown
/// around the point on which the word keeps expanding, and merging of
/// overlapping same-word arcs.
inline ExpandingCover local_expanding_cover(const IfsSystem& ifs, const Resolution& res,
                                            Execution exec = {}) {
  res.validate();
  const std::vector<CirclePoint> net = uniform_net(res.net_size);
  std::vector<std::optional<CoverPiece>> found(net.size());
  parallel_for(net.size(), exec, [&](std::size_t i) {
    const CirclePoint x = net[i];
    WordEnumerator words(ifs.size(), res.depth, res.budget);
    std::optional<Word> h;
    while (auto w = words.next()) {
      if (w->empty()) continue;
      if (detail::min_abs_slope(ifs, *w, x) > 1.0) {
        h = std::move(*w);
        break;
      }
    }
    if (!h) return;
    auto ok = [&](double rho) { return detail::sampled_sigma(ifs, *h, Arc::ball(x, rho), 1001) < 1.0; };
    double rho = 0.0;
    if (ok(0.25)) {
      rho = 0.25;
    } else {
      double lo = 0.0, hi = 0.25;
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ok(mid)) lo = mid;
        else hi = mid;
      }
      rho = lo;
    }
    // Shrink until the finer bound is also below 1.
    while (rho > 0.0 && detail::sampled_sigma(ifs, *h, Arc::ball(x, rho)) >= 1.0) rho *= 0.9;
    found[i] = CoverPiece{Arc::ball(x, rho), *h, 0.0};
  });
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (!found[i]) throw NotLocallyExpanding("no expanding word within the bounds", net[i].value());
  }

  std::vector<CoverPiece> pieces;
  for (auto& f : found) pieces.push_back(std::move(*f));
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t i = 0; i < pieces.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < pieces.size(); ++j) {
        if (pieces[i].h != pieces[j].h || arc_gap(pieces[i].v, pieces[j].v) > 0.0) continue;
        const Arc joined = detail::arc_union(pieces[i].v, pieces[j].v);
        if (detail::sampled_sigma(ifs, pieces[i].h, joined) >= 1.0) continue;
        pieces[i].v = joined;
        pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(j));
        merged = true;
        break;
      }
    }
  }
  ExpandingCover cover;
  for (auto& p : pieces) {
    p.sigma_local = detail::sampled_sigma(ifs, p.h, p.v);
    if (p.sigma_local >= 1.0)
      throw NotLocallyExpanding("no expansion bound below 1 on the grown arc", p.v.midpoint().value());
  }
  std::stable_sort(pieces.begin(), pieces.end(), [](const CoverPiece& a, const CoverPiece& b) {
    if (a.v.start() != b.v.start()) return a.v.start() < b.v.start();
    return a.h < b.h;
  });
  cover.pieces = std::move(pieces);
  std::vector<Arc> arcs;
  for (const auto& p : cover.pieces) {
    cover.sigma = std::max(cover.sigma, p.sigma_local);
    arcs.push_back(p.v);
  }
  cover.lebesgue = lebesgue_number(arcs, res.net_size);
  return cover;
}

/// omega_0 is the smallest piece index containing x; each later index is
/// the smallest piece containing the image of the current point under the
/// previous piece's word.
inline std::vector<int> admissible_itinerary(const IfsSystem& ifs, const ExpandingCover& cover,
                                             CirclePoint x, int length) {
  if (length < 1) throw InvalidInput("admissible_itinerary: length must be >= 1");
  auto locate = [&cover](CirclePoint p) {
    for (std::size_t i = 0; i < cover.pieces.size(); ++i)
      if (cover.pieces[i].v.contains(p, 1e-12)) return static_cast<int>(i);
    throw NotACover("itinerary left the cover", p.value());
  };
  std::vector<int> out;
  CirclePoint p = x;
  for (int n = 0; n < length; ++n) {
    const int idx = locate(p);
    out.push_back(idx);
    p = compose_word(ifs, cover.pieces[static_cast<std::size_t>(idx)].h, p);
  }
  return out;
}

}  // namespace ifslab
