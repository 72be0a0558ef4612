#pragma once

// JSON encoding of systems, verdicts and reports. Keys are emitted in
// sorted order, so equal values always serialise to equal bytes.

#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ifslab/circle.hpp"
#include "ifslab/detectors.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/generators.hpp"
#include "ifslab/semigroup.hpp"
#include "ifslab/smooth.hpp"
#include "ifslab/symbolic.hpp"

NLOHMANN_JSON_NAMESPACE_BEGIN
template <typename T>
struct adl_serializer<std::optional<T>> {
  static void to_json(json& j, const std::optional<T>& v) {
    if (v) j = *v;
    else j = nullptr;
  }
  static void from_json(const json& j, std::optional<T>& v) {
    if (j.is_null()) v.reset();
    else v = j.get<T>();
  }
};
NLOHMANN_JSON_NAMESPACE_END

namespace ifslab {

using json = nlohmann::json;

inline constexpr const char* kSchema = "ifs-lab/1";
inline constexpr const char* kToolVersion = "1.0.0";

inline void to_json(json& j, const Word& w) { j = w.letters(); }
inline void from_json(const json& j, Word& w) { w = Word(j.get<std::vector<int>>()); }

inline void to_json(json& j, const CirclePoint& p) { j = p.value(); }
inline void from_json(const json& j, CirclePoint& p) { p = CirclePoint(j.get<double>()); }

inline void to_json(json& j, const Arc& a) {
  j = json{{"start", a.start().value()}, {"length", a.length()}};
}
inline void from_json(const json& j, Arc& a) {
  a = Arc(j.at("start").get<double>(), j.at("length").get<double>());
}

NLOHMANN_JSON_SERIALIZE_ENUM(Direction, {{Direction::forward, "forward"},
                                         {Direction::backward, "backward"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Strategy, {{Strategy::breadth_first, "breadth_first"},
                                        {Strategy::repeller_steered, "repeller_steered"}})
NLOHMANN_JSON_SERIALIZE_ENUM(FixedPointClass, {{FixedPointClass::attracting, "attracting"},
                                               {FixedPointClass::repelling, "repelling"},
                                               {FixedPointClass::semistable, "semistable"},
                                               {FixedPointClass::nonhyperbolic, "nonhyperbolic"}})

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Slopes, left, right)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FixedPointRecord, location, multipliers, classification, basin)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Resolution, eps, r, depth, net_size, budget)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Verdict, property, holds, resolution, caveat)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(OrbitPoint, point, word)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(OrbitDensity, base, dense, max_gap, gap_start, orbit_size, levels,
                                   sample_points, sample_words)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DensityReport, verdict, direction, per_point, worst_point,
                                   worst_gap)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TransitivityReport, verdict, centers, words, found, failing_pair)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CoverWitness, u_center, covered, words, explored, first_uncovered)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(STransitivityReport, verdict, covers)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SeparationRecord, x, r, word, anchor, partner, separation,
                                   strategy, capped)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RadiusSummary, r, delta_hat, worst_x)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SensitivityReport, verdict, delta_hat, ladder, per_point,
                                   strategy_notes)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CofiniteWitness, u_center, found, rule, first_n, letters)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CofiniteReport, verdict, delta, window, max_first_n, per_arc)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PeriodicDensityReport, verdict, max_len, points, max_gap)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AlmostPeriodicReport, verdict, x, orbit_size, closure,
                                   limit_points, failing_y, uncovered)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DoubleCoverWitness, u_center, ok, first, second, diameter)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NonminimalityWitness, y, closure, z, distance, delta_candidate,
                                   checks, verification)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ExpandingVerdict, holds, eta)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CoverPiece, v, h, sigma_local)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ExpandingCover, pieces, sigma, lebesgue)

// ---------------------------------------------------------------------------
// Generators and systems.

inline json generator_to_json(const Generator& g) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Rotation>) return {{"type", "rotation"}, {"alpha", k.alpha}};
        else if constexpr (std::is_same_v<K, Flip>) return {{"type", "flip"}};
        else if constexpr (std::is_same_v<K, NorthSouth>)
          return {{"type", "north_south"}, {"q", k.repeller}, {"lambda", k.lambda}};
        else if constexpr (std::is_same_v<K, PiecewiseLinear>)
          return {{"type", "piecewise_linear"}, {"breakpoints", k.breakpoints}};
        else return {{"type", "expanding"}, {"m", k.m}};
      },
      g.kind());
}

inline json system_to_json(const IfsSystem& ifs) {
  json gens = json::array();
  for (const Generator& g : ifs.generators()) gens.push_back(generator_to_json(g));
  return {{"generators", gens}};
}

namespace detail {

[[noreturn]] inline void bad_field(const std::string& path, const std::string& msg) {
  throw InvalidInput("field " + path + ": " + msg);
}

// A real given as a JSON number or as a decimal string.
inline double read_real(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty())
      bad_field(path, "'" + s + "' is not a decimal number");
    return v;
  }
  bad_field(path, "expected a number or a decimal string");
}

inline int read_int(const json& j, const std::string& path) {
  const double v = read_real(j, path);
  if (v != std::floor(v) || std::fabs(v) > 1e9) bad_field(path, "expected an integer");
  return static_cast<int>(v);
}

inline void allow_only(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) bad_field(path + "." + k, "unknown field");
  }
}

inline const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) bad_field(path + "." + key, "missing");
  return *it;
}

inline Generator generator_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) bad_field(path, "expected an object");
  const json& type = require(j, path, "type");
  if (!type.is_string()) bad_field(path + ".type", "expected a string");
  const std::string t = type.get<std::string>();
  try {
    if (t == "rotation") {
      allow_only(j, path, {"type", "alpha"});
      return Generator::rotation(read_real(require(j, path, "alpha"), path + ".alpha"));
    }
    if (t == "flip") {
      allow_only(j, path, {"type"});
      return Generator::flip();
    }
    if (t == "north_south") {
      allow_only(j, path, {"type", "q", "lambda"});
      return Generator::north_south(read_real(require(j, path, "q"), path + ".q"),
                                    read_real(require(j, path, "lambda"), path + ".lambda"));
    }
    if (t == "piecewise_linear") {
      allow_only(j, path, {"type", "breakpoints"});
      const json& bp = require(j, path, "breakpoints");
      if (!bp.is_array()) bad_field(path + ".breakpoints", "expected an array of [x, y] pairs");
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = 0; i < bp.size(); ++i) {
        const std::string p = path + ".breakpoints[" + std::to_string(i) + "]";
        if (!bp[i].is_array() || bp[i].size() != 2) bad_field(p, "expected an [x, y] pair");
        pts.emplace_back(read_real(bp[i][0], p + "[0]"), read_real(bp[i][1], p + "[1]"));
      }
      return Generator::piecewise_linear(std::move(pts));
    }
    if (t == "expanding") {
      allow_only(j, path, {"type", "m"});
      return Generator::expanding(read_int(require(j, path, "m"), path + ".m"));
    }
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    if (msg.rfind("field ", 0) == 0) throw;
    bad_field(path, msg);
  }
  bad_field(path + ".type", "unknown generator type '" + t + "'");
}

}  // namespace detail

/// Parses a system document. Syntax errors report line and column; schema
/// errors report the offending field path.
inline IfsSystem parse_system(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) detail::bad_field("$", "expected an object");
  detail::allow_only(doc, "$", {"generators", "schema"});
  if (doc.contains("schema") && doc["schema"] != kSchema)
    detail::bad_field("$.schema", std::string("expected \"") + kSchema + "\"");
  const json& gens = detail::require(doc, "$", "generators");
  if (!gens.is_array() || gens.empty()) detail::bad_field("$.generators", "expected a non-empty array");
  std::vector<Generator> out;
  for (std::size_t i = 0; i < gens.size(); ++i)
    out.push_back(detail::generator_from_json(gens[i], "$.generators[" + std::to_string(i) + "]"));
  return IfsSystem(std::move(out));
}

}  // namespace ifslab
