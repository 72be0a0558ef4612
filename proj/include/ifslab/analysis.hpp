#pragma once

// Runs detectors by name and assembles versioned reports. Shared by the
// command-line tool and the gallery conformance checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifslab/detectors.hpp"
#include "ifslab/gallery.hpp"
#include "ifslab/io.hpp"
#include "ifslab/smooth.hpp"

namespace ifslab {

struct AnalysisOptions {
  Resolution res;
  double delta = 0.2;     // cofinite sensitivity target
  int window = 100;       // cofinite sensitivity window
  double x = 0.3;         // base point for almost periodicity
  int periodic_len = 2;   // word length bound for periodic points
  int grid = 1000;        // derivative grid for the expanding test
  Execution exec;
};

struct PropertyResult {
  std::string property;
  bool holds = false;
  json report;
  double seconds = 0.0;
};

inline const std::vector<std::string>& property_names() {
  static const std::vector<std::string> names{
      "minimality",        "strong_transitivity", "transitivity",      "s_transitivity",
      "sensitivity",       "cofinite_sensitivity", "periodic_density", "almost_periodic",
      "expanding",         "local_expanding",     "repelling_fixed_point",
      "nonminimality_witness"};
  return names;
}

inline void check_property_name(const std::string& name) {
  const auto& names = property_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw InvalidInput("unknown property '" + name + "'");
}

/// Runs one detector. NonInvertible and NotDifferentiable propagate.
inline PropertyResult run_property(const IfsSystem& ifs, const std::string& name,
                                   const AnalysisOptions& opt) {
  check_property_name(name);
  const auto t0 = std::chrono::steady_clock::now();
  PropertyResult out;
  out.property = name;
  const Resolution& res = opt.res;
  if (name == "minimality") {
    auto r = minimality_verdict(ifs, res, opt.exec);
    out.holds = r.verdict.holds;
    out.report = r;
  } else if (name == "strong_transitivity") {
    auto r = strong_transitivity_verdict(ifs, res, opt.exec);
    out.holds = r.verdict.holds;
    out.report = r;
  } else if (name == "transitivity") {
    auto r = topological_transitivity_verdict(ifs, res, opt.exec);
    out.holds = r.verdict.holds;
    out.report = r;
  } else if (name == "s_transitivity") {
    auto r = s_transitivity_verdict(ifs, res, opt.exec);
    out.holds = r.verdict.holds;
    out.report = r;
  } else if (name == "sensitivity") {
    auto r = sensitivity_estimate(ifs, res, opt.exec);
    out.holds = r.verdict.holds;
    out.report = r;
  } else if (name == "cofinite_sensitivity") {
    auto r = cofinite_sensitivity_verdict(ifs, opt.delta, res, opt.window, opt.exec);
    out.holds = r.verdict.holds;
    out.report = r;
  } else if (name == "periodic_density") {
    auto r = periodic_density_verdict(ifs, opt.periodic_len, res);
    out.holds = r.verdict.holds;
    out.report = r;
  } else if (name == "almost_periodic") {
    auto r = almost_periodic_verdict(ifs, CirclePoint(opt.x), res, opt.exec);
    out.holds = r.verdict.holds;
    out.report = r;
  } else if (name == "expanding") {
    auto r = expanding_verdict(ifs, opt.grid);
    out.holds = r.holds;
    out.report = r;
  } else if (name == "local_expanding") {
    try {
      auto cover = local_expanding_cover(ifs, res, opt.exec);
      out.holds = true;
      out.report = {{"cover", cover}};
    } catch (const NotLocallyExpanding& e) {
      out.holds = false;
      out.report = {{"stuck_point", e.point}, {"reason", e.what()}};
    }
  } else if (name == "repelling_fixed_point") {
    json pts = json::array();
    for (const auto& fp : generator_fixed_points(ifs)) {
      pts.push_back({{"letter", fp.letter}, {"fixed_point", fp.record}});
      out.holds = out.holds || fp.record.classification == FixedPointClass::repelling;
    }
    out.report = {{"fixed_points", pts}};
  } else if (name == "nonminimality_witness") {
    try {
      auto w = sensitivity_witness_from_nonminimality(ifs, res, opt.exec);
      out.holds = w.verification.holds;
      out.report = w;
    } catch (const NotApplicable& e) {
      out.holds = false;
      out.report = {{"not_applicable", e.what()}};
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// Versioned report document. Timings are omitted when `timing` is false,
/// which makes the document a pure function of its inputs.
inline json make_report(const json& source, const IfsSystem& ifs, const AnalysisOptions& opt,
                        const std::vector<PropertyResult>& results, bool timing) {
  json props = json::array();
  for (const auto& r : results) {
    json entry{{"property", r.property}, {"holds", r.holds}, {"report", r.report}};
    if (timing) entry["seconds"] = r.seconds;
    props.push_back(entry);
  }
  return {{"schema", kSchema},
          {"tool_version", kToolVersion},
          {"source", source},
          {"system", system_to_json(ifs)},
          {"resolution", opt.res},
          {"parameters",
           {{"delta", opt.delta},
            {"window", opt.window},
            {"x", opt.x},
            {"periodic_len", opt.periodic_len},
            {"grid", opt.grid}}},
          {"properties", props}};
}

struct ExpectationOutcome {
  Expectation expected;
  PropertyResult result;
  bool matches = false;
};

/// Runs every expectation of a gallery entry at the given options, with
/// per-expectation overrides of x and delta.
inline std::vector<ExpectationOutcome> verify_entry(const GalleryEntry& entry,
                                                    const AnalysisOptions& base) {
  std::vector<ExpectationOutcome> out;
  for (const Expectation& e : entry.expected) {
    AnalysisOptions opt = base;
    if (e.x) opt.x = *e.x;
    if (e.delta) opt.delta = *e.delta;
    ExpectationOutcome o;
    o.expected = e;
    o.result = run_property(entry.system, e.property, opt);
    o.matches = o.result.holds == e.holds;
    if (e.eta && o.matches) o.matches = std::fabs(o.result.report.at("eta").get<double>() - *e.eta) <= 1e-12;
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace ifslab
