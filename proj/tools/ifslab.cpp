// ifslab: analyze circle IFS and check gallery manifests.
//
//   ifslab analyze --gallery rotation_flip --props transitivity,sensitivity
//   ifslab analyze --system sys.json --props minimality --out report.json
//   ifslab verify --gallery ex42_hinges
//
// Exit codes: 0 ok, 1 verify mismatch, 2 malformed input,
// 3 detector needs invertibility or smoothness the system lacks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ifslab/ifslab.hpp"

namespace {

struct Cli {
  std::string gallery;
  std::string system_path;
  std::string props;
  std::string out_path;
  bool no_timing = false;
  ifslab::AnalysisOptions opt;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void add_common(CLI::App* cmd, Cli& c) {
  auto* g = cmd->add_option("--gallery", c.gallery, "gallery entry name");
  auto* s = cmd->add_option("--system", c.system_path, "system JSON file");
  g->excludes(s);
  cmd->add_option("--eps", c.opt.res.eps, "density tolerance");
  cmd->add_option("--r", c.opt.res.r, "test-ball radius");
  cmd->add_option("--depth", c.opt.res.depth, "maximal word length");
  cmd->add_option("--net", c.opt.res.net_size, "net size");
  cmd->add_option("--budget", c.opt.res.budget, "maximal states per search");
  cmd->add_option("--delta", c.opt.delta, "cofinite sensitivity constant");
  cmd->add_option("--window", c.opt.window, "cofinite sensitivity window");
  cmd->add_option("--x", c.opt.x, "base point for almost_periodic");
  cmd->add_option("--threads", c.opt.exec.threads, "worker threads");
  cmd->add_option("--out", c.out_path, "report output path");
  cmd->add_flag("--no-timing", c.no_timing, "omit wall-clock timings from the report");
}

void write_report(const Cli& c, const ifslab::json& report) {
  if (c.out_path.empty()) return;
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw ifslab::InvalidInput("cannot write " + c.out_path);
  f << report.dump(2) << '\n';
}

int analyze(const Cli& c) {
  if (c.gallery.empty() == c.system_path.empty())
    throw ifslab::InvalidInput("exactly one of --gallery or --system is required");
  const std::vector<std::string> props = split_csv(c.props);
  if (props.empty()) throw ifslab::InvalidInput("--props lists no property");
  for (const auto& p : props) ifslab::check_property_name(p);
  c.opt.res.validate();

  ifslab::IfsSystem ifs;
  ifslab::json source;
  if (!c.gallery.empty()) {
    ifs = ifslab::build_example(c.gallery).system;
    source = {{"gallery", c.gallery}};
  } else {
    std::ifstream f(c.system_path, std::ios::binary);
    if (!f) throw ifslab::InvalidInput("cannot read " + c.system_path);
    std::stringstream buf;
    buf << f.rdbuf();
    ifs = ifslab::parse_system(buf.str());
    source = {{"system", c.system_path}};
  }

  std::vector<ifslab::PropertyResult> results;
  for (const auto& p : props) {
    results.push_back(ifslab::run_property(ifs, p, c.opt));
    const auto& r = results.back();
    std::printf("%-24s %-5s  (%.2fs)\n", p.c_str(), r.holds ? "holds" : "fails", r.seconds);
  }
  write_report(c, ifslab::make_report(source, ifs, c.opt, results, !c.no_timing));
  return 0;
}

int verify(const Cli& c) {
  if (c.gallery.empty()) throw ifslab::InvalidInput("verify needs --gallery");
  c.opt.res.validate();
  const ifslab::GalleryEntry entry = ifslab::build_example(c.gallery);
  const auto outcomes = ifslab::verify_entry(entry, c.opt);
  bool all = true;
  std::vector<ifslab::PropertyResult> results;
  for (const auto& o : outcomes) {
    all = all && o.matches;
    std::printf("%-24s expected %-5s got %-5s %s\n", o.expected.property.c_str(),
                o.expected.holds ? "holds" : "fails", o.result.holds ? "holds" : "fails",
                o.matches ? "ok" : "MISMATCH");
    if (!o.matches) {
      const auto& rep = o.result.report;
      if (rep.contains("verdict")) std::printf("  caveat: %s\n", rep["verdict"]["caveat"].get<std::string>().c_str());
    }
    results.push_back(o.result);
  }
  write_report(c, ifslab::make_report({{"gallery", c.gallery}}, entry.system, c.opt, results,
                                      !c.no_timing));
  std::printf("%s: %s\n", entry.name.c_str(), all ? "manifest confirmed" : "manifest mismatch");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamics of iterated function systems on the circle"};
  app.require_subcommand(1);
  Cli c;
  auto* an = app.add_subcommand("analyze", "run detectors and write a report");
  add_common(an, c);
  an->add_option("--props", c.props, "comma-separated property names")->required();
  auto* ve = app.add_subcommand("verify", "check a gallery entry's expected properties");
  add_common(ve, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (an->parsed()) return analyze(c);
    return verify(c);
  } catch (const ifslab::NonInvertible& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ifslab::NotDifferentiable& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ifslab::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
