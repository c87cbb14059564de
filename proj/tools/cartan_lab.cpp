// cartan_lab: sample a Cartan space, run the lift checks, write a JSON report.
//
// exit 0: every hard check passed
// exit 1: a hard (or expected-negative) check failed
// exit 2: bad flags, expression or configuration

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cartan/driver.hpp"
#include "cartan/errors.hpp"

namespace {

int fail_config(const std::string& what) {
  std::fprintf(stderr, "cartan_lab: %s\n", what.c_str());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for the lift of a Cartan space to its cotangent bundle"};

  std::optional<std::string> k_expr, preset_name, domain, annulus, dump_at, report_path;
  std::optional<int> n, points;
  std::optional<double> alpha, beta, c, v;
  std::optional<std::uint64_t> seed;
  std::string suites = "all";
  int threads = 1;

  auto* expr_opt = app.add_option("--k-expr", k_expr, "fundamental function K(x, p)");
  auto* preset_opt = app.add_option("--preset", preset_name, "named metric")
                         ->check(CLI::IsMember(cartan::preset_names()));
  expr_opt->excludes(preset_opt);
  app.add_option("--n", n, "dimension of the base")->check(CLI::PositiveNumber);
  app.add_option("--alpha", alpha, "alpha > 0");
  app.add_option("--beta", beta, "beta > 0");
  app.add_option("--c", c, "target constant curvature");
  app.add_option("--v", v, "explicit constant v (default: v = -c alpha beta^2)");
  app.add_option("--points", points, "number of sample points");
  app.add_option("--seed", seed, "sampling seed");
  app.add_option("--domain", domain, "chart box, e.g. \"x1:-1:1,x2:0.5:2\"");
  app.add_option("--p-annulus", annulus, "momentum radii \"rmin:rmax\"");
  app.add_option("--suites", suites, "base,kahler,connection,curvature,einstein,symmetry or all");
  app.add_option("--report", report_path, "JSON report path");
  app.add_option("--dump-at", dump_at, "dump tensors at \"x1,..,xn;p1,..,pn\" instead of running");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!k_expr && !preset_name) return fail_config("one of --k-expr or --preset is required");

    cartan::RunConfig cfg;
    if (preset_name) {
      cfg = cartan::preset(*preset_name);
    } else {
      cfg.k_expr = *k_expr;
      cfg.n = n.value_or(2);
      cfg.domain.bounds.assign(static_cast<std::size_t>(cfg.n), {-1.0, 1.0});
    }
    if (n && *n != cfg.n) {
      if (preset_name) return fail_config("--n conflicts with the preset dimension");
    }
    if (alpha) cfg.alpha = *alpha;
    if (beta) cfg.beta = *beta;
    if (c) cfg.c = *c;
    if (v) cfg.v = *v;
    if (points) cfg.points = *points;
    if (seed) cfg.seed = *seed;
    if (domain) cfg.domain = cartan::parse_domain(*domain, cfg.n);
    if (annulus) std::tie(cfg.r_min, cfg.r_max) = cartan::parse_annulus(*annulus);
    cfg.suites = cartan::parse_suites(suites);
    cfg.threads = threads;
    cfg.tol_scale = cartan::tol_scale_from_env();
    if (report_path) cfg.output_path = *report_path;
    cartan::validate(cfg);

    if (dump_at) {
      const auto doc = cartan::dump_tensors(cfg, cartan::parse_point(*dump_at, cfg.n));
      const std::string text = doc.dump(2) + "\n";
      if (report_path) {
        std::ofstream(*report_path) << text;
      } else {
        std::cout << text;
      }
      return 0;
    }

    const auto report = cartan::run(cfg);
    if (report_path) {
      std::ofstream out(*report_path);
      if (!out) return fail_config("cannot write " + *report_path);
      out << cartan::to_json(report).dump(2) << "\n";
    }
    std::cout << cartan::summary(report);
    const int rc = cartan::exit_code(report);
    if (rc != 0) {
      std::fprintf(stderr, "cartan_lab: hard check failed: %s\n", report.first_failure()->name.c_str());
    }
    return rc;
  } catch (const cartan::Error& e) {
    return fail_config(std::string(cartan::to_string(e.kind())) + ": " + e.what());
  }
}
