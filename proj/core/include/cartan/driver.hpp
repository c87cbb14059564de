#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cartan/cartan_space.hpp"
#include "cartan/kahler_lift.hpp"
#include "cartan/report.hpp"

namespace cartan {

enum class Suite { Base, Kahler, Connection, Curvature, Einstein, Symmetry };

const char* to_string(Suite s);
/// Comma-separated suite names, or "all". Throws ConfigError.
std::vector<Suite> parse_suites(const std::string& csv);
std::vector<Suite> all_suites();

struct RunConfig {
  std::string k_expr;
  std::string preset;  // informational echo
  int n = 2;
  double alpha = 1.0;
  double beta = 1.0;
  double c = 0.0;
  std::optional<double> v;  // set: explicit mode; unset: v = -c alpha beta^2
  ChartBox domain;
  double r_min = 0.5;
  double r_max = 2.0;
  int points = 20;
  std::uint64_t seed = 42;
  std::vector<Suite> suites = all_suites();
  std::string output_path;
  int threads = 1;
  double tol_scale = 1.0;

  LiftParams params() const;
  bool has(Suite s) const;
};

/// Names accepted by preset().
const std::vector<std::string>& preset_names();
/// Config for a named acceptance metric; throws ConfigError for unknown names.
RunConfig preset(const std::string& name);

/// Throws ConfigError on an invalid configuration.
void validate(const RunConfig& cfg);

/// "x1:lo:hi,x2:lo:hi" -> ChartBox for dimension n.
ChartBox parse_domain(const std::string& text, int n);
/// "rmin:rmax"
std::pair<double, double> parse_annulus(const std::string& text);
/// "x1,...,xn;p1,...,pn"
CotangentPoint parse_point(const std::string& text, int n);

/// Deterministic points: x uniform in the box, p = radius * direction with a
/// Gaussian direction and a uniform radius in [r_min, r_max]. Points outside
/// the tube (c > 0, linked) or with alpha + 2 tau v <= 0 are rejected.
/// Throws SamplingExhausted after more than 10^4 consecutive rejections.
std::vector<CotangentPoint> sample_points(const RunConfig& cfg, const Expr& k);

/// Parse, sample and run the selected suites. Results do not depend on the
/// thread count.
LiftReport run(const RunConfig& cfg);

/// 0 when every hard and expected-negative check passes, 1 otherwise.
int exit_code(const LiftReport& r);

/// One line per check plus verdicts.
std::string summary(const LiftReport& r);

/// Base and lifted tensors at one point, with shape and index variance.
nlohmann::ordered_json dump_tensors(const RunConfig& cfg, const CotangentPoint& pt);

/// Multiplier from CARTAN_LAB_TOL_SCALE, 1 when unset. Throws ConfigError
/// on a malformed or non-positive value.
double tol_scale_from_env();

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cartan
