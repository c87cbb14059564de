#include "cartan/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <random>
#include <sstream>
#include <thread>

#include "cartan/curvature_lab.hpp"
#include "cartan/errors.hpp"

namespace cartan {

namespace {

constexpr long kMaxRejections = 10000;
constexpr double kHomogeneityTol = 1e-10;

double parse_real(const std::string& s, const char* what) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size() || !std::isfinite(v)) {
    throw ConfigError(std::string("malformed ") + what + ": '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

// splitmix64 finaliser, used to give every sample index its own stream
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double gaussian(std::mt19937_64& rng) {
  // Box-Muller on the portable uniform so sequences match across standard libraries
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const char* to_string(Suite s) {
  switch (s) {
    case Suite::Base: return "base";
    case Suite::Kahler: return "kahler";
    case Suite::Connection: return "connection";
    case Suite::Curvature: return "curvature";
    case Suite::Einstein: return "einstein";
    case Suite::Symmetry: return "symmetry";
  }
  return "base";
}

std::vector<Suite> all_suites() {
  return {Suite::Base,      Suite::Kahler,   Suite::Connection,
          Suite::Curvature, Suite::Einstein, Suite::Symmetry};
}

std::vector<Suite> parse_suites(const std::string& csv) {
  if (trim(csv) == "all") return all_suites();
  std::vector<Suite> out;
  for (const auto& raw : split(csv, ',')) {
    const auto name = trim(raw);
    bool found = false;
    for (Suite s : all_suites()) {
      if (name == to_string(s)) {
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
        found = true;
      }
    }
    if (!found) throw ConfigError("unknown suite '" + name + "'");
  }
  if (out.empty()) throw ConfigError("no suites selected");
  std::sort(out.begin(), out.end());
  return out;
}

LiftParams RunConfig::params() const {
  return v ? LiftParams::make_explicit(alpha, beta, *v, c) : LiftParams::make_linked(alpha, beta, c);
}

bool RunConfig::has(Suite s) const { return std::find(suites.begin(), suites.end(), s) != suites.end(); }

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"euclidean", "hyperbolic-half-plane", "sphere-patch",
                                              "randers"};
  return names;
}

RunConfig preset(const std::string& name) {
  RunConfig cfg;
  cfg.preset = name;
  cfg.n = 2;
  if (name == "euclidean") {
    cfg.k_expr = "sqrt(p1^2+p2^2)";
    cfg.c = 0.0;
    cfg.domain.bounds = {{-1.0, 1.0}, {-1.0, 1.0}};
    cfg.r_min = 0.5;
    cfg.r_max = 2.0;
  } else if (name == "hyperbolic-half-plane") {
    cfg.k_expr = "sqrt(x2^2*(p1^2+p2^2))";
    cfg.c = -1.0;
    cfg.domain.bounds = {{-1.0, 1.0}, {0.5, 2.0}};
    cfg.r_min = 0.5;
    cfg.r_max = 2.0;
  } else if (name == "sphere-patch") {
    // |sin x1| >= 0.71 on this box keeps clear of the coordinate singularity
    cfg.k_expr = "sqrt(p1^2+p2^2/sin(x1)^2)";
    cfg.c = 1.0;
    cfg.domain.bounds = {{0.8, 2.3}, {-1.0, 1.0}};
    cfg.r_min = 0.1;
    cfg.r_max = 0.6;
  } else if (name == "randers") {
    cfg.k_expr = "sqrt(p1^2+p2^2)+0.3*p1";
    cfg.c = 0.0;
    cfg.domain.bounds = {{-1.0, 1.0}, {-1.0, 1.0}};
    cfg.r_min = 0.5;
    cfg.r_max = 2.0;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (cfg.k_expr.empty()) throw ConfigError("no expression given");
  if (cfg.n < 2) throw ConfigError("n must be at least 2");
  if (!(cfg.alpha > 0.0) || !(cfg.beta > 0.0)) throw ConfigError("alpha and beta must be positive");
  if (!std::isfinite(cfg.c) || (cfg.v && !std::isfinite(*cfg.v))) throw ConfigError("c and v must be finite");
  if (!(cfg.r_min > 0.0)) throw ConfigError("annulus r_min must be positive");
  if (!(cfg.r_max >= cfg.r_min) || !std::isfinite(cfg.r_max)) {
    throw ConfigError("annulus r_max must be finite and >= r_min");
  }
  if (cfg.points < 1) throw ConfigError("points must be at least 1");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  if (!(cfg.tol_scale > 0.0)) throw ConfigError("tolerance scale must be positive");
  if (static_cast<int>(cfg.domain.bounds.size()) != cfg.n) {
    throw ConfigError("domain has " + std::to_string(cfg.domain.bounds.size()) +
                      " coordinates, expected " + std::to_string(cfg.n));
  }
  for (const auto& [lo, hi] : cfg.domain.bounds) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) throw ConfigError("bad domain interval");
  }
  if (cfg.suites.empty()) throw ConfigError("no suites selected");
  CurvatureSuites cs{cfg.has(Suite::Connection), cfg.has(Suite::Curvature), cfg.has(Suite::Einstein),
                     cfg.has(Suite::Symmetry)};
  if (cs.jet_order() > JetLayout::kMaxOrder) throw ConfigError("derivative budget exceeds jet order");
}

ChartBox parse_domain(const std::string& text, int n) {
  ChartBox box;
  box.bounds.assign(static_cast<std::size_t>(n), {NAN, NAN});
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const auto& item : split(text, ',')) {
    const auto parts = split(trim(item), ':');
    if (parts.size() != 3) throw ConfigError("domain entry '" + item + "' is not name:lo:hi");
    const auto name = trim(parts[0]);
    if (name.size() < 2 || name[0] != 'x') throw ConfigError("domain entry must name x1..xn");
    int idx = 0;
    try {
      idx = std::stoi(name.substr(1));
    } catch (const std::exception&) {
      throw ConfigError("bad coordinate name '" + name + "'");
    }
    if (idx < 1 || idx > n) throw ConfigError("coordinate '" + name + "' out of range");
    box.bounds[idx - 1] = {parse_real(trim(parts[1]), "domain bound"),
                           parse_real(trim(parts[2]), "domain bound")};
    seen[idx - 1] = true;
  }
  for (int i = 0; i < n; ++i) {
    if (!seen[i]) throw ConfigError("domain misses x" + std::to_string(i + 1));
  }
  return box;
}

std::pair<double, double> parse_annulus(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ConfigError("annulus must be rmin:rmax");
  return {parse_real(trim(parts[0]), "annulus"), parse_real(trim(parts[1]), "annulus")};
}

CotangentPoint parse_point(const std::string& text, int n) {
  const auto halves = split(text, ';');
  if (halves.size() != 2) throw ConfigError("point must be 'x1,...,xn;p1,...,pn'");
  CotangentPoint pt;
  for (const auto& s : split(halves[0], ',')) pt.x.push_back(parse_real(trim(s), "coordinate"));
  for (const auto& s : split(halves[1], ',')) pt.p.push_back(parse_real(trim(s), "momentum"));
  if (static_cast<int>(pt.x.size()) != n || static_cast<int>(pt.p.size()) != n) {
    throw ConfigError("point needs " + std::to_string(n) + " coordinates and momenta");
  }
  return pt;
}

namespace {

// Why a candidate point is unusable, or nullptr.
const char* rejection(const RunConfig& cfg, const LiftParams& params, const Expr& k2,
                      const CotangentPoint& pt) {
  double r = 0.0;
  for (double v : pt.p) r += v * v;
  r = std::sqrt(r);
  if (r < cfg.r_min || r > cfg.r_max) return "outside the momentum annulus";
  if (!cfg.domain.contains(pt.x)) return "outside the chart domain";
  const double K2 = eval(k2, pt.x, pt.p);
  if (params.c > 0.0 && !tube_predicate(K2, params)) return "outside the tube K^2 < 1/(c beta^2)";
  if (!(params.positivity(0.5 * K2) > 0.0)) return "alpha + 2 tau v <= 0";
  return nullptr;
}

}  // namespace

std::vector<CotangentPoint> sample_points(const RunConfig& cfg, const Expr& k) {
  validate(cfg);
  const auto params = cfg.params();
  const Expr k2 = square(k);
  const int n = cfg.n;
  std::mt19937_64 rng(cfg.seed);
  std::vector<CotangentPoint> out;
  out.reserve(static_cast<std::size_t>(cfg.points));
  long rejected = 0;
  while (static_cast<int>(out.size()) < cfg.points) {
    CotangentPoint pt;
    for (int i = 0; i < n; ++i) {
      const auto [lo, hi] = cfg.domain.bounds[i];
      pt.x.push_back(lo + (hi - lo) * uniform01(rng));
    }
    double norm = 0.0;
    std::vector<double> dir(static_cast<std::size_t>(n));
    do {
      norm = 0.0;
      for (auto& d : dir) {
        d = gaussian(rng);
        norm += d * d;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    const double radius = cfg.r_min + (cfg.r_max - cfg.r_min) * uniform01(rng);
    for (double d : dir) pt.p.push_back(radius * d / norm);

    if (rejection(cfg, params, k2, pt)) {
      if (++rejected > kMaxRejections) throw SamplingExhausted(rejected);
      continue;
    }
    rejected = 0;
    out.push_back(std::move(pt));
  }
  return out;
}

namespace {

struct PointResult {
  Section base;
  Section kahler;
  Section curvature;
  double cartan = 0.0;
};

template <class F>
void parallel_for(std::size_t count, int threads, F&& body) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int extra = std::min<int>(threads, static_cast<int>(count)) - 1;
  std::vector<std::thread> pool;
  for (int t = 0; t < extra; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  // lowest failing index wins, independent of scheduling
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

nlohmann::ordered_json config_echo(const RunConfig& cfg, const LiftParams& params) {
  nlohmann::ordered_json suites = nlohmann::ordered_json::array();
  for (Suite s : cfg.suites) suites.push_back(to_string(s));
  nlohmann::ordered_json domain = nlohmann::ordered_json::array();
  for (const auto& [lo, hi] : cfg.domain.bounds) domain.push_back({lo, hi});
  return {
      {"k_expr", cfg.k_expr},
      {"preset", cfg.preset.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(cfg.preset)},
      {"n", cfg.n},
      {"alpha", params.alpha},
      {"beta", params.beta},
      {"c", params.c},
      {"v", params.v},
      {"v_mode", params.linked ? "linked" : "explicit"},
      {"domain", domain},
      {"p_annulus", {cfg.r_min, cfg.r_max}},
      {"points", cfg.points},
      {"seed", cfg.seed},
      {"suites", suites},
      {"tol_scale", cfg.tol_scale},
  };
}

double residual_of(const Section& s, const char* name) {
  const Check* c = find_check(s, name);
  return c ? c->max_abs_residual : INFINITY;
}

}  // namespace

LiftReport run(const RunConfig& cfg) {
  validate(cfg);
  const Expr k = parse(cfg.k_expr, cfg.n);
  const auto params = cfg.params();
  const auto samples = sample_points(cfg, k);
  const double scale = cfg.tol_scale;

  const auto hom = check_homogeneity(k, 1, samples, kHomogeneityTol * scale, cfg.seed);
  Check homogeneity("expr.homogeneity", "K(x, l p) = l K(x, p)", hom.tolerance);
  homogeneity.max_abs_residual = hom.max_residual;
  homogeneity.n_points = hom.samples;
  homogeneity.finalize();

  LiftReport report;
  report.meta = {
      {"config", config_echo(cfg, params)},
      {"version", kVersion},
      {"timestamp", utc_timestamp()},
      {"n_samples", samples.size()},
  };
  report.checks.push_back(homogeneity);
  // Not a Cartan function: the tensors downstream are meaningless.
  if (!homogeneity.pass) return report;

  const CurvatureSuites cs{cfg.has(Suite::Connection), cfg.has(Suite::Curvature),
                           cfg.has(Suite::Einstein), cfg.has(Suite::Symmetry)};
  std::vector<PointResult> results(samples.size());
  parallel_for(samples.size(), cfg.threads, [&](std::size_t i) {
    const auto& pt = samples[i];
    auto& r = results[i];
    if (cfg.has(Suite::Base)) {
      r.base = verify_base_identities(k, std::span<const CotangentPoint>(&pt, 1), scale);
    }
    if (cfg.has(Suite::Kahler)) r.kahler = kahler_point_checks(k, pt, params, mix(cfg.seed + i), scale);
    if (cs.any()) r.curvature = curvature_point_checks(k, pt, params, cs, scale);
    r.cartan = max_cartan(build_context(k, pt));
  });

  auto collect = [&](Section PointResult::*member) {
    std::vector<Section> parts;
    parts.reserve(results.size());
    for (const auto& r : results) parts.push_back(r.*member);
    return parts;
  };
  if (cfg.has(Suite::Base)) {
    Section base = merge_sections(collect(&PointResult::base));
    for (auto& c : base) c.finalize();
    report.checks.insert(report.checks.end(), base.begin(), base.end());
  }
  Section kahler;
  if (cfg.has(Suite::Kahler)) {
    kahler = finalize_kahler(collect(&PointResult::kahler), scale);
    report.checks.insert(report.checks.end(), kahler.begin(), kahler.end());
  }
  Section curv;
  if (cs.any()) {
    curv = finalize_curvature(collect(&PointResult::curvature), params, scale);
    report.checks.insert(report.checks.end(), curv.begin(), curv.end());
  } else {
    Check cartan("geometry.cartan_max", "C^ijk = 0 iff Riemannian", 0.0, CheckKind::Informational);
    for (const auto& r : results) cartan.absorb(r.cartan);
    cartan.finalize();
    report.checks.push_back(cartan);
  }

  const Section& all = report.checks;
  if (cfg.has(Suite::Kahler)) {
    bool ok = true;
    for (const char* name :
         {"kahler.hermitian", "kahler.J_squared", "kahler.symplectic_pairing", "kahler.form_antisymmetry"}) {
      const Check* c = find_check(all, name);
      ok = ok && c && c->max_abs_residual <= c->tolerance;
    }
    report.verdicts.almost_kahler = ok;
    report.verdicts.integrable = residual_of(all, "kahler.nijenhuis") <= 1e-7 * scale;
  }
  if (cfg.has(Suite::Einstein)) {
    report.verdicts.einstein_consistent = residual_of(all, "einstein.residual") <= 1e-6 * scale;
  }
  if (cfg.has(Suite::Symmetry)) {
    report.verdicts.locally_symmetric_consistent =
        residual_of(all, "symmetry.nabla_curvature") <= 1e-5 * scale;
  }
  report.verdicts.riemannian_detected = residual_of(all, "geometry.cartan_max") <= kRiemannianCartanBound;
  return report;
}

int exit_code(const LiftReport& r) { return r.all_hard_pass() ? 0 : 1; }

std::string summary(const LiftReport& r) {
  std::string out;
  char line[256];
  for (const auto& c : r.checks) {
    const char* status = c.kind == CheckKind::Informational ? "info" : (c.pass ? "PASS" : "FAIL");
    const char* rel = c.kind == CheckKind::ExpectedNegative ? ">" : "<=";
    if (c.kind == CheckKind::Informational) {
      std::snprintf(line, sizeof line, "%-4s  %-40s %.3e\n", status, c.name.c_str(), c.max_abs_residual);
    } else {
      std::snprintf(line, sizeof line, "%-4s  %-40s %.3e %s %.1e\n", status, c.name.c_str(),
                    c.max_abs_residual, rel, c.tolerance);
    }
    out += line;
  }
  auto verdict = [](const std::optional<bool>& v) { return v ? (*v ? "true" : "false") : "n/a"; };
  std::snprintf(line, sizeof line,
                "verdicts: almost_kahler=%s integrable=%s einstein_consistent=%s "
                "locally_symmetric_consistent=%s riemannian_detected=%s\n",
                verdict(r.verdicts.almost_kahler), verdict(r.verdicts.integrable),
                verdict(r.verdicts.einstein_consistent),
                verdict(r.verdicts.locally_symmetric_consistent),
                verdict(r.verdicts.riemannian_detected));
  out += line;
  if (const Check* f = r.first_failure()) {
    out += "failed: " + f->name + "\n";
  } else {
    out += "all checks passed\n";
  }
  return out;
}

namespace {

nlohmann::ordered_json nest(const RealTensor& t, std::size_t& pos, int depth) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (int i = 0; i < t.dim(); ++i) {
    if (depth + 1 == t.rank()) {
      arr.push_back(t.flat(pos++) + 0.0);  // no negative zeros in dumps
    } else {
      arr.push_back(nest(t, pos, depth + 1));
    }
  }
  return arr;
}

nlohmann::ordered_json tensor_json(const RealTensor& t, std::vector<std::string> variance) {
  std::size_t pos = 0;
  nlohmann::ordered_json shape = nlohmann::ordered_json::array();
  for (int i = 0; i < t.rank(); ++i) shape.push_back(t.dim());
  return {{"shape", shape},
          {"variance", variance},
          {"data", t.rank() == 0 ? nlohmann::ordered_json(t.flat(0)) : nest(t, pos, 0)}};
}

}  // namespace

nlohmann::ordered_json dump_tensors(const RunConfig& cfg, const CotangentPoint& pt) {
  validate(cfg);
  const Expr k = parse(cfg.k_expr, cfg.n);
  const auto params = cfg.params();
  if (pt.dim() != cfg.n || static_cast<int>(pt.p.size()) != cfg.n) {
    throw ConfigError("point dimension does not match n");
  }
  if (const char* why = rejection(cfg, params, square(k), pt)) {
    throw ConfigError(std::string("dump point is ") + why);
  }

  const LiftGeometry geo(k, pt, params, 5);
  const auto ctx = to_context(geo.frame().base());
  const auto G = lifted_metric(ctx, params);
  const int n = ctx.n;

  RealTensor J(2 * n, 2);  // J(F, A): E_F component of J E_A
  for (int a = 0; a < 2 * n; ++a) {
    auto e = a < n ? FrameVector::horizontal(n, a) : FrameVector::vertical(n, a - n);
    const auto je = apply_J(G, e);
    for (int f = 0; f < n; ++f) {
      J(f, a) = je.h[f];
      J(n + f, a) = je.v[f];
    }
  }
  const CurvatureBlocks curv{n, values(geo.curvature())};
  const auto ric = ricci(curv, G);

  return {
      {"schema", "cartan-lab/1"},
      {"point", {{"x", pt.x}, {"p", pt.p}}},
      {"K2", ctx.K2},
      {"tensors",
       {
           {"gU", tensor_json(ctx.g_upper, {"up", "up"})},
           {"gL", tensor_json(ctx.g_lower, {"down", "down"})},
           {"C3", tensor_json(ctx.cartan, {"up", "up", "up"})},
           {"N", tensor_json(ctx.N, {"down", "down"})},
           {"H", tensor_json(ctx.H, {"up", "down", "down"})},
           {"P", tensor_json(ctx.P, {"up", "down", "down"})},
           {"R", tensor_json(ctx.R, {"down", "down", "down"})},
           {"GL", tensor_json(G.lower, {"down", "down"})},
           {"GU", tensor_json(G.upper, {"up", "up"})},
           {"J", tensor_json(J, {"frame-up", "frame-down"})},
           {"Ricci", tensor_json(ric, {"frame-down", "frame-down"})},
       }},
  };
}

double tol_scale_from_env() {
  const char* env = std::getenv("CARTAN_LAB_TOL_SCALE");
  if (!env || !*env) return 1.0;
  const double v = parse_real(env, "CARTAN_LAB_TOL_SCALE");
  if (!(v > 0.0)) throw ConfigError("CARTAN_LAB_TOL_SCALE must be positive");
  return v;
}

}  // namespace cartan
