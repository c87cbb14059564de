#include "cartan/report.hpp"

#include <algorithm>
#include <cmath>

namespace cartan {

const char* to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::Hard: return "hard";
    case CheckKind::ExpectedNegative: return "expected_negative";
    case CheckKind::Informational: return "informational";
  }
  return "hard";
}

void Check::absorb(double residual) {
  // NaN must never read as a pass.
  if (std::isnan(residual)) residual = INFINITY;
  max_abs_residual = std::max(max_abs_residual, std::abs(residual));
  if (n_points == 0) n_points = 1;
}

void Check::merge(const Check& other) {
  max_abs_residual = std::max(max_abs_residual, other.max_abs_residual);
  n_points += other.n_points;
}

void Check::finalize() {
  switch (kind) {
    case CheckKind::Hard: pass = max_abs_residual <= tolerance; break;
    case CheckKind::ExpectedNegative: pass = max_abs_residual > tolerance; break;
    case CheckKind::Informational: pass = true; break;
  }
}

const Check* find_check(const Section& section, const std::string& name) {
  auto it = std::find_if(section.begin(), section.end(),
                         [&](const Check& c) { return c.name == name; });
  return it == section.end() ? nullptr : &*it;
}

Check* find_check(Section& section, const std::string& name) {
  auto it = std::find_if(section.begin(), section.end(),
                         [&](const Check& c) { return c.name == name; });
  return it == section.end() ? nullptr : &*it;
}

Section merge_sections(std::span<const Section> parts) {
  Section out;
  for (const auto& part : parts) {
    for (const auto& c : part) {
      if (Check* existing = find_check(out, c.name)) {
        existing->merge(c);
      } else {
        out.push_back(c);
      }
    }
  }
  return out;
}

bool LiftReport::all_hard_pass() const { return first_failure() == nullptr; }

const Check* LiftReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.pass) return &c;
  }
  return nullptr;
}

nlohmann::ordered_json to_json(const Check& c) {
  return {
      {"name", c.name},
      {"paper_anchor", c.anchor},
      {"kind", to_string(c.kind)},
      {"max_abs_residual", c.max_abs_residual},
      {"tolerance", c.tolerance},
      {"pass", c.pass},
      {"n_points", c.n_points},
  };
}

namespace {

nlohmann::ordered_json opt(const std::optional<bool>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

nlohmann::ordered_json to_json(const LiftReport& r) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return {
      {"schema", "cartan-lab/1"},
      {"meta", r.meta},
      {"checks", checks},
      {"verdicts",
       {
           {"almost_kahler", opt(r.verdicts.almost_kahler)},
           {"integrable", opt(r.verdicts.integrable)},
           {"einstein_consistent", opt(r.verdicts.einstein_consistent)},
           {"locally_symmetric_consistent", opt(r.verdicts.locally_symmetric_consistent)},
           {"riemannian_detected", opt(r.verdicts.riemannian_detected)},
       }},
      {"all_hard_pass", r.all_hard_pass()},
  };
}

}  // namespace cartan
