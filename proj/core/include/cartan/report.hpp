#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cartan {

/// How a check's residual is judged.
///  - Hard: theorem-backed, passes iff max residual <= tolerance.
///  - ExpectedNegative: the identity must visibly fail, passes iff max
///    residual > tolerance (the tolerance field holds the margin).
///  - Informational: reported only, always passes.
enum class CheckKind { Hard, ExpectedNegative, Informational };

const char* to_string(CheckKind kind);

struct Check {
  std::string name;
  std::string anchor;
  CheckKind kind = CheckKind::Hard;
  double tolerance = 0.0;
  double max_abs_residual = 0.0;
  std::size_t n_points = 0;
  bool pass = true;

  Check() = default;
  Check(std::string name_, std::string anchor_, double tol, CheckKind kind_ = CheckKind::Hard)
      : name(std::move(name_)), anchor(std::move(anchor_)), kind(kind_), tolerance(tol) {}

  /// Widens the max residual; a check that has absorbed anything counts one point.
  void absorb(double residual);
  void merge(const Check& other);
  void finalize();
};

using Section = std::vector<Check>;

const Check* find_check(const Section& section, const std::string& name);
Check* find_check(Section& section, const std::string& name);

/// Merge same-named checks in first-seen order (max residual, summed points).
/// The result is not finalised.
Section merge_sections(std::span<const Section> parts);

struct Verdicts {
  std::optional<bool> almost_kahler;
  std::optional<bool> integrable;
  std::optional<bool> einstein_consistent;
  std::optional<bool> locally_symmetric_consistent;
  std::optional<bool> riemannian_detected;
};

struct LiftReport {
  nlohmann::ordered_json meta;
  Section checks;
  Verdicts verdicts;

  bool all_hard_pass() const;
  /// First failing check (hard or expected-negative), if any.
  const Check* first_failure() const;
};

nlohmann::ordered_json to_json(const Check& c);
nlohmann::ordered_json to_json(const LiftReport& r);

}  // namespace cartan
