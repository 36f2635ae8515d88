#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wacs {

/// Outcome of one identity check. `max_residual` is normalized by
/// max(1, largest component magnitude seen), `pass` means residual <=
/// tolerance, and `skipped` marks checks whose preconditions failed
/// (a skipped check is not a failure).
struct CheckResult {
  std::string name;     // family/slug, e.g. "wacs/f_squared"
  std::string formula;  // the identity under test, ASCII
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool skipped = false;
  std::string note;
};

CheckResult make_check(std::string name, std::string formula, double residual,
                       double tolerance, std::string note = {});
CheckResult make_skip(std::string name, std::string formula, std::string reason);

struct VerificationReport {
  std::string bundle_id;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  double runtime_seconds = 0.0;  // shown in the text rendering only

  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void add(std::vector<CheckResult> cs);
  const CheckResult* find(std::string_view name) const;

  /// True when every non-skipped check passed.
  bool overall_pass() const;
  /// True when every non-skipped check under "prefix/" passed and at
  /// least one such check ran.
  bool family_passed(std::string_view prefix) const;
};

/// Fixed-width table, one row per check, with a runtime footer.
std::string render_text(const VerificationReport& r);

/// Canonical JSON: sorted keys, no runtime field, byte-stable for
/// identical inputs.
std::string render_json(const VerificationReport& r);

}  // namespace wacs
