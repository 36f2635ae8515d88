#include "wacs/report.hpp"

#include <cstdio>

#include "json.hpp"

namespace wacs {

CheckResult make_check(std::string name, std::string formula, double residual,
                       double tolerance, std::string note) {
  CheckResult c;
  c.name = std::move(name);
  c.formula = std::move(formula);
  c.max_residual = residual;
  c.tolerance = tolerance;
  c.pass = residual <= tolerance;
  c.note = std::move(note);
  return c;
}

CheckResult make_skip(std::string name, std::string formula, std::string reason) {
  CheckResult c;
  c.name = std::move(name);
  c.formula = std::move(formula);
  c.skipped = true;
  c.note = std::move(reason);
  return c;
}

void VerificationReport::add(std::vector<CheckResult> cs) {
  for (auto& c : cs) checks.push_back(std::move(c));
}

const CheckResult* VerificationReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool VerificationReport::overall_pass() const {
  for (const auto& c : checks)
    if (!c.skipped && !c.pass) return false;
  return true;
}

bool VerificationReport::family_passed(std::string_view prefix) const {
  bool any = false;
  for (const auto& c : checks) {
    if (c.name.size() <= prefix.size() ||
        c.name.compare(0, prefix.size(), prefix) != 0 ||
        c.name[prefix.size()] != '/')
      continue;
    if (c.skipped) continue;
    if (!c.pass) return false;
    any = true;
  }
  return any;
}

std::string render_text(const VerificationReport& r) {
  std::string out;
  char line[512];
  std::snprintf(line, sizeof line, "bundle: %s   samples: %d   seed: %llu\n",
                r.bundle_id.c_str(), r.samples,
                static_cast<unsigned long long>(r.seed));
  out += line;
  std::snprintf(line, sizeof line, "%-6s %-34s %-12s %-10s %s\n", "status",
                "check", "residual", "tolerance", "identity");
  out += line;
  out += std::string(100, '-') + "\n";
  for (const auto& c : r.checks) {
    if (c.skipped) {
      std::snprintf(line, sizeof line, "%-6s %-34s %-12s %-10s %s\n", "SKIP",
                    c.name.c_str(), "-", "-",
                    c.note.empty() ? c.formula.c_str() : c.note.c_str());
    } else {
      std::snprintf(line, sizeof line, "%-6s %-34s %-12.3e %-10.1e %s\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.max_residual,
                    c.tolerance, c.formula.c_str());
    }
    out += line;
  }
  out += std::string(100, '-') + "\n";
  std::snprintf(line, sizeof line, "overall: %s   (%.3f s)\n",
                r.overall_pass() ? "PASS" : "FAIL", r.runtime_seconds);
  out += line;
  return out;
}

std::string render_json(const VerificationReport& r) {
  nlohmann::json j;
  j["bundle"] = r.bundle_id;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["overall_pass"] = r.overall_pass();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["formula"] = c.formula;
    jc["max_residual"] = c.max_residual;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    jc["skipped"] = c.skipped;
    jc["note"] = c.note;
    arr.push_back(std::move(jc));
  }
  j["checks"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace wacs
