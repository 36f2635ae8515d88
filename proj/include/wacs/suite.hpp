#pragma once

#include "wacs/zoo.hpp"

namespace wacs {

/// Error raised for an unusable bundle description (bad JSON, missing
/// keys, shape mismatches, malformed expressions).
class SpecError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int samples = 32;
  std::uint64_t seed = 42;
  double base_tol = 1e-8;
  double kappa = 1.0;        // 3-form convention factor
  std::string suite = "all"; // wacs|kenmotsu|star|soliton|theorems|all
};

/// Parses a JSON bundle description: either {"kind": ...} naming a
/// built-in family, or an explicit block listing coordinates and
/// componentwise fields. Expressions use the chart coordinates and
/// numeric literals only. See the README for the schema.
ZooInstance load_spec(const std::string& json_text);
ZooInstance load_spec_file(const std::string& path);

/// Runs check families cumulatively up to the requested level
/// (wacs < kenmotsu < star < soliton < theorems = all), gating each
/// family on its preconditions. A gated family is reported as one
/// skipped "<family>/gated" entry, never silently dropped.
VerificationReport run_suite(const ZooInstance& inst, const RunConfig& cfg);

}  // namespace wacs
