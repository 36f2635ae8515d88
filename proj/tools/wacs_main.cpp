#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wacs/suite.hpp"

int main(int argc, char** argv) {
  CLI::App app{"chart-based verification of weak almost contact metric "
               "structures and their solitons"};
  std::string spec_path, suite = "all", format = "text", out_path;
  int points = 32;
  std::uint64_t seed = 42;
  double tol = 1e-8;

  app.add_option("spec", spec_path, "bundle description (JSON file)")
      ->required();
  app.add_option("--suite", suite,
                 "deepest check family to run (families are cumulative)")
      ->check(CLI::IsMember(
          {"all", "wacs", "kenmotsu", "star", "soliton", "theorems"}))
      ->capture_default_str();
  app.add_option("--points", points, "number of sample points")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", seed, "sampler seed")->capture_default_str();
  app.add_option("--tol", tol, "base tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--report", format, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "write the report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    wacs::ZooInstance inst = wacs::load_spec_file(spec_path);
    wacs::RunConfig cfg;
    cfg.samples = points;
    cfg.seed = seed;
    cfg.base_tol = tol;
    cfg.suite = suite;
    wacs::VerificationReport rep = wacs::run_suite(inst, cfg);
    const std::string rendered =
        format == "json" ? wacs::render_json(rep) : wacs::render_text(rep);
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 2;
      }
      out << rendered;
    } else {
      std::cout << rendered;
    }
    return rep.overall_pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
