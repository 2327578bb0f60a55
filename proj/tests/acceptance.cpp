// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: acceptance [--only k] [--quick] [--seed s] [--threads n] [--verbose]

#include <CLI11.hpp>
#include <iostream>

#include "chiral/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"chiral acceptance checks"};
  chiral::AcceptanceConfig config;
  int only = 0;
  bool verbose = false;
  app.add_option("--only", only, "Run a single criterion (1-10)")->check(CLI::Range(1, chiral::kCriterionCount));
  app.add_flag("--quick", config.quick, "Skip Monte Carlo criteria");
  app.add_option("--seed", config.seed);
  app.add_option("--threads", config.threads);
  app.add_flag("--verbose", verbose, "Print sub-check details");
  CLI11_PARSE(app, argc, argv);
  if (only > 0) config.only = only;

  bool ok = true;
  chiral::run_acceptance(config, [&](const chiral::CheckResult& r) {
    const std::string status = r.skipped ? "SKIP" : r.passed ? "PASS" : "FAIL";
    std::cout << status << " criterion " << r.criterion << ": " << r.title << '\n';
    if (verbose || !r.passed) {
      for (const auto& d : r.details) std::cout << "    " << d << '\n';
    }
    std::cout.flush();
    ok = ok && (r.passed || r.skipped);
  });
  return ok ? 0 : 1;
}
