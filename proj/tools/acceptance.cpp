// Acceptance suite: one PASS/FAIL line per criterion, metrics indented below.

#include <cstdio>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hardy/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  hardy::AcceptanceConfig cfg;
  std::string modules;
  bool exit_zero = false, quiet = false;
  app.add_option("--radial-nodes", cfg.radial_nodes, "radial grid size")->check(CLI::Range(3, 1 << 20));
  app.add_option("--axi-cells", cfg.axi_cells, "axisymmetric cells per unit length")->check(CLI::Range(8, 4096));
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--modules", modules, "comma-separated subset (params, spectral, mass_threshold, extremals, robin3d)");
  app.add_flag("--exit-zero", exit_zero, "exit 0 whenever the suite ran to completion");
  app.add_flag("--quiet", quiet, "omit the metrics");
  CLI11_PARSE(app, argc, argv);

  std::stringstream ss(modules);
  for (std::string m; std::getline(ss, m, ',');)
    if (!m.empty()) cfg.modules.insert(m);

  int failed = 0, total = 0;
  const auto checks = hardy::run_acceptance(cfg);
  for (const auto& c : checks) {
    ++total;
    failed += !c.passed;
    std::printf("%s  %-34s %6.1fs (budget %.0fs)%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.runtime, c.budget,
                c.note.empty() ? "" : "  ", c.note.c_str());
    if (!quiet)
      for (const auto& [k, v] : c.metrics) std::printf("        %s = %.6g\n", k.c_str(), v);
  }
  std::printf("%d/%d criteria passed\n", total - failed, total);
  return failed && !exit_zero ? 1 : 0;
}
