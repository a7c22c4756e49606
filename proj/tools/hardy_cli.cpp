// Command-line driver: one subcommand per task, optional sweeps, CSV/JSON output.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hardy/config.hpp"
#include "hardy/report.hpp"

namespace {

struct Flags {
  std::string config, out, sweep, modules;
  int workers = 0, grid_size = 0, n = 0;
  double tol = 0.0, gamma = 0.0, s = 0.0, lambda = 0.0, radius = 0.0, pole = 0.0;
};

std::string columns_help(hardy::Task t) {
  std::string cols;
  for (const auto& c : hardy::input_columns(t)) cols += c + ",";
  for (const auto& c : hardy::task_columns(t).outputs) cols += c + ",";
  cols += "status";
  return std::string("CSV columns: ") + cols + "\n  " + hardy::task_columns(t).doc +
         "\n  lambda sweeps append mass_increasing,mass_sign_changes (mass) or mu_nonincreasing (ground-state, pohozaev)";
}

void add_common(CLI::App* sc, Flags& f) {
  sc->add_option("--config", f.config, "key = value config file");
  sc->add_option("--out", f.out, "output directory (default $HARDY_OUT_DIR; stdout only if neither is set)");
  sc->add_option("--workers", f.workers, "sweep worker threads")->check(CLI::PositiveNumber);
  sc->add_option("--grid-size", f.grid_size,
                 "radial nodes; axisymmetric cells per unit length for robin and the n = 3 merely singular threshold")
      ->check(CLI::PositiveNumber);
  sc->add_option("--tol", f.tol, "ground-state residual tolerance")->check(CLI::PositiveNumber);
  sc->add_option("--n", f.n, "dimension");
  sc->add_option("--gamma", f.gamma, "Hardy coefficient");
  sc->add_option("--s", f.s, "singular weight exponent");
  sc->add_option("--lambda", f.lambda, "linear coefficient");
  sc->add_option("--radius", f.radius, "ball radius");
  sc->add_option("--pole", f.pole, "Robin pole radius");
  sc->add_option("--sweep", f.sweep, "param:lo:hi:count with param in gamma, s, lambda, radius, pole");
  sc->add_option("--modules", f.modules, "report only: comma-separated module subset");
}

hardy::RunConfig build(const CLI::App* sc, const Flags& f, std::optional<hardy::Task> task, bool threshold) {
  hardy::RunConfig cfg = f.config.empty() ? hardy::RunConfig{} : hardy::load_config(f.config);
  if (task) cfg.task = *task;
  if (sc->count("--n")) cfg.params.n = f.n;
  if (sc->count("--gamma")) cfg.params.gamma = f.gamma;
  if (sc->count("--s")) cfg.params.s = f.s;
  if (sc->count("--lambda")) cfg.params.lam = f.lambda;
  if (sc->count("--radius")) cfg.params.ball_radius = f.radius;
  if (sc->count("--pole")) cfg.pole = f.pole;
  if (sc->count("--workers")) cfg.numerics.workers = f.workers;
  if (sc->count("--tol")) cfg.numerics.tol = f.tol;
  if (sc->count("--sweep")) cfg.sweep = hardy::parse_sweep(f.sweep);
  if (sc->count("--modules")) {
    cfg.modules.clear();
    std::stringstream ss(f.modules);
    for (std::string m; std::getline(ss, m, ',');)
      if (!m.empty()) cfg.modules.insert(m);
  }
  if (threshold) {
    const bool merely = cfg.params.s == 0.0 && cfg.params.gamma <= 0.0;
    cfg.task = merely ? hardy::Task::ThresholdMerely : hardy::Task::ThresholdTruly;
  }
  if (sc->count("--grid-size")) {
    const bool axi = cfg.task == hardy::Task::Robin || (cfg.task == hardy::Task::ThresholdMerely && cfg.params.n == 3);
    (axi ? cfg.numerics.axi_cells : cfg.numerics.radial_nodes) = f.grid_size;
  }
  return cfg;
}

int run(const hardy::RunConfig& cfg, const std::string& out) {
  const hardy::RunResult res = hardy::run_config(cfg, out);
  if (cfg.task == hardy::Task::FullReport) {
    hardy::print_checks(std::cout, res.checks);
    int passed = 0;
    for (const auto& c : res.checks) passed += c.passed;
    std::cout << passed << "/" << res.checks.size() << " checks passed\n";
  } else {
    hardy::write_csv(std::cout, res);
  }
  for (const auto& f : res.files) std::cerr << "wrote " << f << '\n';
  return res.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardy-Sobolev critical problems on balls: exponents, masses, thresholds, ground states"};
  app.require_subcommand(1);
  Flags f;

  struct Sub {
    const char* name;
    std::optional<hardy::Task> task;
    const char* help;
  };
  const Sub subs[] = {
      {"exponents", hardy::Task::Exponents, "indicial roots and regime"},
      {"mu-rn", hardy::Task::MuRN, "best constant on R^n"},
      {"eigen", hardy::Task::Lambda1, "first Dirichlet eigenvalue"},
      {"mass", hardy::Task::Mass, "interior mass at lambda"},
      {"threshold", std::nullopt, "critical lambda*; truly or merely singular chosen from (gamma, s)"},
      {"ground-state", hardy::Task::GroundState, "radial ground state"},
      {"robin", hardy::Task::Robin, "Robin mass at a pole (n = 3)"},
      {"pohozaev", hardy::Task::PohozaevCheck, "Pohozaev defect of the ground state"},
      {"expansion", hardy::Task::EnergyExpansion, "energy expansion slope of the bubble test functions"},
      {"report", hardy::Task::FullReport, "acceptance suite with pass/fail summary"},
      {"run", std::nullopt, "run the task named in --config"},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> handles;
  for (const auto& s : subs) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    add_common(sc, f);
    if (s.task) {
      sc->footer(columns_help(*s.task));
    } else if (std::string(s.name) == "threshold") {
      sc->footer(columns_help(hardy::Task::ThresholdTruly) + "\n" + columns_help(hardy::Task::ThresholdMerely));
    }
    handles.emplace_back(sc, &s);
  }

  CLI11_PARSE(app, argc, argv);

  std::string out = f.out;
  if (out.empty())
    if (const char* env = std::getenv("HARDY_OUT_DIR")) out = env;

  try {
    for (const auto& [sc, s] : handles) {
      if (!sc->parsed()) continue;
      const std::optional<hardy::Task> task = s->task;
      const std::string name = s->name;
      if (name == "run" && f.config.empty()) throw hardy::Error(hardy::ErrorKind::ConfigError, "run needs --config");
      return run(build(sc, f, task, name == "threshold"), out);
    }
  } catch (const hardy::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
