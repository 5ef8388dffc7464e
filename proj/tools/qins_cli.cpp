#include "qins/experiments.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

qins::RunConfig load(const std::string& path, const std::string& out_dir) {
  qins::RunConfig cfg = qins::load_config(path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  return cfg;
}

std::ofstream open_csv(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream os(std::filesystem::path(dir) / name);
  if (!os) throw std::runtime_error("cannot write " + (std::filesystem::path(dir) / name).string());
  return os;
}

int finish(const qins::ExperimentResult& r) {
  r.print(std::cout);
  std::cout << (r.pass() ? "all checks passed" : "some checks failed") << '\n';
  return r.pass() ? 0 : 1;
}

int cmd_spectrum(const qins::RunConfig& cfg) {
  const auto out = qins::run_spectrum(cfg);
  auto os = open_csv(cfg.output_dir, "spectrum.csv");
  qins::write_spectrum_csv(os, out.rows);
  std::cout << "max relative error " << out.max_rel_err << '\n';
  if (out.overdamped) std::cout << "overdamped\n";
  return finish(out.result);
}

int cmd_lincheck(const qins::RunConfig& cfg) {
  const auto out = qins::run_lincheck(cfg);
  std::cout << "spectral angle " << out.spectral_angle << '\n';
  return finish(out.result);
}

int cmd_simulate(const qins::RunConfig& cfg) {
  const auto out = qins::run_simulate(cfg, true);
  std::cout << "outputs written to " << cfg.output_dir << '\n';
  return finish(out.result);
}

int cmd_contraction(const qins::RunConfig& cfg) {
  const auto out = qins::run_contraction(cfg);
  auto os = open_csv(cfg.output_dir, "contraction.csv");
  qins::write_contraction_csv(os, out.rows);
  for (const auto& r : out.rows)
    if (!r.failure.empty()) std::cout << "window " << r.window_T << ": " << r.failure << '\n';
  return finish(out.result);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-incompressible two-phase flow solver"};
  app.require_subcommand(1);
  std::string config;
  std::string out_dir;
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const qins::RunConfig&);
  };
  const Sub subs[] = {
      {"spectrum", "Constant-coefficient spectrum against the per-mode quadratic", cmd_spectrum},
      {"lincheck", "Check the structural hypotheses of the linearized operator", cmd_lincheck},
      {"simulate", "Run the windowed Picard solver and write diagnostics", cmd_simulate},
      {"contraction", "Measure the Picard contraction factor over a window ladder", cmd_contraction},
  };
  for (const Sub& s : subs) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
    sc->add_option("-o,--out", out_dir, "Override output.dir");
  }

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  for (const Sub& s : subs) {
    if (!app.got_subcommand(s.name)) continue;
    qins::RunConfig cfg;
    try {
      cfg = load(config, out_dir);
    } catch (const qins::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n' << app.get_subcommand(s.name)->help();
      return 2;
    }
    try {
      return s.run(cfg);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 3;
    }
  }
  return 2;
}
