// picklab: command-line driver for the verification runs.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <omp.h>

#include "CLI11.hpp"
#include "picklab/experiment.hpp"

namespace {

using namespace picklab;

void print_checks(const RunSummary& s) {
  for (const auto& c : s.checks)
    std::printf("%-4s %-36s worst=% .6e  tol=% .1e  %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.worst,
                c.tolerance, c.note.c_str());
  for (const auto& n : s.notices) std::printf("note: %s\n", n.c_str());
  std::printf("%s: %s (%.2f s)\n", s.command.c_str(), s.pass() ? "all checks passed" : "CHECKS FAILED", s.seconds);
}

void print_fit(const PowerFit& f) {
  if (f.degenerate) {
    std::printf("%-8s free-dynamics degenerate fit (sup is zero for some N); no slope\n", f.quantity.c_str());
    return;
  }
  std::printf("%-8s slope=% .6f  intercept=% .6f  r2=%.6f  residual_rms=%.3e  points=%d\n", f.quantity.c_str(),
              f.slope, f.intercept, f.r2, f.residual_rms, f.points);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"picklab: exact finite-dimensional checks of the bosonic mean-field inequalities"};
  app.require_subcommand(1);

  RunOptions opt;
  app.add_option("--out", opt.out_dir, "output directory (overrides output_dir in the config)");
  app.add_option("--threads", opt.threads, "OpenMP thread count")->check(CLI::PositiveNumber);
  app.add_flag("--tight-ell", opt.tight_ell, "use ell(t) instead of L(t) in the bound checks");
  app.add_option("--seed", opt.seed, "seed for the randomized morphism suite");

  std::string config_path, csv_path;
  auto* verify = app.add_subcommand("verify", "run every check on a single N");
  verify->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  auto* sweep = app.add_subcommand("sweep", "run the bound checks over N_range and write sweep.csv");
  sweep->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  auto* fit = app.add_subcommand("rate-fit", "fit log sup_t quantity against log N from a sweep CSV");
  fit->add_option("csv", csv_path, "sweep CSV")->required()->check(CLI::ExistingFile);

  // flags may also follow the subcommand
  for (auto* sub : {verify, sweep, fit}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help is not an error
  }

  Eigen::setNbThreads(1);
  omp_set_max_active_levels(1);
  if (opt.threads > 0) omp_set_num_threads(opt.threads);

  try {
    if (*verify) {
      const ExperimentConfig cfg = load_config(config_path);
      const RunSummary s = run_verify(cfg, opt);
      print_checks(s);
      return s.pass() ? 0 : 1;
    }
    if (*sweep) {
      const ExperimentConfig cfg = load_config(config_path);
      const SweepResult r = run_sweep(cfg, opt);
      print_checks(r.summary);
      return r.summary.pass() ? 0 : 1;
    }
    const RateFit r = run_rate_fit(csv_path);
    print_fit(r.alpha);
    print_fit(r.dist_m1);
    print_fit(r.dist_m2);
    if (!opt.out_dir.empty()) {
      std::filesystem::create_directories(opt.out_dir);
      std::ofstream(opt.out_dir + "/rate_fit.json") << r.to_json();
    }
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "picklab: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "picklab: error: %s\n", e.what());
    return 2;
  }
}
