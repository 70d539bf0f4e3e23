#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"FDR-controlled feature selection by data splitting and multiple sampling"};
  app.require_subcommand(1);

  fdrsel::cli::SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a seeded simulation grid");
  simulate->add_option("--config", sim.config, "Key-value config file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Output directory (overrides the config)");
  simulate->add_option("--threads", sim.threads, "Worker threads (0: all)")->check(CLI::NonNegativeNumber);
  simulate->add_flag("--full-scale", sim.full_scale, "Allow grids above desk scale");
  simulate->add_flag("--serial", sim.serial, "Use the serial reference path");

  fdrsel::cli::SelectArgs sel;
  auto* select = app.add_subcommand("select", "Select features of a delimited data file");
  select->add_option("--data", sel.data, "CSV or TSV file with a header row")->required()->check(CLI::ExistingFile);
  select->add_option("--response", sel.response, "Name of the response column")->required();
  select->add_option("--method", sel.method, "dss, mss, bh or ss")
      ->check(CLI::IsMember({"dss", "mss", "bh", "ss"}));
  select->add_option("--q", sel.q, "Nominal FDR level");
  select->add_option("--tau", sel.tau, "elbow, elbow:training, fixed:<v> or oracle:<level>:<sd>");
  select->add_option("--k", sel.k, "MSS training subsamples");
  select->add_option("--k-prime", sel.k_prime, "MSS validation subsamples");
  select->add_option("--bootstrap", sel.bootstrap, "MSS subsamples with replacement");
  select->add_option("--estimator", sel.estimator, "lasso_cv, ols or lasso:<lambda>");
  select->add_option("--seed", sel.seed, "Seed for splits, subsamples and CV folds");
  select->add_option("--ss-threshold", sel.ss_threshold, "Stability selection cutoff");
  select->add_option("--ss-subsamples", sel.ss_subsamples, "Stability selection subsamples");
  select->add_option("--threads", sel.threads, "Worker threads (0: all)")->check(CLI::NonNegativeNumber);
  select->add_option("--out", sel.out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (*simulate) return fdrsel::cli::run_simulate(sim, std::cout, std::cerr);
  return fdrsel::cli::run_select(sel, std::cout, std::cerr);
}
