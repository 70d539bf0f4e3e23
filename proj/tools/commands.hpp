#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace fdrsel::cli {

struct SimulateArgs {
  std::filesystem::path config;
  std::filesystem::path out;  // empty: the config's `out` key
  int threads = 0;            // 0: OpenMP default
  bool full_scale = false;
  bool serial = false;
};

struct SelectArgs {
  std::filesystem::path data;
  std::string response;
  std::string method = "dss";
  double q = 0.1;
  std::string tau = "elbow";
  std::size_t k = 10;
  std::size_t k_prime = 10;
  bool bootstrap = true;
  std::string estimator = "lasso_cv";
  std::uint64_t seed = 0;
  double ss_threshold = 0.7;
  std::size_t ss_subsamples = 50;
  int threads = 0;
  std::filesystem::path out;
};

// Both return a process exit status; diagnostics go to `err`.
int run_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int run_select(const SelectArgs& args, std::ostream& out, std::ostream& err);

}  // namespace fdrsel::cli
