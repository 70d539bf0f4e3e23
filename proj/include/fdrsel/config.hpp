#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fdrsel/datagen.hpp"
#include "fdrsel/estimators.hpp"
#include "fdrsel/selection.hpp"

namespace fdrsel {

// Knobs shared by every scenario of a grid.
struct MethodSettings {
  Estimator estimator;
  TauRule tau;
  std::size_t k = 10;
  std::size_t k_prime = 10;
  std::size_t subsample_size = 0;  // 0 means n
  bool bootstrap = true;           // MSS subsamples drawn with replacement
  std::size_t ss_subsamples = 50;
  double ss_threshold = 0.7;
  std::size_t ss_grid_size = 20;
  double ss_grid_ratio = 0.1;
};

// Largest problem accepted without --full-scale.
inline constexpr std::size_t kDeskMaxN = 1000;
inline constexpr std::size_t kDeskMaxP = 500;

struct GridConfig {
  std::size_t n = 0;
  std::size_t p = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> p1_values{20};
  std::vector<double> rho_values{0.0, 0.5, 0.7, 0.9};
  std::vector<SignalRange> signal_ranges{{0.0, 0.5}, {0.5, 1.0}, {1.0, 2.0}};
  std::size_t replications = 100;
  double q = 0.1;
  std::vector<Method> methods{Method::Dss, Method::Mss, Method::Bh, Method::Ss};
  MethodSettings settings;
  double noise_sd = 1.0;
  bool random_signs = false;
  SupportPlacement placement = SupportPlacement::Random;
  std::string out_dir;

  // Cartesian product of (p1, rho, range), lexicographic in that order.
  // Scenario i carries derive_seed(seed, {i}).
  std::vector<Scenario> scenarios() const;

  // Throws InvalidParameter naming the offending key and its legal range.
  void validate(bool full_scale = false) const;
};

// Key-value text: one "key = value" per line, '#' starts a comment, lists
// are comma separated, signal ranges are "lo:hi". n, p and seed are
// required; unknown or repeated keys are errors.
GridConfig parse_config_text(std::string_view text);
GridConfig parse_config(const std::filesystem::path& path);

// Re-parseable rendering with every default filled in.
std::string render_config(const GridConfig& config);

}  // namespace fdrsel
