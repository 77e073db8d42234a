#pragma once

// YAML run configuration.
//
//   experiment:   kind, seed, draws, n_values, reference_n, xi0_values,
//                 perturbation_sizes, u0, params, hypothesis_violation
//   grid:         half_width, num_points
//   coefficients: alpha, beta, gamma, delta, epsilon (expression strings), alpha0
//   split:        kind (user_provided | softplus), beta1, kappa
//   solver:       t_final, dt, s
//
// Scalars may be numbers or constant expressions ("16*pi").

#include <filesystem>
#include <string>
#include <vector>

#include "gkdv/experiments.hpp"

namespace gkdv {

struct RunConfig {
  ExperimentSpec spec;
  std::string config_hash;
  std::string run_id;
};

/// Throws ConfigError listing every violation found.
RunConfig parse_config_text(const std::string& text);
/// Adds IO failures to the same error type.
RunConfig parse_config(const std::filesystem::path& path);

/// Recomputes run_id after the seed is overridden.
void set_seed(RunConfig& config, std::uint64_t seed);

/// Levenshtein distance, for key suggestions.
std::size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace gkdv
