#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ssir/model.hpp"

namespace ssir {

/// Configuration problem, with the offending field and (when known) line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string field, int line = 0);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

enum class Mode { threshold, simulate, classify, replicate };
std::string_view to_string(Mode mode);

/// One experiment. Files are flat INI text:
///
///   [model]       a1, b1, b2, sigma1, sigma2
///   [incidence]   kind, then the kind's coefficients
///   [experiment]  master_seed (required), mode, horizon, dt, n_paths,
///                 burn_in, output_dir, store_stride, window, threads,
///                 mc_samples, quad_tol, name
///   [initial]     s, i
///   [initial2]    s, i   (optional second start for the ergodic check)
struct ExperimentConfig {
  std::string name = "experiment";
  ModelParams params;
  IncidenceKind incidence_kind = IncidenceKind::ratio_example;
  Coefficients coefficients;
  Mode mode = Mode::classify;
  std::optional<double> horizon;  ///< default 200 (extinction) / 500 (permanence)
  double dt = 1e-3;
  std::size_t n_paths = 200;
  std::uint64_t master_seed = 0;
  double burn_in = 100.0;
  std::string output_dir = "out";
  State initial{1.0, 1.0};
  std::optional<State> initial2;
  std::size_t store_stride = 100;
  double window = 0.5;
  unsigned threads = 0;
  std::size_t mc_samples = 1000000;
  double quad_tol = 1e-6;
};

/// Throws ConfigError naming the field and line.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& file);

IncidenceModel build_incidence(const ExperimentConfig& config);

/// Built-in replication presets, "ex1" or "ex2". Throws ConfigError otherwise.
std::string_view preset_text(std::string_view example_id);

}  // namespace ssir
