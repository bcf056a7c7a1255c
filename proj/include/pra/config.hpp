#pragma once

#include "pra/channel_model.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pra {

enum class ExperimentKind { pdf_validation, param_stats, kappa_sweep, energy_compare, table1 };

inline TrajectoryConfig default_estimated_trajectory() {
  TrajectoryConfig t;
  t.kind = TrajectoryKind::cosine_perturbed;
  t.amplitude_m = 5.0;
  return t;
}

struct ExperimentConfig {
  SystemConfig sys;
  TrajectoryConfig trajectory;
  /// Template for the position estimates fed to the large-scale policies; its
  /// amplitude is overridden by each entry of `estimate_amplitudes_m`.
  TrajectoryConfig estimated_trajectory = default_estimated_trajectory();
  int n_trials = 200;
  ExperimentKind experiment = ExperimentKind::energy_compare;
  std::string output_path = "results.csv";
  std::uint64_t seed = 2016;

  std::vector<int> deadline_frames{60, 80, 100, 120};
  std::vector<double> estimate_amplitudes_m{0.0, 5.0, 10.0};
  std::vector<int> slots_per_frame_sweep{100, 1000};
  int kappa_points = 64;
  int histogram_bins = 100;
  bool slot_log = false;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const;
};

ExperimentKind parse_experiment_kind(std::string_view name);
std::string_view to_string(ExperimentKind kind);

/// Reads a flat YAML mapping of `key: value` pairs on top of the defaults.
/// Unknown keys and malformed values raise ConfigError; unreadable files IoError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& yaml_text, ExperimentConfig base = {});

/// Key/value listing of the effective configuration, loadable by parse_config.
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace pra
