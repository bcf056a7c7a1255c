#include "pra/config.hpp"

#include "pra/errors.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <yaml-cpp/yaml.h>

namespace pra {

namespace {

using Setter = std::function<void(ExperimentConfig&, const YAML::Node&)>;

template <class T>
T scalar(const YAML::Node& node) {
  return node.as<T>();
}

TrajectoryKind parse_trajectory_kind(const std::string& name) {
  if (name == "straight_line") return TrajectoryKind::straight_line;
  if (name == "cosine_perturbed") return TrajectoryKind::cosine_perturbed;
  throw ConfigError("unknown trajectory kind '" + name + "'");
}

std::string_view trajectory_kind_name(TrajectoryKind kind) {
  return kind == TrajectoryKind::straight_line ? "straight_line" : "cosine_perturbed";
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"n_antennas", [](auto& c, auto& n) { c.sys.n_antennas = scalar<int>(n); }},
      {"frames", [](auto& c, auto& n) { c.sys.frames = scalar<int>(n); }},
      {"slots_per_frame", [](auto& c, auto& n) { c.sys.slots_per_frame = scalar<int>(n); }},
      {"slot_duration_s", [](auto& c, auto& n) { c.sys.slot_duration_s = scalar<double>(n); }},
      {"file_bits", [](auto& c, auto& n) { c.sys.file_bits = scalar<double>(n); }},
      {"bandwidth_hz", [](auto& c, auto& n) { c.sys.bandwidth_hz = scalar<double>(n); }},
      {"noise_power_w", [](auto& c, auto& n) { c.sys.noise_power_w = scalar<double>(n); }},
      {"noise_power_dbm",
       [](auto& c, auto& n) { c.sys.noise_power_w = std::pow(10.0, scalar<double>(n) / 10.0) * 1e-3; }},
      {"cell_radius_m", [](auto& c, auto& n) { c.sys.cell_radius_m = scalar<double>(n); }},
      {"max_tx_power_w", [](auto& c, auto& n) { c.sys.max_tx_power_w = scalar<double>(n); }},
      {"pa_efficiency", [](auto& c, auto& n) { c.sys.pa_efficiency = scalar<double>(n); }},
      {"p_active_w", [](auto& c, auto& n) { c.sys.p_active_w = scalar<double>(n); }},
      {"p_sleep_w", [](auto& c, auto& n) { c.sys.p_sleep_w = scalar<double>(n); }},
      {"seed",
       [](auto& c, auto& n) {
         c.seed = scalar<std::uint64_t>(n);
         c.sys.rng_seed = c.seed;
       }},
      {"trajectory_kind",
       [](auto& c, auto& n) { c.trajectory.kind = parse_trajectory_kind(scalar<std::string>(n)); }},
      {"min_bs_distance_m",
       [](auto& c, auto& n) {
         c.trajectory.min_bs_distance_m = scalar<double>(n);
         c.estimated_trajectory.min_bs_distance_m = c.trajectory.min_bs_distance_m;
       }},
      {"amplitude_m", [](auto& c, auto& n) { c.trajectory.amplitude_m = scalar<double>(n); }},
      {"cycle_s", [](auto& c, auto& n) { c.trajectory.cycle_s = scalar<double>(n); }},
      {"speed_mps", [](auto& c, auto& n) { c.trajectory.speed_mps = scalar<double>(n); }},
      {"start_x_m",
       [](auto& c, auto& n) {
         c.trajectory.start_x_m = scalar<double>(n);
         c.estimated_trajectory.start_x_m = c.trajectory.start_x_m;
       }},
      {"estimated_kind",
       [](auto& c, auto& n) {
         c.estimated_trajectory.kind = parse_trajectory_kind(scalar<std::string>(n));
       }},
      {"estimated_amplitude_m",
       [](auto& c, auto& n) { c.estimated_trajectory.amplitude_m = scalar<double>(n); }},
      {"estimated_cycle_s", [](auto& c, auto& n) { c.estimated_trajectory.cycle_s = scalar<double>(n); }},
      {"n_trials", [](auto& c, auto& n) { c.n_trials = scalar<int>(n); }},
      {"experiment",
       [](auto& c, auto& n) { c.experiment = parse_experiment_kind(scalar<std::string>(n)); }},
      {"output_path", [](auto& c, auto& n) { c.output_path = scalar<std::string>(n); }},
      {"deadline_frames", [](auto& c, auto& n) { c.deadline_frames = n.template as<std::vector<int>>(); }},
      {"estimate_amplitudes_m",
       [](auto& c, auto& n) { c.estimate_amplitudes_m = n.template as<std::vector<double>>(); }},
      {"slots_per_frame_sweep",
       [](auto& c, auto& n) { c.slots_per_frame_sweep = n.template as<std::vector<int>>(); }},
      {"kappa_points", [](auto& c, auto& n) { c.kappa_points = scalar<int>(n); }},
      {"histogram_bins", [](auto& c, auto& n) { c.histogram_bins = scalar<int>(n); }},
      {"slot_log", [](auto& c, auto& n) { c.slot_log = scalar<bool>(n); }},
      {"workers", [](auto& c, auto& n) { c.workers = scalar<int>(n); }},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    sys.validate();
    trajectory.validate();
    estimated_trajectory.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
  if (deadline_frames.empty()) throw ConfigError("deadline_frames must not be empty");
  for (int f : deadline_frames)
    if (f < 1) throw ConfigError("deadline_frames entries must be >= 1");
  for (double a : estimate_amplitudes_m)
    if (a < 0.0) throw ConfigError("estimate_amplitudes_m entries must be >= 0");
  for (int ts : slots_per_frame_sweep)
    if (ts < 1) throw ConfigError("slots_per_frame_sweep entries must be >= 1");
  if (kappa_points < 2) throw ConfigError("kappa_points must be >= 2");
  if (histogram_bins < 1) throw ConfigError("histogram_bins must be >= 1");
  if (workers < 0) throw ConfigError("workers must be >= 0");
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  if (name == "pdf_validation" || name == "pdf") return ExperimentKind::pdf_validation;
  if (name == "param_stats" || name == "params") return ExperimentKind::param_stats;
  if (name == "kappa_sweep" || name == "sweep") return ExperimentKind::kappa_sweep;
  if (name == "energy_compare" || name == "compare") return ExperimentKind::energy_compare;
  if (name == "table1") return ExperimentKind::table1;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::pdf_validation: return "pdf_validation";
    case ExperimentKind::param_stats: return "param_stats";
    case ExperimentKind::kappa_sweep: return "kappa_sweep";
    case ExperimentKind::energy_compare: return "energy_compare";
    case ExperimentKind::table1: return "table1";
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& yaml_text, ExperimentConfig base) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (root.IsNull()) return base;
  if (!root.IsMap()) throw ConfigError("config must be a flat key: value mapping");
  for (const auto& entry : root) {
    const auto key = entry.first.as<std::string>();
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    try {
      it->second(base, entry.second);
    } catch (const YAML::Exception& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    }
  }
  base.validate();
  return base;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string dump_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "experiment" << YAML::Value << std::string(to_string(c.experiment));
  out << YAML::Key << "n_antennas" << YAML::Value << c.sys.n_antennas;
  out << YAML::Key << "frames" << YAML::Value << c.sys.frames;
  out << YAML::Key << "slots_per_frame" << YAML::Value << c.sys.slots_per_frame;
  out << YAML::Key << "slot_duration_s" << YAML::Value << c.sys.slot_duration_s;
  out << YAML::Key << "file_bits" << YAML::Value << c.sys.file_bits;
  out << YAML::Key << "bandwidth_hz" << YAML::Value << c.sys.bandwidth_hz;
  out << YAML::Key << "noise_power_w" << YAML::Value << c.sys.noise_power_w;
  out << YAML::Key << "cell_radius_m" << YAML::Value << c.sys.cell_radius_m;
  out << YAML::Key << "max_tx_power_w" << YAML::Value << c.sys.max_tx_power_w;
  out << YAML::Key << "pa_efficiency" << YAML::Value << c.sys.pa_efficiency;
  out << YAML::Key << "p_active_w" << YAML::Value << c.sys.p_active_w;
  out << YAML::Key << "p_sleep_w" << YAML::Value << c.sys.p_sleep_w;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "trajectory_kind" << YAML::Value
      << std::string(trajectory_kind_name(c.trajectory.kind));
  out << YAML::Key << "min_bs_distance_m" << YAML::Value << c.trajectory.min_bs_distance_m;
  out << YAML::Key << "amplitude_m" << YAML::Value << c.trajectory.amplitude_m;
  out << YAML::Key << "cycle_s" << YAML::Value << c.trajectory.cycle_s;
  if (c.trajectory.speed_mps) out << YAML::Key << "speed_mps" << YAML::Value << *c.trajectory.speed_mps;
  out << YAML::Key << "start_x_m" << YAML::Value << c.trajectory.start_x_m;
  out << YAML::Key << "estimated_kind" << YAML::Value
      << std::string(trajectory_kind_name(c.estimated_trajectory.kind));
  out << YAML::Key << "estimated_amplitude_m" << YAML::Value << c.estimated_trajectory.amplitude_m;
  out << YAML::Key << "estimated_cycle_s" << YAML::Value << c.estimated_trajectory.cycle_s;
  out << YAML::Key << "n_trials" << YAML::Value << c.n_trials;
  out << YAML::Key << "output_path" << YAML::Value << c.output_path;
  out << YAML::Key << "deadline_frames" << YAML::Value << YAML::Flow << c.deadline_frames;
  out << YAML::Key << "estimate_amplitudes_m" << YAML::Value << YAML::Flow << c.estimate_amplitudes_m;
  out << YAML::Key << "slots_per_frame_sweep" << YAML::Value << YAML::Flow << c.slots_per_frame_sweep;
  out << YAML::Key << "kappa_points" << YAML::Value << c.kappa_points;
  out << YAML::Key << "histogram_bins" << YAML::Value << c.histogram_bins;
  out << YAML::Key << "slot_log" << YAML::Value << c.slot_log;
  out << YAML::Key << "workers" << YAML::Value << c.workers;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace pra
