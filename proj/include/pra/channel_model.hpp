#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace pra {

using Rng = std::mt19937_64;

/// Physical and protocol constants of one simulated download.
///
/// Defaults are the macro-cell setup used throughout the experiments: a 4-antenna
/// BS, 2 Gbit file, 120 one-second frames of 100 slots, 10 MHz, -95 dBm noise.
struct SystemConfig {
  int n_antennas = 4;
  int frames = 120;
  int slots_per_frame = 100;
  double slot_duration_s = 0.01;
  double file_bits = 2e9;
  double bandwidth_hz = 10e6;
  double noise_power_w = 3.1622776601683794e-13;  // -95 dBm
  double cell_radius_m = 250.0;
  double max_tx_power_w = 40.0;
  double pa_efficiency = 0.213;
  double p_active_w = 233.2;
  double p_sleep_w = 150.0;
  std::uint64_t rng_seed = 2016;

  long total_slots() const { return static_cast<long>(frames) * slots_per_frame; }
  double frame_duration_s() const { return slots_per_frame * slot_duration_s; }

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

enum class TrajectoryKind { straight_line, cosine_perturbed };

struct TrajectoryConfig {
  TrajectoryKind kind = TrajectoryKind::straight_line;
  double min_bs_distance_m = 150.0;
  double amplitude_m = 0.0;
  double cycle_s = std::numbers::pi;
  std::optional<double> speed_mps;  // drawn uniform on (0, 20) when unset
  double start_x_m = 0.0;

  void validate() const;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// One realization of the channel over the whole deadline window.
struct ChannelTrace {
  std::vector<double> large_scale_per_frame;     // alpha^j, linear
  std::vector<double> equivalent_gain_per_slot;  // g^t = alpha * |h|^2 / noise
  int slots_per_frame = 1;

  long size() const { return static_cast<long>(equivalent_gain_per_slot.size()); }
  /// Large-scale gain of 0-based slot t.
  double alpha_of_slot(long t) const { return large_scale_per_frame[t / slots_per_frame]; }
};

/// Linear power gain of the 35.3 + 37.6 log10(d) dB path-loss law.
double path_loss_gain(double distance_m);

/// BS row on the x-axis, spaced 2*D, wide enough for any speed below 20 m/s.
std::vector<Point2> default_bs_layout(const SystemConfig& sys, const TrajectoryConfig& traj);

/// Returns a copy of `cfg` with the speed drawn uniform on (0, 20) m/s if unset.
TrajectoryConfig resolve_speed(TrajectoryConfig cfg, Rng& rng);

/// One position per frame, sampled at the frame start. Requires a resolved speed.
std::vector<Point2> generate_trajectory(const TrajectoryConfig& cfg, const SystemConfig& sys,
                                        std::span<const Point2> bs_layout);

/// Nearest-BS path-loss gain per position; ties go to the lowest BS index and
/// distances below 1 m are clamped to 1 m.
std::vector<double> large_scale_gains(std::span<const Point2> positions,
                                      std::span<const Point2> bs_layout);

/// i.i.d. |h|^2 ~ Gamma(n_antennas, 1) draws.
std::vector<double> sample_small_scale(Rng& rng, int n_antennas, long count);

std::vector<double> equivalent_gains(std::span<const double> alphas, std::span<const double> small,
                                     double noise_power_w, int slots_per_frame);

/// Draws fresh small-scale fades over fixed large-scale gains.
ChannelTrace generate_trace(std::span<const double> alphas, const SystemConfig& sys, Rng& rng);

}  // namespace pra
