#include "pra/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pra {

namespace {

constexpr double kMaxSpeedMps = 20.0;
constexpr double kMinDistanceM = 1.0;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void SystemConfig::validate() const {
  require(n_antennas >= 1, "n_antennas must be >= 1");
  require(frames >= 1, "frames must be >= 1");
  require(slots_per_frame >= 1, "slots_per_frame must be >= 1");
  require(slot_duration_s > 0.0, "slot_duration_s must be > 0");
  require(file_bits > 0.0, "file_bits must be > 0");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
  require(noise_power_w > 0.0, "noise_power_w must be > 0");
  require(cell_radius_m > 0.0, "cell_radius_m must be > 0");
  require(max_tx_power_w > 0.0, "max_tx_power_w must be > 0");
  require(pa_efficiency > 0.0 && pa_efficiency <= 1.0, "pa_efficiency must lie in (0, 1]");
  require(p_sleep_w >= 0.0, "p_sleep_w must be >= 0");
  require(p_active_w >= p_sleep_w, "p_active_w must be >= p_sleep_w");
}

void TrajectoryConfig::validate() const {
  require(amplitude_m >= 0.0, "amplitude_m must be >= 0");
  require(kind == TrajectoryKind::cosine_perturbed || amplitude_m == 0.0,
          "straight_line trajectories take no amplitude");
  require(cycle_s > 0.0, "cycle_s must be > 0");
  require(min_bs_distance_m >= 0.0, "min_bs_distance_m must be >= 0");
  if (speed_mps) require(*speed_mps >= 0.0, "speed_mps must be >= 0");
}

double path_loss_gain(double distance_m) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("path_loss_gain: distance must be positive");
  const double loss_db = 35.3 + 37.6 * std::log10(distance_m);
  return std::pow(10.0, -loss_db / 10.0);
}

std::vector<Point2> default_bs_layout(const SystemConfig& sys, const TrajectoryConfig& traj) {
  const double spacing = 2.0 * sys.cell_radius_m;
  const double reach = kMaxSpeedMps * sys.frames * sys.frame_duration_s();
  const long first = static_cast<long>(std::floor(traj.start_x_m / spacing)) - 1;
  const long last = static_cast<long>(std::ceil((traj.start_x_m + reach) / spacing)) + 1;
  std::vector<Point2> bs;
  for (long k = first; k <= last; ++k) bs.push_back({static_cast<double>(k) * spacing, 0.0});
  return bs;
}

TrajectoryConfig resolve_speed(TrajectoryConfig cfg, Rng& rng) {
  if (!cfg.speed_mps) {
    std::uniform_real_distribution<double> speed(0.0, kMaxSpeedMps);
    double v = speed(rng);
    while (v <= 0.0) v = speed(rng);
    cfg.speed_mps = v;
  }
  return cfg;
}

std::vector<Point2> generate_trajectory(const TrajectoryConfig& cfg, const SystemConfig& sys,
                                        std::span<const Point2> bs_layout) {
  cfg.validate();
  if (bs_layout.empty()) throw std::invalid_argument("generate_trajectory: empty BS layout");
  if (!cfg.speed_mps) throw std::invalid_argument("generate_trajectory: speed not resolved");

  // The road runs parallel to the BS row at the requested offset.
  const double row_y = bs_layout.front().y;
  std::vector<Point2> out;
  out.reserve(sys.frames);
  for (int j = 0; j < sys.frames; ++j) {
    const double elapsed = j * sys.frame_duration_s();
    double offset = cfg.min_bs_distance_m;
    if (cfg.kind == TrajectoryKind::cosine_perturbed)
      offset += cfg.amplitude_m * std::cos(2.0 * std::numbers::pi * elapsed / cfg.cycle_s);
    out.push_back({cfg.start_x_m + *cfg.speed_mps * elapsed, row_y + offset});
  }
  return out;
}

std::vector<double> large_scale_gains(std::span<const Point2> positions,
                                      std::span<const Point2> bs_layout) {
  if (bs_layout.empty()) throw std::invalid_argument("large_scale_gains: empty BS layout");
  std::vector<double> alphas;
  alphas.reserve(positions.size());
  for (const auto& pos : positions) {
    double best = std::hypot(pos.x - bs_layout[0].x, pos.y - bs_layout[0].y);
    for (std::size_t b = 1; b < bs_layout.size(); ++b) {
      const double d = std::hypot(pos.x - bs_layout[b].x, pos.y - bs_layout[b].y);
      if (d < best) best = d;
    }
    alphas.push_back(path_loss_gain(std::max(best, kMinDistanceM)));
  }
  return alphas;
}

std::vector<double> sample_small_scale(Rng& rng, int n_antennas, long count) {
  if (n_antennas < 1) throw std::invalid_argument("sample_small_scale: n_antennas must be >= 1");
  if (count < 0) throw std::invalid_argument("sample_small_scale: negative count");
  std::gamma_distribution<double> gamma(static_cast<double>(n_antennas), 1.0);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& h : out) h = gamma(rng);
  return out;
}

std::vector<double> equivalent_gains(std::span<const double> alphas, std::span<const double> small,
                                     double noise_power_w, int slots_per_frame) {
  if (slots_per_frame < 1) throw std::invalid_argument("equivalent_gains: slots_per_frame < 1");
  if (small.size() != alphas.size() * static_cast<std::size_t>(slots_per_frame))
    throw std::invalid_argument("equivalent_gains: expected " +
                                std::to_string(alphas.size() * slots_per_frame) +
                                " small-scale samples, got " + std::to_string(small.size()));
  std::vector<double> g(small.size());
  for (std::size_t t = 0; t < small.size(); ++t)
    g[t] = alphas[t / slots_per_frame] * small[t] / noise_power_w;
  return g;
}

ChannelTrace generate_trace(std::span<const double> alphas, const SystemConfig& sys, Rng& rng) {
  if (alphas.size() != static_cast<std::size_t>(sys.frames))
    throw std::invalid_argument("generate_trace: one large-scale gain per frame required");
  const auto small = sample_small_scale(rng, sys.n_antennas, sys.total_slots());
  ChannelTrace trace;
  trace.large_scale_per_frame.assign(alphas.begin(), alphas.end());
  trace.equivalent_gain_per_slot =
      equivalent_gains(alphas, small, sys.noise_power_w, sys.slots_per_frame);
  trace.slots_per_frame = sys.slots_per_frame;
  return trace;
}

}  // namespace pra
