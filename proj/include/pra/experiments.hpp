#pragma once

#include "pra/channel_model.hpp"
#include "pra/config.hpp"
#include "pra/csv.hpp"
#include "pra/policies.hpp"
#include "pra/statistical_estimator.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pra {

/// Independent RNG streams keyed by (seed, trial, stream); changing one trial
/// index never perturbs another trial's draws.
enum class Stream : std::uint64_t { speed = 1, fades = 2, extension = 3 };
Rng stream_rng(std::uint64_t seed, std::uint64_t trial, Stream stream);

/// Runs fn(0..n-1) over a pool of worker threads; rethrows the first failure.
void parallel_for(long n, int workers, const std::function<void(long)>& fn);

/// FNV-1a over the slot gains; equal hashes identify a shared trace.
std::uint64_t trace_hash(const ChannelTrace& trace);

/// Everything fixed across the trials of one experiment: geometry, the user's
/// speed and the large-scale gains along the true path.
struct Scenario {
  SystemConfig sys;
  TrajectoryConfig trajectory;
  TrajectoryConfig estimated_template;
  std::vector<Point2> bs_layout;
  std::vector<Point2> positions;
  std::vector<double> true_alphas;

  /// Large-scale gains along the estimated path with lateral error amplitude A_d.
  std::vector<double> estimated_alphas(double amplitude_m) const;
  ChannelTrace trial_trace(std::uint64_t seed, long trial) const;
};

Scenario make_scenario(const ExperimentConfig& cfg, const SystemConfig& sys);

/// Copy of `sys` with T_s slots per frame at unchanged frame duration.
SystemConfig with_slots_per_frame(const SystemConfig& sys, int slots_per_frame);

struct TrialRecord {
  int deadline_frames = 0;
  long trial_id = 0;
  std::string method;
  double energy_j = 0.0;
  bool deadline_met = false;
  long overtime_slots = 0;
  double nu = 0.0;
  double g_th = 0.0;
  double kappa = 0.0;
  std::uint64_t trace_hash = 0;
};

/// Plans for the large-scale policy, one per position-error amplitude.
struct LargeScalePlan {
  double amplitude_m = 0.0;
  ConservativePlan plan;
};
std::vector<LargeScalePlan> large_scale_plans(const Scenario& scenario,
                                             std::span<const double> amplitudes_m);

/// All methods on the same per-trial trace at cfg.sys.frames frames. Records are
/// ordered by trial, then method (UB, Ad=..., SE, EE).
std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg,
                                    std::vector<std::vector<SlotRecord>>* slot_logs = nullptr);

struct PdfValidationResult {
  double ks_true = 0.0;
  double ks_estimated = 0.0;
  long samples = 0;
  CsvTable histogram;
};
/// Kolmogorov-Smirnov distance between the pooled trial gains and the mixture
/// law from the true and from the estimated (amplitude of the estimated
/// trajectory template) large-scale gains.
PdfValidationResult pdf_validation(const ExperimentConfig& cfg);

/// KS distance between sorted samples and a continuous CDF.
double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf);

struct Table1Trial {
  int slots_per_frame = 0;
  long trial_id = 0;
  double kappa_star = 0.0;
  double nu_star = 0.0;
  double g_th_star = 0.0;
  double mu_nu = 0.0;
  double mu_gth = 0.0;
  double nu_deviation = 0.0;
  double gth_deviation = 0.0;
};

struct Table1Summary {
  int slots_per_frame = 0;
  long trials = 0;
  double max_nu_deviation = 0.0;
  double max_gth_deviation = 0.0;
  double median_nu_deviation = 0.0;
  double median_gth_deviation = 0.0;
  double mean_nu_deviation = 0.0;
  double mean_gth_deviation = 0.0;
  double nu_star_mean = 0.0;
  double nu_star_sd = 0.0;
  double gth_star_sd = 0.0;
};

struct Table1Result {
  std::vector<Table1Trial> trials;
  std::vector<Table1Summary> summary;
};
/// Genie water level and threshold against their large-scale predictions at
/// the genie's own active ratio, for each T_s in cfg.slots_per_frame_sweep.
Table1Result table1_experiment(const ExperimentConfig& cfg);

/// `points` active ratios: the first quarter log-spaced over [0.05, 0.2), the
/// rest linear over [0.2, 0.95].
std::vector<double> default_kappa_grid(int points);

struct SweepRow {
  double kappa = 0.0;
  double mu_omega = 0.0;
  double simulated_omega_mean = 0.0;
  double simulated_omega_std = 0.0;
  double mu_psi_p = 0.0;
  double simulated_psi_mean = 0.0;
  bool case2_clamped = false;
};
/// Analytic vs simulated per-slot power at fixed active ratios. Each grid value
/// is snapped to the nearest n / T.
std::vector<SweepRow> kappa_sweep(const ExperimentConfig& cfg, std::span<const double> grid = {});

struct ParamRow {
  double kappa = 0.0;
  double mu_gth = 0.0;
  double sigma_gth = 0.0;
  double simulated_gth_mean = 0.0;
  double simulated_gth_std = 0.0;
  double mu_nu = 0.0;
  double sigma_nu = 0.0;
  double simulated_nu_mean = 0.0;
  double simulated_nu_std = 0.0;
};
std::vector<ParamRow> param_stats(const ExperimentConfig& cfg, std::span<const double> grid = {});

struct CompareRow {
  int deadline_frames = 0;
  std::string method;
  double mean_energy_j = 0.0;
  double completion_rate = 0.0;
};
struct EnergyCompareResult {
  std::vector<CompareRow> rows;
  std::vector<TrialRecord> records;
};
/// Mean energy and on-time rate per method for each deadline in cfg.deadline_frames.
EnergyCompareResult energy_compare(const ExperimentConfig& cfg);

CsvTable to_csv(std::span<const TrialRecord> records);
CsvTable to_csv(std::span<const Table1Trial> trials);
CsvTable to_csv(std::span<const Table1Summary> summary);
CsvTable to_csv(std::span<const SweepRow> rows);
CsvTable to_csv(std::span<const ParamRow> rows);
CsvTable to_csv(std::span<const CompareRow> rows);

}  // namespace pra
