#include "pra/experiments.hpp"

#include "pra/errors.hpp"
#include "pra/gain_distribution.hpp"
#include "pra/offline_optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace pra {

namespace {

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSd mean_sd(std::span<const double> v) {
  MeanSd out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string amplitude_tag(double amplitude_m) { return "Ad=" + format_number(amplitude_m); }

std::vector<long> snap_to_slots(std::span<const double> grid, long total) {
  std::vector<long> n;
  n.reserve(grid.size());
  for (double k : grid)
    n.push_back(std::clamp(std::llround(k * static_cast<double>(total)), 1LL,
                           static_cast<long long>(total - 1)));
  return n;
}

}  // namespace

Rng stream_rng(std::uint64_t seed, std::uint64_t trial, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

void parallel_for(long n, int workers, const std::function<void(long)>& fn) {
  if (n <= 0) return;
  unsigned threads = workers > 0 ? static_cast<unsigned>(workers) : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(std::min<long>(n, 256)));
  if (threads == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (long i = next++; i < n && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t trace_hash(const ChannelTrace& trace) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double g : trace.equivalent_gain_per_slot) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(&g);
    for (std::size_t i = 0; i < sizeof g; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::vector<double> Scenario::estimated_alphas(double amplitude_m) const {
  TrajectoryConfig est = estimated_template;
  est.amplitude_m = amplitude_m;
  if (amplitude_m > 0.0) est.kind = TrajectoryKind::cosine_perturbed;
  return large_scale_gains(generate_trajectory(est, sys, bs_layout), bs_layout);
}

ChannelTrace Scenario::trial_trace(std::uint64_t seed, long trial) const {
  Rng rng = stream_rng(seed, static_cast<std::uint64_t>(trial), Stream::fades);
  return generate_trace(true_alphas, sys, rng);
}

Scenario make_scenario(const ExperimentConfig& cfg, const SystemConfig& sys) {
  sys.validate();
  Scenario s;
  s.sys = sys;
  Rng speed_rng = stream_rng(cfg.seed, 0, Stream::speed);
  s.trajectory = resolve_speed(cfg.trajectory, speed_rng);
  s.estimated_template = cfg.estimated_trajectory;
  s.estimated_template.speed_mps = s.trajectory.speed_mps;
  s.estimated_template.start_x_m = s.trajectory.start_x_m;
  s.estimated_template.min_bs_distance_m = s.trajectory.min_bs_distance_m;
  s.bs_layout = default_bs_layout(sys, s.trajectory);
  s.positions = generate_trajectory(s.trajectory, sys, s.bs_layout);
  s.true_alphas = large_scale_gains(s.positions, s.bs_layout);
  return s;
}

SystemConfig with_slots_per_frame(const SystemConfig& sys, int slots_per_frame) {
  SystemConfig out = sys;
  out.slot_duration_s = sys.frame_duration_s() / slots_per_frame;
  out.slots_per_frame = slots_per_frame;
  return out;
}

std::vector<LargeScalePlan> large_scale_plans(const Scenario& scenario,
                                             std::span<const double> amplitudes_m) {
  const PowerModel pm = PowerModel::from(scenario.sys);
  const double rate = normalized_rate_requirement(scenario.sys);
  std::vector<LargeScalePlan> plans;
  for (double amp : amplitudes_m) {
    GainDistribution dist(scenario.estimated_alphas(amp), scenario.sys.n_antennas,
                          scenario.sys.noise_power_w);
    LargeScaleEstimator est(std::move(dist), static_cast<double>(scenario.sys.total_slots()), rate);
    plans.push_back({amp, est.conservative_estimates(est.optimize_kappa(pm))});
  }
  return plans;
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg,
                                    std::vector<std::vector<SlotRecord>>* slot_logs) {
  cfg.validate();
  const Scenario scenario = make_scenario(cfg, cfg.sys);
  const SystemConfig& sys = scenario.sys;
  const auto plans = large_scale_plans(scenario, cfg.estimate_amplitudes_m);
  const PowerModel pm = PowerModel::from(sys);
  const double rate = normalized_rate_requirement(sys);
  const std::size_t methods = plans.size() + 3;
  const bool keep_log = slot_logs != nullptr;

  std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.n_trials) * methods);
  std::vector<std::vector<SlotRecord>> logs(keep_log ? records.size() : 0);

  parallel_for(cfg.n_trials, cfg.workers, [&](long trial) {
    const ChannelTrace trace = scenario.trial_trace(cfg.seed, trial);
    const std::uint64_t hash = trace_hash(trace);
    const std::uint64_t extension_seed =
        stream_rng(cfg.seed, static_cast<std::uint64_t>(trial), Stream::extension)();
    const auto genie = optimize(trace.equivalent_gain_per_slot, rate, pm);

    std::size_t slot = static_cast<std::size_t>(trial) * methods;
    const auto record = [&](std::string method, PolicyOutcome outcome, double nu, double g_th,
                            double kappa) {
      TrialRecord& r = records[slot];
      r = {sys.frames, trial, std::move(method), outcome.energy_j, outcome.deadline_met,
           outcome.overtime_slots, nu, g_th, kappa, hash};
      if (keep_log) logs[slot] = std::move(outcome.per_slot_log);
      ++slot;
    };

    {
      OnlineChannel ch(trace, sys, extension_seed);
      record("UB", run_threshold_waterfill(ch, genie.water_level, genie.threshold, sys, keep_log),
             genie.water_level, genie.threshold, genie.active_ratio);
    }
    for (const auto& p : plans) {
      OnlineChannel ch(trace, sys, extension_seed);
      record(amplitude_tag(p.amplitude_m),
             run_threshold_waterfill(ch, p.plan.nu_hat, p.plan.g_th_hat, sys, keep_log),
             p.plan.nu_hat, p.plan.g_th_hat, p.plan.kappa_star);
    }
    {
      OnlineChannel ch(trace, sys, extension_seed);
      record("SE", run_se_policy(ch, sys, keep_log), 0.0, 0.0, 0.0);
    }
    {
      OnlineChannel ch(trace, sys, extension_seed);
      record("EE", run_ee_policy(ch, sys, keep_log), 0.0, 0.0, 0.0);
    }
  });

  if (keep_log) *slot_logs = std::move(logs);
  return records;
}

double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

PdfValidationResult pdf_validation(const ExperimentConfig& cfg) {
  cfg.validate();
  const Scenario scenario = make_scenario(cfg, cfg.sys);
  const long per_trial = scenario.sys.total_slots();

  std::vector<double> pooled(static_cast<std::size_t>(per_trial * cfg.n_trials));
  parallel_for(cfg.n_trials, cfg.workers, [&](long trial) {
    const auto trace = scenario.trial_trace(cfg.seed, trial);
    std::copy(trace.equivalent_gain_per_slot.begin(), trace.equivalent_gain_per_slot.end(),
              pooled.begin() + trial * per_trial);
  });
  std::sort(pooled.begin(), pooled.end());

  const GainDistribution law_true(scenario.true_alphas, scenario.sys.n_antennas,
                                  scenario.sys.noise_power_w);
  const GainDistribution law_est(scenario.estimated_alphas(cfg.estimated_trajectory.amplitude_m),
                                 scenario.sys.n_antennas, scenario.sys.noise_power_w);

  PdfValidationResult out;
  out.samples = static_cast<long>(pooled.size());
  out.ks_true = ks_distance(pooled, [&](double g) { return law_true.cdf(g); });
  out.ks_estimated = ks_distance(pooled, [&](double g) { return law_est.cdf(g); });

  const double top = pooled[static_cast<std::size_t>(0.999 * static_cast<double>(pooled.size() - 1))];
  const int bins = cfg.histogram_bins;
  const double width = top / bins;
  std::vector<long> counts(bins, 0);
  for (double g : pooled) {
    if (g >= top) break;
    ++counts[std::min(bins - 1, static_cast<int>(g / width))];
  }
  out.histogram.header = {"bin_lo", "bin_hi", "empirical_density", "pdf_true", "pdf_estimated"};
  for (int b = 0; b < bins; ++b) {
    const double lo = b * width;
    const double mid = lo + 0.5 * width;
    out.histogram.rows.push_back(
        {format_number(lo), format_number(lo + width),
         format_number(static_cast<double>(counts[b]) / (static_cast<double>(pooled.size()) * width)),
         format_number(law_true.pdf(mid)), format_number(law_est.pdf(mid))});
  }
  return out;
}

Table1Result table1_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Table1Result result;
  for (int ts : cfg.slots_per_frame_sweep) {
    const SystemConfig sys = with_slots_per_frame(cfg.sys, ts);
    const Scenario scenario = make_scenario(cfg, sys);
    const PowerModel pm = PowerModel::from(sys);
    const double rate = normalized_rate_requirement(sys);
    const LargeScaleEstimator est(
        GainDistribution(scenario.true_alphas, sys.n_antennas, sys.noise_power_w),
        static_cast<double>(sys.total_slots()), rate);

    std::vector<Table1Trial> rows(cfg.n_trials);
    parallel_for(cfg.n_trials, cfg.workers, [&](long trial) {
      const auto trace = scenario.trial_trace(cfg.seed, trial);
      const auto genie = optimize(trace.equivalent_gain_per_slot, rate, pm);
      const auto th = est.threshold_stats(genie.active_ratio);
      const auto nu = est.nu_stats(genie.active_ratio);
      Table1Trial& r = rows[trial];
      r.slots_per_frame = ts;
      r.trial_id = trial;
      r.kappa_star = genie.active_ratio;
      r.nu_star = genie.water_level;
      r.g_th_star = genie.threshold;
      r.mu_nu = nu.mean;
      r.mu_gth = th.mean;
      r.nu_deviation = std::abs(genie.water_level - nu.mean) / nu.mean;
      r.gth_deviation = std::abs(genie.threshold - th.mean) / th.mean;
    });

    std::vector<double> nu_dev, gth_dev, nu_star, gth_star;
    for (const auto& r : rows) {
      nu_dev.push_back(r.nu_deviation);
      gth_dev.push_back(r.gth_deviation);
      nu_star.push_back(r.nu_star);
      gth_star.push_back(r.g_th_star);
    }
    Table1Summary s;
    s.slots_per_frame = ts;
    s.trials = cfg.n_trials;
    s.max_nu_deviation = *std::max_element(nu_dev.begin(), nu_dev.end());
    s.max_gth_deviation = *std::max_element(gth_dev.begin(), gth_dev.end());
    s.median_nu_deviation = median(nu_dev);
    s.median_gth_deviation = median(gth_dev);
    s.mean_nu_deviation = mean_sd(nu_dev).mean;
    s.mean_gth_deviation = mean_sd(gth_dev).mean;
    const auto nu_ms = mean_sd(nu_star);
    s.nu_star_mean = nu_ms.mean;
    s.nu_star_sd = nu_ms.sd;
    s.gth_star_sd = mean_sd(gth_star).sd;
    result.summary.push_back(s);
    result.trials.insert(result.trials.end(), rows.begin(), rows.end());
  }
  return result;
}

std::vector<double> default_kappa_grid(int points) {
  if (points < 2) throw std::invalid_argument("default_kappa_grid: need at least 2 points");
  const int log_points = std::max(1, points / 4);
  const int lin_points = points - log_points;
  std::vector<double> grid;
  const double a = std::log(0.05);
  const double b = std::log(0.2);
  for (int i = 0; i < log_points; ++i) grid.push_back(std::exp(a + (b - a) * i / log_points));
  for (int i = 0; i < lin_points; ++i)
    grid.push_back(lin_points == 1 ? 0.2 : 0.2 + (0.95 - 0.2) * i / (lin_points - 1));
  return grid;
}

std::vector<SweepRow> kappa_sweep(const ExperimentConfig& cfg, std::span<const double> grid) {
  cfg.validate();
  std::vector<double> default_grid;
  if (grid.empty()) {
    default_grid = default_kappa_grid(cfg.kappa_points);
    grid = default_grid;
  }
  const Scenario scenario = make_scenario(cfg, cfg.sys);
  const SystemConfig& sys = scenario.sys;
  const PowerModel pm = PowerModel::from(sys);
  const double rate = normalized_rate_requirement(sys);
  const long total = sys.total_slots();
  const auto slots = snap_to_slots(grid, total);

  // psi[trial][i]
  std::vector<std::vector<double>> psi(cfg.n_trials, std::vector<double>(slots.size()));
  parallel_for(cfg.n_trials, cfg.workers, [&](long trial) {
    const RankedGains ranked(scenario.trial_trace(cfg.seed, trial).equivalent_gain_per_slot);
    for (std::size_t i = 0; i < slots.size(); ++i)
      psi[trial][i] = ranked.transmit_power_sum(slots[i], rate) / static_cast<double>(total);
  });

  const LargeScaleEstimator est(GainDistribution(scenario.true_alphas, sys.n_antennas, sys.noise_power_w),
                                static_cast<double>(total), rate);
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double kappa = static_cast<double>(slots[i]) / static_cast<double>(total);
    const double circuit = kappa * (pm.p_active_w - pm.p_sleep_w) + pm.p_sleep_w;
    std::vector<double> psi_i, omega_i;
    for (const auto& per_trial : psi) {
      psi_i.push_back(per_trial[i]);
      omega_i.push_back(per_trial[i] / pm.pa_efficiency + circuit);
    }
    const auto e = est.estimates(kappa, pm);
    const auto omega_ms = mean_sd(omega_i);
    rows.push_back({kappa, e.mu_omega, omega_ms.mean, omega_ms.sd, e.mu_psi_p, mean_sd(psi_i).mean,
                    e.case2_clamped});
  }
  return rows;
}

std::vector<ParamRow> param_stats(const ExperimentConfig& cfg, std::span<const double> grid) {
  cfg.validate();
  std::vector<double> default_grid;
  if (grid.empty()) {
    default_grid = default_kappa_grid(cfg.kappa_points);
    grid = default_grid;
  }
  const Scenario scenario = make_scenario(cfg, cfg.sys);
  const SystemConfig& sys = scenario.sys;
  const double rate = normalized_rate_requirement(sys);
  const long total = sys.total_slots();
  const auto slots = snap_to_slots(grid, total);

  std::vector<std::vector<double>> gth(cfg.n_trials, std::vector<double>(slots.size()));
  std::vector<std::vector<double>> nu(cfg.n_trials, std::vector<double>(slots.size()));
  parallel_for(cfg.n_trials, cfg.workers, [&](long trial) {
    const RankedGains ranked(scenario.trial_trace(cfg.seed, trial).equivalent_gain_per_slot);
    const long l_max = ranked.max_positive(rate);
    for (std::size_t i = 0; i < slots.size(); ++i) {
      gth[trial][i] = ranked.gain(slots[i] - 1);
      nu[trial][i] = std::exp(ranked.log_water_level(std::min(slots[i], l_max), rate));
    }
  });

  const LargeScaleEstimator est(GainDistribution(scenario.true_alphas, sys.n_antennas, sys.noise_power_w),
                                static_cast<double>(total), rate);
  std::vector<ParamRow> rows;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double kappa = static_cast<double>(slots[i]) / static_cast<double>(total);
    std::vector<double> g_i, nu_i;
    for (long t = 0; t < cfg.n_trials; ++t) {
      g_i.push_back(gth[t][i]);
      nu_i.push_back(nu[t][i]);
    }
    const auto th = est.threshold_stats(kappa);
    const auto ns = est.nu_stats(kappa);
    const auto g_ms = mean_sd(g_i);
    const auto nu_ms = mean_sd(nu_i);
    rows.push_back({kappa, th.mean, th.sd, g_ms.mean, g_ms.sd, ns.mean, ns.sd, nu_ms.mean, nu_ms.sd});
  }
  return rows;
}

EnergyCompareResult energy_compare(const ExperimentConfig& cfg) {
  cfg.validate();
  EnergyCompareResult result;
  for (int frames : cfg.deadline_frames) {
    ExperimentConfig c = cfg;
    c.sys.frames = frames;
    const auto records = run_trials(c);
    std::vector<std::string> order;
    for (const auto& r : records) {
      if (r.trial_id != 0) break;
      order.push_back(r.method);
    }
    for (const auto& method : order) {
      double energy = 0.0;
      long met = 0;
      long count = 0;
      for (const auto& r : records) {
        if (r.method != method) continue;
        energy += r.energy_j;
        met += r.deadline_met ? 1 : 0;
        ++count;
      }
      result.rows.push_back({frames, method, energy / static_cast<double>(count),
                             static_cast<double>(met) / static_cast<double>(count)});
    }
    result.records.insert(result.records.end(), records.begin(), records.end());
  }
  return result;
}

CsvTable to_csv(std::span<const TrialRecord> records) {
  CsvTable t;
  t.header = {"deadline_frames", "trial_id", "method", "energy_j", "deadline_met",
              "overtime_slots", "nu", "g_th", "kappa", "trace_hash"};
  for (const auto& r : records)
    t.rows.push_back({std::to_string(r.deadline_frames), std::to_string(r.trial_id), r.method,
                      format_number(r.energy_j), r.deadline_met ? "1" : "0",
                      std::to_string(r.overtime_slots), format_number(r.nu), format_number(r.g_th),
                      format_number(r.kappa), std::to_string(r.trace_hash)});
  return t;
}

CsvTable to_csv(std::span<const Table1Trial> trials) {
  CsvTable t;
  t.header = {"slots_per_frame", "trial_id", "kappa_star", "nu_star", "g_th_star",
              "mu_nu", "mu_gth", "nu_deviation", "gth_deviation"};
  for (const auto& r : trials)
    t.rows.push_back({std::to_string(r.slots_per_frame), std::to_string(r.trial_id),
                      format_number(r.kappa_star), format_number(r.nu_star),
                      format_number(r.g_th_star), format_number(r.mu_nu), format_number(r.mu_gth),
                      format_number(r.nu_deviation), format_number(r.gth_deviation)});
  return t;
}

CsvTable to_csv(std::span<const Table1Summary> summary) {
  CsvTable t;
  t.header = {"slots_per_frame", "trials", "max_nu_deviation", "max_gth_deviation",
              "median_nu_deviation", "median_gth_deviation", "mean_nu_deviation",
              "mean_gth_deviation", "nu_star_mean", "nu_star_sd", "gth_star_sd"};
  for (const auto& s : summary)
    t.rows.push_back({std::to_string(s.slots_per_frame), std::to_string(s.trials),
                      format_number(s.max_nu_deviation), format_number(s.max_gth_deviation),
                      format_number(s.median_nu_deviation), format_number(s.median_gth_deviation),
                      format_number(s.mean_nu_deviation), format_number(s.mean_gth_deviation),
                      format_number(s.nu_star_mean), format_number(s.nu_star_sd),
                      format_number(s.gth_star_sd)});
  return t;
}

CsvTable to_csv(std::span<const SweepRow> rows) {
  CsvTable t;
  t.header = {"kappa", "mu_omega", "simulated_omega_mean", "simulated_omega_std",
              "mu_psi_p", "simulated_psi_mean", "case2_clamped"};
  for (const auto& r : rows)
    t.rows.push_back({format_number(r.kappa), format_number(r.mu_omega),
                      format_number(r.simulated_omega_mean), format_number(r.simulated_omega_std),
                      format_number(r.mu_psi_p), format_number(r.simulated_psi_mean),
                      r.case2_clamped ? "1" : "0"});
  return t;
}

CsvTable to_csv(std::span<const ParamRow> rows) {
  CsvTable t;
  t.header = {"kappa", "mu_gth", "sigma_gth", "simulated_gth_mean", "simulated_gth_std",
              "mu_nu", "sigma_nu", "simulated_nu_mean", "simulated_nu_std"};
  for (const auto& r : rows)
    t.rows.push_back({format_number(r.kappa), format_number(r.mu_gth), format_number(r.sigma_gth),
                      format_number(r.simulated_gth_mean), format_number(r.simulated_gth_std),
                      format_number(r.mu_nu), format_number(r.sigma_nu),
                      format_number(r.simulated_nu_mean), format_number(r.simulated_nu_std)});
  return t;
}

CsvTable to_csv(std::span<const CompareRow> rows) {
  CsvTable t;
  t.header = {"deadline_frames", "method", "mean_energy_j", "completion_rate"};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.deadline_frames), r.method, format_number(r.mean_energy_j),
                      format_number(r.completion_rate)});
  return t;
}

}  // namespace pra
