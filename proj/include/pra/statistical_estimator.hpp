#pragma once

#include "pra/gain_distribution.hpp"
#include "pra/offline_optimizer.hpp"

namespace pra {

struct ThresholdStats {
  double mean = 0.0;
  double sd = 0.0;
};

/// Log-normal description of the water-filling level at a given active ratio.
struct NuStats {
  double mean = 0.0;
  double sd = 0.0;
  double log_mean = 0.0;  // location of ln nu
  double log_sd = 0.0;
  double tail_log_mean = 0.0;  // E[ln G | G >= q] at effective_kappa
  bool case2_clamped = false;
  double effective_kappa = 0.0;  // kappa at which the statistics were evaluated
};

struct KappaEstimates {
  double kappa = 0.0;
  double mu_gth = 0.0;
  double sigma_gth = 0.0;
  double mu_phi = 0.0;
  double sigma_phi = 0.0;
  double mu_nu = 0.0;
  double sigma_nu = 0.0;
  double mu_g_inv = 0.0;
  double mu_psi_p = 0.0;
  double mu_omega = 0.0;
  bool case2_clamped = false;
};

/// Threshold and water level shifted by two standard deviations so that the
/// file completes before the deadline with probability about 0.975^2.
struct ConservativePlan {
  double kappa_star = 0.0;
  double g_th_hat = 0.0;
  double nu_hat = 0.0;
  double target_completion_prob = 0.975 * 0.975;
};

/// Statistics of the optimal plan predicted from large-scale gains alone.
///
/// For a fixed active ratio kappa the threshold is asymptotically normal around
/// the (1 - kappa)-quantile of the pooled gain law, and the water level is
/// log-normal with location R/(T kappa) - E[ln G | tail] and variance
/// Var[ln G | tail] / (T kappa). Once the water level times the threshold drops
/// below one (weak scheduled slots would get zero power), the statistics freeze
/// at the boundary ratio where that product equals one.
class LargeScaleEstimator {
public:
  /// `total_slots` is a real so the T -> infinity limits can be probed directly.
  LargeScaleEstimator(GainDistribution dist, double total_slots, double rate_nats);

  const GainDistribution& distribution() const { return dist_; }
  double total_slots() const { return total_slots_; }
  double rate_nats() const { return rate_nats_; }

  /// Active ratio beyond which the water level no longer changes with kappa.
  double case2_boundary() const { return boundary_; }

  ThresholdStats threshold_stats(double kappa) const;
  NuStats nu_stats(double kappa) const;
  /// Mean transmit power per slot.
  double mean_transmit_power(double kappa) const;
  /// Mean supply power per slot.
  double mean_total_power(double kappa, const PowerModel& pm) const;
  KappaEstimates estimates(double kappa, const PowerModel& pm) const;

  /// Minimizer of mean_total_power over [1/T, 1 - 1/T]: grid scan then Brent
  /// refinement around the best grid point. Flat minima resolve to larger kappa.
  double optimize_kappa(const PowerModel& pm) const;

  ConservativePlan conservative_estimates(double kappa_star) const;

private:
  struct LogLevel {
    double location = 0.0;
    double variance = 0.0;
    double tail_log_mean = 0.0;
  };
  LogLevel log_level(double kappa) const;
  double find_boundary() const;

  GainDistribution dist_;
  double total_slots_;
  double rate_nats_;
  double boundary_;
};

}  // namespace pra
