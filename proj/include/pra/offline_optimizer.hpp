#pragma once

#include "pra/channel_model.hpp"

#include <span>
#include <vector>

namespace pra {

/// BS supply-power model: p_tot = p / xi + m (p_act - p_sle) + p_sle.
struct PowerModel {
  double pa_efficiency = 1.0;
  double p_active_w = 0.0;
  double p_sleep_w = 0.0;
  double slot_duration_s = 1.0;

  static PowerModel from(const SystemConfig& sys);

  double slot_power(double tx_power_w, bool active) const {
    return tx_power_w / pa_efficiency + (active ? p_active_w - p_sleep_w : 0.0) + p_sleep_w;
  }
};

/// File size expressed in per-slot nats: B ln 2 / (W dt). Each slot contributes
/// ln(1 + g p) toward this total.
double normalized_rate_requirement(const SystemConfig& sys);

struct WaterFillResult {
  double water_level = 0.0;
  std::vector<double> powers;  // aligned with the input gains
  long n_positive = 0;
};

/// Minimum-power allocation delivering `rate_nats` over the given slots.
/// Slots whose gain falls below 1 / water_level are dropped, weakest first.
WaterFillResult water_fill(std::span<const double> gains, double rate_nats);

struct AllocationSolution {
  long n_active = 0;
  double active_ratio = 0.0;
  double threshold = 0.0;
  double water_level = 0.0;
  long n_positive_power = 0;
  std::vector<double> powers_w;
  std::vector<bool> schedule;
  double total_energy_j = 0.0;
};

/// Gains of one trace ranked in descending order (ties by lowest slot index),
/// with compensated prefix sums of ln g and 1/g over the ranking.
class RankedGains {
public:
  explicit RankedGains(std::span<const double> gains);

  long size() const { return static_cast<long>(sorted_.size()); }
  /// rank 0 is the largest gain.
  double gain(long rank) const { return sorted_[rank]; }
  long slot(long rank) const { return order_[rank]; }

  /// Largest L such that water-filling over the top-L gains gives every one of
  /// them positive power. Water-filling over the top n uses min(n, L) slots.
  long max_positive(double rate_nats) const;
  double log_water_level(long n_positive, double rate_nats) const;
  /// Sum of transmit powers when the top-n gains are scheduled.
  double transmit_power_sum(long n, double rate_nats) const;

private:
  std::vector<double> sorted_;
  std::vector<long> order_;
  std::vector<long double> log_prefix_;  // log_prefix_[k] = sum of ln g over ranks < k
  std::vector<long double> inv_prefix_;
};

/// Schedule the n strongest slots and water-fill over them.
AllocationSolution solve_given_n(const RankedGains& ranked, long n, double rate_nats,
                                 const PowerModel& pm);

/// Exhaustive sweep over n = 1..T; lowest n wins ties.
AllocationSolution optimize(const RankedGains& ranked, double rate_nats, const PowerModel& pm);
AllocationSolution optimize(std::span<const double> gains, double rate_nats, const PowerModel& pm);

/// Supply energy of a plan over its whole window, in joules.
double total_energy(const AllocationSolution& solution, const PowerModel& pm);

}  // namespace pra
