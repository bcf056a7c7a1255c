#pragma once

#include "pra/channel_model.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace pra {

struct SlotRecord {
  long slot = 0;
  bool active = false;
  double power_w = 0.0;
  double rate_nats = 0.0;  // ln(1 + g p), per unit bandwidth-time
};

struct PolicyOutcome {
  double energy_j = 0.0;
  double bits_delivered = 0.0;
  long slots_used = 0;  // active slots, overtime included
  bool deadline_met = false;
  long overtime_slots = 0;
  std::vector<SlotRecord> per_slot_log;  // filled only on request
};

/// Causal view of a trace. `next()` reveals one slot gain at a time; past the
/// deadline it draws fresh Gamma fades on the last frame's large-scale gain.
class OnlineChannel {
public:
  OnlineChannel(const ChannelTrace& trace, const SystemConfig& sys, std::uint64_t extension_seed);

  long deadline() const { return trace_->size(); }
  long slot() const { return next_slot_; }
  double next();

private:
  const ChannelTrace* trace_;
  double last_scale_;
  Rng extension_rng_;
  std::gamma_distribution<double> fade_;
  long next_slot_ = 0;
};

struct FallbackResult {
  double energy_j = 0.0;
  long overtime_slots = 0;
};

/// Post-deadline slots at full power until `residual_bits` are delivered.
/// Logged slots are numbered from `first_slot`.
FallbackResult max_power_fallback(const std::function<double()>& next_gain, double residual_bits,
                                  const SystemConfig& sys, std::vector<SlotRecord>* log = nullptr,
                                  long first_slot = 0);

/// Threshold scheduling with water-filling powers p = nu - 1/g, capped at the
/// BS maximum; stops as soon as the file is through.
PolicyOutcome run_threshold_waterfill(OnlineChannel& channel, double nu, double g_th,
                                      const SystemConfig& sys, bool keep_log = false);

/// Full power in every slot until the file is through.
PolicyOutcome run_se_policy(OnlineChannel& channel, const SystemConfig& sys, bool keep_log = false);

/// Maximizer over [0, p_max] of ln(1 + g p) / (p / xi + p_act).
double ee_optimal_power(double g, const SystemConfig& sys);

PolicyOutcome run_ee_policy(OnlineChannel& channel, const SystemConfig& sys, bool keep_log = false);

}  // namespace pra
