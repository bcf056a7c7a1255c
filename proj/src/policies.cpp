#include "pra/policies.hpp"

#include "pra/errors.hpp"
#include "pra/offline_optimizer.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pra {

namespace {

// Residual below this fraction of the file counts as delivered.
constexpr double kCompletionTolerance = 1e-9;
constexpr long kMaxOvertimeSlots = 100'000'000;

struct SlotDecision {
  bool active = false;
  double power_w = 0.0;
};

double bits_per_nat(const SystemConfig& sys) {
  return sys.bandwidth_hz * sys.slot_duration_s / std::numbers::ln2;
}

template <class Rule>
PolicyOutcome run_online(OnlineChannel& channel, const SystemConfig& sys, bool keep_log, Rule rule) {
  const PowerModel pm = PowerModel::from(sys);
  const double required = normalized_rate_requirement(sys);
  const double tolerance = kCompletionTolerance * required;
  double residual = required;
  long double energy = 0.0L;

  PolicyOutcome out;
  for (long t = 0; t < channel.deadline(); ++t) {
    if (residual <= tolerance) {
      energy += pm.p_sleep_w * pm.slot_duration_s;
      continue;
    }
    const double g = channel.next();
    SlotDecision d = rule(g);
    d.power_w = std::min(d.power_w, sys.max_tx_power_w);
    double rate = d.active ? std::log1p(g * d.power_w) : 0.0;
    if (rate >= residual) {
      d.power_w = std::expm1(residual) / g;
      rate = residual;
    }
    residual -= rate;
    if (d.active) ++out.slots_used;
    energy += pm.slot_power(d.power_w, d.active) * pm.slot_duration_s;
    if (keep_log) out.per_slot_log.push_back({t, d.active, d.power_w, rate});
  }

  out.deadline_met = residual <= tolerance;
  if (!out.deadline_met) {
    const auto fb = max_power_fallback([&] { return channel.next(); }, residual * bits_per_nat(sys),
                                       sys, keep_log ? &out.per_slot_log : nullptr, channel.deadline());
    energy += fb.energy_j;
    out.overtime_slots = fb.overtime_slots;
    out.slots_used += fb.overtime_slots;
  }
  out.energy_j = static_cast<double>(energy);
  out.bits_delivered = sys.file_bits;
  return out;
}

}  // namespace

OnlineChannel::OnlineChannel(const ChannelTrace& trace, const SystemConfig& sys,
                             std::uint64_t extension_seed)
    : trace_(&trace),
      last_scale_(trace.large_scale_per_frame.back() / sys.noise_power_w),
      extension_rng_(extension_seed),
      fade_(static_cast<double>(sys.n_antennas), 1.0) {}

double OnlineChannel::next() {
  const long t = next_slot_++;
  if (t < trace_->size()) return trace_->equivalent_gain_per_slot[t];
  return last_scale_ * fade_(extension_rng_);
}

FallbackResult max_power_fallback(const std::function<double()>& next_gain, double residual_bits,
                                  const SystemConfig& sys, std::vector<SlotRecord>* log,
                                  long first_slot) {
  FallbackResult out;
  const PowerModel pm = PowerModel::from(sys);
  const double per_nat = bits_per_nat(sys);
  const double tolerance = kCompletionTolerance * sys.file_bits / per_nat;
  double residual = residual_bits / per_nat;
  long double energy = 0.0L;
  while (residual > tolerance) {
    if (out.overtime_slots >= kMaxOvertimeSlots)
      throw NumericalError("max_power_fallback: residual not delivered within slot budget");
    const double g = next_gain();
    double p = sys.max_tx_power_w;
    double rate = std::log1p(g * p);
    if (rate >= residual) {
      p = std::expm1(residual) / g;
      rate = residual;
    }
    residual -= rate;
    energy += pm.slot_power(p, true) * pm.slot_duration_s;
    if (log) log->push_back({first_slot + out.overtime_slots, true, p, rate});
    ++out.overtime_slots;
  }
  out.energy_j = static_cast<double>(energy);
  return out;
}

PolicyOutcome run_threshold_waterfill(OnlineChannel& channel, double nu, double g_th,
                                      const SystemConfig& sys, bool keep_log) {
  if (!(nu > 0.0)) throw std::invalid_argument("run_threshold_waterfill: nu must be positive");
  if (!(g_th >= 0.0)) throw std::invalid_argument("run_threshold_waterfill: negative threshold");
  return run_online(channel, sys, keep_log, [&](double g) {
    SlotDecision d;
    d.active = g >= g_th;
    if (d.active && g * nu >= 1.0) d.power_w = nu - 1.0 / g;
    return d;
  });
}

PolicyOutcome run_se_policy(OnlineChannel& channel, const SystemConfig& sys, bool keep_log) {
  return run_online(channel, sys, keep_log,
                    [&](double) { return SlotDecision{true, sys.max_tx_power_w}; });
}

double ee_optimal_power(double g, const SystemConfig& sys) {
  if (!(g > 0.0)) throw std::invalid_argument("ee_optimal_power: gain must be positive");
  const double xi = sys.pa_efficiency;
  const double p_max = sys.max_tx_power_w;
  // Stationarity of the ratio; strictly decreasing in p with value g xi p_act at 0.
  const auto stationarity = [&](double p) {
    return g * xi * (p / xi + sys.p_active_w) / (1.0 + g * p) - std::log1p(g * p);
  };
  if (sys.p_active_w <= 0.0) return 0.0;
  if (stationarity(p_max) >= 0.0) return p_max;
  const auto [a, b] = boost::math::tools::bisect(
      stationarity, 0.0, p_max, [](double lo, double hi) { return hi - lo <= 1e-9 * std::max(1.0, hi); });
  return 0.5 * (a + b);
}

PolicyOutcome run_ee_policy(OnlineChannel& channel, const SystemConfig& sys, bool keep_log) {
  return run_online(channel, sys, keep_log, [&](double g) {
    const double p = ee_optimal_power(g, sys);
    return SlotDecision{p > 0.0, p};
  });
}

}  // namespace pra
