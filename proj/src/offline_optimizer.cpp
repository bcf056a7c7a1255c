#include "pra/offline_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace pra {

PowerModel PowerModel::from(const SystemConfig& sys) {
  return {sys.pa_efficiency, sys.p_active_w, sys.p_sleep_w, sys.slot_duration_s};
}

double normalized_rate_requirement(const SystemConfig& sys) {
  return sys.file_bits * std::numbers::ln2 / (sys.bandwidth_hz * sys.slot_duration_s);
}

namespace {

void check_gains(std::span<const double> gains, const char* who) {
  if (gains.empty()) throw std::invalid_argument(std::string(who) + ": empty gain set");
  for (double g : gains)
    if (!(g > 0.0) || !std::isfinite(g))
      throw std::invalid_argument(std::string(who) + ": gains must be positive and finite");
}

std::vector<long> descending_order(std::span<const double> gains) {
  std::vector<long> order(gains.size());
  std::iota(order.begin(), order.end(), 0L);
  std::stable_sort(order.begin(), order.end(),
                   [&](long a, long b) { return gains[a] > gains[b]; });
  return order;
}

}  // namespace

WaterFillResult water_fill(std::span<const double> gains, double rate_nats) {
  check_gains(gains, "water_fill");
  if (!(rate_nats > 0.0)) throw std::invalid_argument("water_fill: rate must be positive");

  const auto order = descending_order(gains);
  long included = static_cast<long>(gains.size());
  long double log_sum = 0.0L;
  for (long i : order) log_sum += std::log(static_cast<long double>(gains[i]));

  long double log_nu = (rate_nats - log_sum) / included;
  // nu <= 1/g  <=>  ln nu + ln g <= 0
  while (included > 1 && log_nu + std::log(static_cast<long double>(gains[order[included - 1]])) <= 0.0L) {
    log_sum -= std::log(static_cast<long double>(gains[order[included - 1]]));
    --included;
    log_nu = (rate_nats - log_sum) / included;
  }

  WaterFillResult out;
  out.water_level = static_cast<double>(std::exp(log_nu));
  out.n_positive = included;
  out.powers.assign(gains.size(), 0.0);
  for (long r = 0; r < included; ++r) {
    const long i = order[r];
    out.powers[i] = std::max(out.water_level - 1.0 / gains[i], 0.0);
  }
  return out;
}

RankedGains::RankedGains(std::span<const double> gains) {
  check_gains(gains, "RankedGains");
  order_ = descending_order(gains);
  sorted_.reserve(gains.size());
  log_prefix_.assign(gains.size() + 1, 0.0L);
  inv_prefix_.assign(gains.size() + 1, 0.0L);
  for (std::size_t r = 0; r < order_.size(); ++r) {
    const double g = gains[order_[r]];
    sorted_.push_back(g);
    log_prefix_[r + 1] = log_prefix_[r] + std::log(static_cast<long double>(g));
    inv_prefix_[r + 1] = inv_prefix_[r] + 1.0L / g;
  }
}

long RankedGains::max_positive(double rate_nats) const {
  // L is valid iff rate > sum_{i<L} (ln g_i - ln g_{L-1}); the right side is
  // non-decreasing in L, so the valid set is a prefix and can be bisected.
  const auto valid = [&](long l) {
    const long double gap =
        log_prefix_[l] - static_cast<long double>(l) * std::log(static_cast<long double>(sorted_[l - 1]));
    return static_cast<long double>(rate_nats) > gap;
  };
  long lo = 1;  // always valid for a positive rate
  long hi = size();
  if (valid(hi)) return hi;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (valid(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double RankedGains::log_water_level(long n_positive, double rate_nats) const {
  return static_cast<double>((static_cast<long double>(rate_nats) - log_prefix_[n_positive]) /
                             static_cast<long double>(n_positive));
}

double RankedGains::transmit_power_sum(long n, double rate_nats) const {
  const long l = std::min(n, max_positive(rate_nats));
  const double nu = std::exp(log_water_level(l, rate_nats));
  return static_cast<double>(static_cast<long double>(l) * nu - inv_prefix_[l]);
}

AllocationSolution solve_given_n(const RankedGains& ranked, long n, double rate_nats,
                                 const PowerModel& pm) {
  const long total = ranked.size();
  if (n < 1 || n > total) throw std::invalid_argument("solve_given_n: n must lie in [1, T]");
  if (!(rate_nats > 0.0)) throw std::invalid_argument("solve_given_n: rate must be positive");

  const long l = std::min(n, ranked.max_positive(rate_nats));
  AllocationSolution s;
  s.n_active = n;
  s.active_ratio = static_cast<double>(n) / static_cast<double>(total);
  s.threshold = ranked.gain(n - 1);
  s.water_level = std::exp(ranked.log_water_level(l, rate_nats));
  s.n_positive_power = l;
  s.powers_w.assign(total, 0.0);
  s.schedule.assign(total, false);
  for (long r = 0; r < n; ++r) {
    const long t = ranked.slot(r);
    s.schedule[t] = true;
    if (r < l) s.powers_w[t] = std::max(s.water_level - 1.0 / ranked.gain(r), 0.0);
  }
  s.total_energy_j = total_energy(s, pm);
  return s;
}

AllocationSolution optimize(const RankedGains& ranked, double rate_nats, const PowerModel& pm) {
  const long total = ranked.size();
  const long l_max = ranked.max_positive(rate_nats);
  const double circuit = pm.p_active_w - pm.p_sleep_w;

  long best_n = total;
  double best_energy = std::numeric_limits<double>::infinity();
  for (long n = 1; n <= total; ++n) {
    const long l = std::min(n, l_max);
    const double tx = ranked.transmit_power_sum(l, rate_nats);
    const double energy = (tx / pm.pa_efficiency + static_cast<double>(n) * circuit) * pm.slot_duration_s;
    if (energy < best_energy) {
      best_energy = energy;
      best_n = n;
    }
  }
  return solve_given_n(ranked, best_n, rate_nats, pm);
}

AllocationSolution optimize(std::span<const double> gains, double rate_nats, const PowerModel& pm) {
  return optimize(RankedGains(gains), rate_nats, pm);
}

double total_energy(const AllocationSolution& solution, const PowerModel& pm) {
  long double joules = 0.0L;
  for (std::size_t t = 0; t < solution.powers_w.size(); ++t)
    joules += pm.slot_power(solution.powers_w[t], solution.schedule[t]);
  return static_cast<double>(joules * pm.slot_duration_s);
}

}  // namespace pra
