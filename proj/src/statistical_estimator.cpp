#include "pra/statistical_estimator.hpp"

#include "pra/errors.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pra {

namespace {

constexpr double kBracketLo = 1e-12;
constexpr double kBracketHi = 1.0 - 1e-12;
constexpr int kMaxGridPoints = 1000;

void require_open_unit(double kappa, const char* who) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument(std::string(who) + ": kappa must lie in (0, 1)");
}

}  // namespace

LargeScaleEstimator::LargeScaleEstimator(GainDistribution dist, double total_slots,
                                         double rate_nats)
    : dist_(std::move(dist)), total_slots_(total_slots), rate_nats_(rate_nats) {
  if (!(total_slots_ >= 1.0)) throw std::invalid_argument("LargeScaleEstimator: T must be >= 1");
  if (!(rate_nats_ >= 0.0)) throw std::invalid_argument("LargeScaleEstimator: negative rate");
  boundary_ = find_boundary();
}

LargeScaleEstimator::LogLevel LargeScaleEstimator::log_level(double kappa) const {
  const auto m = dist_.truncated_log_moments(kappa);
  const double n = total_slots_ * kappa;
  return {rate_nats_ / n - m.mean, m.variance / n, m.mean};
}

double LargeScaleEstimator::find_boundary() const {
  // ln(median nu) + ln q crosses zero exactly once, from above.
  const auto excess = [&](double kappa) {
    return log_level(kappa).location + std::log(dist_.quantile(kappa));
  };
  if (excess(kBracketLo) <= 0.0) return kBracketLo;
  if (excess(kBracketHi) >= 0.0) return 1.0;
  const auto [a, b] = boost::math::tools::bisect(excess, kBracketLo, kBracketHi,
                                                 boost::math::tools::eps_tolerance<double>(44));
  if (!(b - a < 1e-9)) throw NumericalError("LargeScaleEstimator: boundary bisection failed");
  return 0.5 * (a + b);
}

ThresholdStats LargeScaleEstimator::threshold_stats(double kappa) const {
  require_open_unit(kappa, "threshold_stats");
  ThresholdStats s;
  s.mean = dist_.quantile(kappa);
  const double density = dist_.pdf(s.mean);
  if (!(density > 0.0))
    throw NumericalError("threshold_stats: zero density at the quantile (degenerate law)");
  s.sd = std::sqrt(kappa * (1.0 - kappa) / (total_slots_ * density * density));
  return s;
}

NuStats LargeScaleEstimator::nu_stats(double kappa) const {
  require_open_unit(kappa, "nu_stats");
  NuStats s;
  s.case2_clamped = kappa > boundary_;
  s.effective_kappa = s.case2_clamped ? boundary_ : kappa;
  const auto level = log_level(s.effective_kappa);
  s.log_mean = level.location;
  s.log_sd = std::sqrt(level.variance);
  s.tail_log_mean = level.tail_log_mean;
  s.mean = std::exp(level.location + 0.5 * level.variance);
  s.sd = s.mean * std::sqrt(std::expm1(level.variance));
  return s;
}

double LargeScaleEstimator::mean_transmit_power(double kappa) const {
  if (kappa == 0.0 && rate_nats_ == 0.0) return 0.0;
  const auto nu = nu_stats(kappa);
  const double k = nu.effective_kappa;
  return k * nu.mean - k * dist_.truncated_inv_moment(k);
}

double LargeScaleEstimator::mean_total_power(double kappa, const PowerModel& pm) const {
  return mean_transmit_power(kappa) / pm.pa_efficiency + kappa * (pm.p_active_w - pm.p_sleep_w) +
         pm.p_sleep_w;
}

KappaEstimates LargeScaleEstimator::estimates(double kappa, const PowerModel& pm) const {
  KappaEstimates e;
  e.kappa = kappa;
  const auto th = threshold_stats(kappa);
  e.mu_gth = th.mean;
  e.sigma_gth = th.sd;
  const auto nu = nu_stats(kappa);
  e.mu_phi = nu.tail_log_mean;
  e.sigma_phi = nu.log_sd;
  e.mu_nu = nu.mean;
  e.sigma_nu = nu.sd;
  e.mu_g_inv = dist_.truncated_inv_moment(nu.effective_kappa);
  e.mu_psi_p = nu.effective_kappa * (nu.mean - e.mu_g_inv);
  e.mu_omega = e.mu_psi_p / pm.pa_efficiency + kappa * (pm.p_active_w - pm.p_sleep_w) + pm.p_sleep_w;
  e.case2_clamped = nu.case2_clamped;
  return e;
}

double LargeScaleEstimator::optimize_kappa(const PowerModel& pm) const {
  const double lo = 1.0 / total_slots_;
  const double hi = 1.0 - 1.0 / total_slots_;
  if (!(hi > lo)) return lo;

  std::vector<double> grid;
  if (total_slots_ - 1.0 <= kMaxGridPoints) {
    for (double n = 1.0; n <= total_slots_ - 1.0; n += 1.0) grid.push_back(n / total_slots_);
  } else {
    for (int i = 0; i < kMaxGridPoints; ++i)
      grid.push_back(lo + (hi - lo) * i / (kMaxGridPoints - 1));
  }

  const auto omega = [&](double kappa) {
    const double v = mean_total_power(kappa, pm);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = omega(grid[i]);
    if (v <= best_value) {
      best_value = v;
      best = i;
    }
  }
  if (grid.size() < 3) return grid[best];

  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[best + 1 < grid.size() ? best + 1 : best];
  std::uintmax_t iters = 200;
  const auto [x, fx] = boost::math::tools::brent_find_minima(omega, a, b, 20, iters);
  return fx < best_value ? x : grid[best];
}

ConservativePlan LargeScaleEstimator::conservative_estimates(double kappa_star) const {
  ConservativePlan plan;
  plan.kappa_star = kappa_star;
  const auto th = threshold_stats(kappa_star);
  const auto nu = nu_stats(kappa_star);
  plan.g_th_hat = std::max(0.0, th.mean - 2.0 * th.sd);
  plan.nu_hat = std::exp(nu.log_mean + 2.0 * nu.log_sd);
  return plan;
}

}  // namespace pra
