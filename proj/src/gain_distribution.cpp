#include "pra/gain_distribution.hpp"

#include "pra/errors.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pra {

namespace {

constexpr double kSupportTail = 1e-18;

void require_kappa(double kappa, const char* who) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    std::ostringstream msg;
    msg << who << ": kappa must lie in (0, 1), got " << kappa;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

GainDistribution::GainDistribution(std::span<const double> alphas, int n_antennas,
                                   double noise_power_w)
    : n_antennas_(n_antennas) {
  if (alphas.empty()) throw std::invalid_argument("GainDistribution: no large-scale gains");
  if (n_antennas < 1) throw std::invalid_argument("GainDistribution: n_antennas must be >= 1");
  if (!(noise_power_w > 0.0)) throw std::invalid_argument("GainDistribution: noise power <= 0");
  scales_.reserve(alphas.size());
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("GainDistribution: large-scale gains must be positive");
    scales_.push_back(a / noise_power_w);
  }
  std::sort(scales_.begin(), scales_.end());
  for (double s : scales_) {
    log_scales_.push_back(std::log(s));
    inv_scales_.push_back(1.0 / s);
  }
  log_gamma_shape_ = std::lgamma(static_cast<double>(n_antennas_));
  support_limit_ =
      scales_.back() * boost::math::gamma_q_inv(static_cast<double>(n_antennas_), kSupportTail);
}

double GainDistribution::pdf(double g) const {
  if (g < 0.0) throw std::invalid_argument("GainDistribution::pdf: negative gain");
  double sum = 0.0;
  if (n_antennas_ == 1) {
    for (std::size_t j = 0; j < scales_.size(); ++j)
      sum += std::exp(-g * inv_scales_[j]) * inv_scales_[j];
  } else {
    if (g == 0.0) return 0.0;
    const double shape_m1 = n_antennas_ - 1.0;
    const double log_g = std::log(g);
    for (std::size_t j = 0; j < scales_.size(); ++j)
      sum += std::exp(shape_m1 * (log_g - log_scales_[j]) - g * inv_scales_[j] -
                      log_gamma_shape_ - log_scales_[j]);
  }
  return sum / static_cast<double>(scales_.size());
}

namespace {

// Regularized upper incomplete gamma for integer shape via the finite Poisson
// sum; falls back to Boost outside the range where the sum is cheap and exact.
double gamma_q_integer(int k, double x) {
  if (k > 32 || x > 600.0) return boost::math::gamma_q(static_cast<double>(k), x);
  double term = 1.0;
  double sum = 1.0;
  for (int i = 1; i < k; ++i) {
    term *= x / i;
    sum += term;
  }
  return std::exp(-x) * sum;
}

double gamma_p_integer(int k, double x) {
  if (k > 32) return boost::math::gamma_p(static_cast<double>(k), x);
  if (x >= 0.5 * k) return 1.0 - gamma_q_integer(k, x);
  // P(k, x) = e^-x x^k / k! * sum_n x^n / ((k+1)...(k+n)), all terms positive.
  double lead = std::exp(-x);
  for (int i = 1; i <= k; ++i) lead *= x / i;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 200 && term > 1e-17 * sum; ++n) {
    term *= x / (k + n);
    sum += term;
  }
  return lead * sum;
}

}  // namespace

double GainDistribution::cdf(double g) const {
  if (g <= 0.0) return 0.0;
  double sum = 0.0;
  for (double inv : inv_scales_) sum += gamma_p_integer(n_antennas_, g * inv);
  return sum / static_cast<double>(scales_.size());
}

double GainDistribution::tail(double g) const {
  if (g <= 0.0) return 1.0;
  double sum = 0.0;
  for (double inv : inv_scales_) sum += gamma_q_integer(n_antennas_, g * inv);
  return sum / static_cast<double>(scales_.size());
}

double GainDistribution::quantile(double kappa) const {
  require_kappa(kappa, "GainDistribution::quantile");
  // Every component shares the standardized quantile z, so the mixture quantile
  // lies between the smallest and largest component quantiles.
  const double z = boost::math::gamma_q_inv(static_cast<double>(n_antennas_), kappa);
  double lo = scales_.front() * z;
  double hi = scales_.back() * z;
  if (lo == hi) return lo;

  const auto excess = [&](double q) { return tail(q) - kappa; };
  const double f_lo = excess(lo);
  const double f_hi = excess(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      excess, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(50), iters);
  if (iters >= 200) throw NumericalError("GainDistribution::quantile: root finder did not converge");
  return 0.5 * (a + b);
}

namespace {

struct QuadratureOutcome {
  double value;
  double error;
  double l1;
};

template <class F>
QuadratureOutcome kronrod(F f, double a, double b) {
  QuadratureOutcome out{0.0, 0.0, 0.0};
  out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-13,
                                                                            &out.error, &out.l1);
  return out;
}

void check_quadrature(const QuadratureOutcome& r, double abs_tol, double a, double b) {
  if (!(r.error <= abs_tol) || !std::isfinite(r.value)) {
    std::ostringstream msg;
    msg << "GainDistribution::integrate: error estimate " << r.error << " exceeds " << abs_tol
        << " on [" << a << ", " << b << "] (L1 norm " << r.l1 << ")";
    throw NumericalError(msg.str());
  }
}

}  // namespace

double GainDistribution::integrate(const std::function<double(double)>& weight, double a,
                                   double b, double abs_tol) const {
  if (!(b > a)) return 0.0;
  const auto r = kronrod([&](double g) { return weight(g) * pdf(g); }, a, b);
  check_quadrature(r, abs_tol, a, b);
  return r.value;
}

// Same integral in u = ln g, which flattens the endpoint behaviour of ln g and
// 1/g weights near a small lower limit. Requires a > 0.
double GainDistribution::integrate_log(const std::function<double(double)>& weight, double a,
                                       double b, double abs_tol) const {
  if (!(b > a)) return 0.0;
  const auto r = kronrod(
      [&](double u) {
        const double g = std::exp(u);
        return weight(g) * pdf(g) * g;
      },
      std::log(a), std::log(b));
  check_quadrature(r, abs_tol, a, b);
  return r.value;
}

TruncatedLogMoments GainDistribution::truncated_log_moments(double kappa) const {
  require_kappa(kappa, "GainDistribution::truncated_log_moments");
  const double q = quantile(kappa);
  if (!(q > 0.0))
    throw NumericalError("GainDistribution::truncated_log_moments: zero threshold");
  const double hi = std::max(support_limit_, 2.0 * q);
  TruncatedLogMoments m;
  m.mean = integrate_log([](double g) { return std::log(g); }, q, hi, 1e-10 * kappa) / kappa;
  // Second pass on the centred square keeps the variance free of cancellation.
  const double mu = m.mean;
  m.variance = integrate_log(
                   [mu](double g) {
                     const double d = std::log(g) - mu;
                     return d * d;
                   },
                   q, hi, 1e-10 * kappa) /
               kappa;
  return m;
}

double GainDistribution::truncated_inv_moment(double kappa) const {
  require_kappa(kappa, "GainDistribution::truncated_inv_moment");
  const double q = quantile(kappa);
  if (!(q > 0.0))
    throw std::domain_error("GainDistribution::truncated_inv_moment: divergent at zero threshold");
  const double hi = std::max(support_limit_, 2.0 * q);
  return integrate_log([](double g) { return 1.0 / g; }, q, hi, 1e-10 * kappa * std::max(1.0, 1.0 / q)) / kappa;
}

}  // namespace pra
