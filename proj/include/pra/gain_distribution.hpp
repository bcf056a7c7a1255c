#pragma once

#include <functional>
#include <span>
#include <vector>

namespace pra {

/// Conditional statistics of ln G on the upper tail {G >= quantile(kappa)}.
struct TruncatedLogMoments {
  double mean = 0.0;      // E[ln G | G >= q]
  double variance = 0.0;  // Var[ln G | G >= q]
};

/// Law of the equivalent channel gain pooled over a trajectory: an equal-weight
/// mixture of Gamma(n_antennas, alpha_j / noise) components, one per frame.
///
/// Each component is a normalized Gamma density, so the mixture integrates to 1.
/// Component order is irrelevant; scales are stored sorted, which makes every
/// query bit-identical under permutation of the input gains.
class GainDistribution {
public:
  GainDistribution(std::span<const double> alphas, int n_antennas, double noise_power_w);

  int n_antennas() const { return n_antennas_; }
  std::span<const double> scales() const { return scales_; }

  double pdf(double g) const;
  double cdf(double g) const;
  /// P(G >= g).
  double tail(double g) const;

  /// The (1 - kappa)-quantile, i.e. q with tail(q) = kappa.
  double quantile(double kappa) const;

  TruncatedLogMoments truncated_log_moments(double kappa) const;

  /// E[1/G | G >= quantile(kappa)].
  double truncated_inv_moment(double kappa) const;

  /// Point beyond which the remaining probability mass is below 1e-18.
  double support_limit() const { return support_limit_; }

  /// Integral of weight(g) * pdf(g) over [a, b], adaptive Gauss-Kronrod.
  /// Throws NumericalError when the error estimate exceeds `abs_tol`.
  double integrate(const std::function<double(double)>& weight, double a, double b,
                   double abs_tol = 1e-11) const;

private:
  double integrate_log(const std::function<double(double)>& weight, double a, double b,
                       double abs_tol) const;

  std::vector<double> scales_;  // alpha_j / noise, ascending
  std::vector<double> log_scales_;
  std::vector<double> inv_scales_;
  int n_antennas_;
  double log_gamma_shape_;
  double support_limit_;
};

}  // namespace pra
