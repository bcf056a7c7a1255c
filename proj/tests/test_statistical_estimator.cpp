#include "pra/channel_model.hpp"
#include "pra/offline_optimizer.hpp"
#include "pra/statistical_estimator.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace pra;

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

std::vector<double> drive_by_alphas() {
  std::vector<double> a;
  for (int j = 0; j < 60; ++j) a.push_back(path_loss_gain(150.0 + 4.0 * j));
  return a;
}

// Estimator with the default system constants on a short drive-by.
LargeScaleEstimator default_estimator(double total_slots = 12000.0) {
  SystemConfig sys;
  return LargeScaleEstimator(GainDistribution(drive_by_alphas(), sys.n_antennas, sys.noise_power_w),
                             total_slots, normalized_rate_requirement(sys));
}

LargeScaleEstimator exponential_estimator(double total_slots, double rate) {
  return LargeScaleEstimator(GainDistribution(std::vector<double>{1.0}, 1, 1.0), total_slots, rate);
}

}  // namespace

TEST_CASE("threshold statistics") {
  const auto est = exponential_estimator(100.0, 1.0);
  const auto s = est.threshold_stats(0.5);
  CHECK(s.mean == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(s.sd == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(exponential_estimator(400.0, 1.0).threshold_stats(0.5).sd == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(exponential_estimator(1e16, 1.0).threshold_stats(0.5).sd < 1e-6);
  CHECK_THROWS_AS(est.threshold_stats(0.0), std::invalid_argument);
  CHECK_THROWS_AS(est.threshold_stats(1.0), std::invalid_argument);
}

TEST_CASE("water-level statistics") {
  SUBCASE("log-normal location and mean") {
    const auto est = default_estimator();
    for (double kappa : {0.05, 0.1, 0.2, 0.4}) {
      const auto nu = est.nu_stats(kappa);
      CAPTURE(kappa);
      REQUIRE_FALSE(nu.case2_clamped);
      CHECK(nu.log_mean == doctest::Approx(est.rate_nats() / (12000.0 * kappa) - nu.tail_log_mean).epsilon(1e-14));
      CHECK(nu.mean >= std::exp(nu.log_mean));
      CHECK(nu.sd >= 0.0);
      CHECK(nu.log_sd >= 0.0);
    }
  }
  SUBCASE("spread vanishes with T") {
    double prev_nu = 1e300, prev_phi = 1e300, prev_g = 1e300;
    // Two nats per slot keeps kappa = 0.3 away from the clamp region.
    for (double t : {1e3, 1e5, 1e7, 1e9}) {
      const auto est = exponential_estimator(t, 2.0 * t);
      const auto e = est.estimates(0.3, PowerModel{});
      CHECK(e.sigma_nu < prev_nu);
      CHECK(e.sigma_phi < prev_phi);
      CHECK(e.sigma_gth < prev_g);
      prev_nu = e.sigma_nu;
      prev_phi = e.sigma_phi;
      prev_g = e.sigma_gth;
    }
    const auto limit = exponential_estimator(1e12, 2e12).nu_stats(0.3);
    REQUIRE_FALSE(limit.case2_clamped);
    CHECK(limit.mean == doctest::Approx(std::exp(2.0 / 0.3 - limit.tail_log_mean)).epsilon(1e-5));
  }
  SUBCASE("untruncated exponential law") {
    // A per-slot rate of 8 nats keeps kappa = 0.999 out of the clamp region.
    const double t = 1e9;
    const auto est = exponential_estimator(t, 8.0 * t);
    const auto nu = est.nu_stats(0.999);
    REQUIRE_FALSE(nu.case2_clamped);
    CHECK(nu.mean * std::exp(-8.0 / 0.999) == doctest::Approx(std::exp(kEulerGamma)).epsilon(1e-2));
  }
}

TEST_CASE("clamp at the boundary ratio") {
  const auto est = default_estimator();
  const double kb = est.case2_boundary();
  REQUIRE(kb > 0.0);
  REQUIRE(kb < 1.0);

  const auto at = est.nu_stats(kb);
  CHECK(std::exp(at.log_mean) * est.threshold_stats(kb).mean == doctest::Approx(1.0).epsilon(1e-9));

  const PowerModel pm = PowerModel::from(SystemConfig{});
  const double psi_ref = est.estimates(std::min(0.999, kb + 0.01), pm).mu_psi_p;
  for (double kappa = kb + 0.01; kappa < 0.999; kappa += 0.02) {
    const auto e = est.estimates(kappa, pm);
    CHECK(e.case2_clamped);
    CHECK(e.mu_psi_p == psi_ref);
  }
  CHECK_FALSE(est.nu_stats(kb * 0.99).case2_clamped);

  const double below = est.mean_total_power(kb * (1.0 - 1e-9), pm);
  const double above = est.mean_total_power(kb * (1.0 + 1e-9), pm);
  CHECK(std::abs(above - below) <= 1e-6 * below);
}

TEST_CASE("transmit power falls with the active ratio") {
  const auto est = default_estimator();
  double prev = std::numeric_limits<double>::infinity();
  for (double kappa = 0.02; kappa < est.case2_boundary(); kappa += 0.01) {
    const double p = est.mean_transmit_power(kappa);
    CAPTURE(kappa);
    CHECK(p <= prev * (1.0 + 1e-12));
    prev = p;
  }
}

TEST_CASE("total power edge cases") {
  const auto idle = LargeScaleEstimator(GainDistribution(drive_by_alphas(), 4, 3.16e-13), 100.0, 0.0);
  const PowerModel pm{0.213, 233.2, 150.0, 0.01};
  CHECK(idle.mean_total_power(0.0, pm) == 150.0);

  const auto est = default_estimator();
  const PowerModel pure{1.0, 0.0, 0.0, 0.01};
  for (double kappa : {0.1, 0.3, 0.9}) CHECK(est.mean_total_power(kappa, pure) == est.mean_transmit_power(kappa));
}

TEST_CASE("mean transmit power against simulated allocations") {
  SystemConfig sys;
  const auto alphas = drive_by_alphas();
  const long total = 100000;
  const double rate = 4.0 * total;
  const LargeScaleEstimator est(GainDistribution(alphas, 4, sys.noise_power_w), static_cast<double>(total), rate);
  Rng rng(5);
  std::gamma_distribution<double> fade(4.0, 1.0);
  std::vector<double> g(total);
  for (long t = 0; t < total; ++t) g[t] = alphas[t % alphas.size()] * fade(rng) / sys.noise_power_w;
  const RankedGains ranked(g);
  for (double kappa : {0.1, 0.25, 0.5}) {
    CAPTURE(kappa);
    REQUIRE(kappa < est.case2_boundary());
    const double simulated = ranked.transmit_power_sum(std::lround(kappa * total), rate) / total;
    CHECK(std::abs(est.mean_transmit_power(kappa) / simulated - 1.0) < 0.02);
  }
}

TEST_CASE("optimal active ratio") {
  SUBCASE("free activity pushes to the upper edge") {
    const auto est = default_estimator(1000.0);
    const PowerModel pm{0.213, 150.0, 150.0, 0.01};
    CHECK(est.optimize_kappa(pm) == doctest::Approx(1.0 - 1.0 / 1000.0).epsilon(1e-12));
  }
  SUBCASE("default constants give an interior minimum") {
    const auto est = default_estimator();
    const PowerModel pm = PowerModel::from(SystemConfig{});
    const double k = est.optimize_kappa(pm);
    CHECK(k > 0.05);
    CHECK(k < 0.9);
    const double best = est.mean_total_power(k, pm);
    CHECK(est.mean_total_power(k - 0.03, pm) > best);
    CHECK(est.mean_total_power(k + 0.03, pm) > best);
  }
  SUBCASE("a larger circuit penalty moves the optimum left") {
    const auto est = default_estimator();
    double prev = 1.0;
    for (double p_act : {160.0, 233.2, 1000.0, 10000.0}) {
      const double k = est.optimize_kappa(PowerModel{0.213, p_act, 150.0, 0.01});
      CAPTURE(p_act);
      CHECK(k <= prev);
      prev = k;
    }
  }
}

TEST_CASE("conservative two-sigma plan") {
  const auto est = default_estimator();
  const double k = 0.2;
  const auto plan = est.conservative_estimates(k);
  const auto th = est.threshold_stats(k);
  const auto nu = est.nu_stats(k);
  CHECK(plan.g_th_hat <= th.mean);
  CHECK(plan.g_th_hat == doctest::Approx(th.mean - 2.0 * th.sd));
  CHECK(plan.nu_hat / std::exp(nu.log_mean) == doctest::Approx(std::exp(2.0 * nu.log_sd)).epsilon(1e-12));
  CHECK(plan.nu_hat > std::exp(nu.log_mean));
  CHECK(plan.target_completion_prob == doctest::Approx(0.950625));

  const auto big = default_estimator(1e12);
  const auto p2 = big.conservative_estimates(k);
  CHECK(p2.g_th_hat == doctest::Approx(big.distribution().quantile(k)).epsilon(1e-5));
  CHECK(p2.nu_hat == doctest::Approx(std::exp(big.nu_stats(k).log_mean)).epsilon(1e-5));
}

TEST_CASE("estimates depend only on the multiset of alphas") {
  auto alphas = drive_by_alphas();
  SystemConfig sys;
  const double rate = normalized_rate_requirement(sys);
  const PowerModel pm = PowerModel::from(sys);
  const LargeScaleEstimator a(GainDistribution(alphas, 4, sys.noise_power_w), 12000.0, rate);
  std::shuffle(alphas.begin(), alphas.end(), Rng(1));
  const LargeScaleEstimator b(GainDistribution(alphas, 4, sys.noise_power_w), 12000.0, rate);
  CHECK(a.case2_boundary() == b.case2_boundary());
  for (double kappa : {0.05, 0.3, 0.95}) {
    const auto x = a.estimates(kappa, pm);
    const auto y = b.estimates(kappa, pm);
    CHECK(x.mu_gth == y.mu_gth);
    CHECK(x.sigma_gth == y.sigma_gth);
    CHECK(x.mu_nu == y.mu_nu);
    CHECK(x.sigma_nu == y.sigma_nu);
    CHECK(x.mu_phi == y.mu_phi);
    CHECK(x.mu_g_inv == y.mu_g_inv);
    CHECK(x.mu_omega == y.mu_omega);
  }
}
