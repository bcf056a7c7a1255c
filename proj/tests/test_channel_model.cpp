#include "pra/channel_model.hpp"

#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace pra;

TEST_CASE("path loss at reference distances") {
  CHECK(path_loss_gain(1.0) == doctest::Approx(std::pow(10.0, -3.53)).epsilon(1e-12));
  CHECK(path_loss_gain(10.0) == doctest::Approx(std::pow(10.0, -7.29)).epsilon(1e-12));
  // 35.3 + 37.6 * log10(250) = 125.46 dB
  const double db250 = 35.3 + 37.6 * (std::log(250.0) / std::log(10.0));
  CHECK(db250 == doctest::Approx(125.4626).epsilon(1e-6));
  CHECK(path_loss_gain(250.0) == doctest::Approx(2.842e-13).epsilon(1e-3));
  CHECK_THROWS_AS(path_loss_gain(0.0), std::invalid_argument);
  CHECK_THROWS_AS(path_loss_gain(-3.0), std::invalid_argument);
}

TEST_CASE("path loss is strictly decreasing") {
  double prev = path_loss_gain(1.0);
  for (double d = 1.5; d <= 1e5; d *= 1.01) {
    const double g = path_loss_gain(d);
    REQUIRE(g < prev);
    prev = g;
  }
}

TEST_CASE("trajectory geometry") {
  SystemConfig sys;
  TrajectoryConfig straight;
  straight.speed_mps = 10.0;
  const auto bs = default_bs_layout(sys, straight);

  SUBCASE("zero amplitude matches a straight line") {
    TrajectoryConfig cos = straight;
    cos.kind = TrajectoryKind::cosine_perturbed;
    cos.amplitude_m = 0.0;
    const auto a = generate_trajectory(straight, sys, bs);
    const auto b = generate_trajectory(cos, sys, bs);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].x == b[i].x);
      CHECK(a[i].y == b[i].y);
    }
  }

  SUBCASE("along-track extent") {
    const auto p = generate_trajectory(straight, sys, bs);
    REQUIRE(p.size() == 120);
    CHECK(p.back().x - p.front().x == doctest::Approx(1190.0));
  }

  SUBCASE("cosine zero crossing at a quarter cycle") {
    SystemConfig one = sys;
    one.frames = 2;
    TrajectoryConfig cos = straight;
    cos.kind = TrajectoryKind::cosine_perturbed;
    cos.amplitude_m = 5.0;
    cos.cycle_s = 4.0 * one.frame_duration_s();
    const auto p = generate_trajectory(cos, one, bs);
    CHECK(p[0].y - bs[0].y == doctest::Approx(cos.min_bs_distance_m + 5.0));
    CHECK(p[1].y - bs[0].y == doctest::Approx(cos.min_bs_distance_m).epsilon(1e-12));
  }

  SUBCASE("layout covers the fastest trajectory") {
    TrajectoryConfig fast = straight;
    fast.speed_mps = 20.0;
    const auto p = generate_trajectory(fast, sys, bs);
    CHECK(bs.front().x < p.front().x - sys.cell_radius_m);
    CHECK(bs.back().x > p.back().x + sys.cell_radius_m);
  }

  SUBCASE("invalid configurations") {
    TrajectoryConfig bad = straight;
    bad.amplitude_m = 1.0;
    CHECK_THROWS_AS(generate_trajectory(bad, sys, bs), std::invalid_argument);
    TrajectoryConfig unresolved;
    CHECK_THROWS_AS(generate_trajectory(unresolved, sys, bs), std::invalid_argument);
  }
}

TEST_CASE("speed resolution draws from (0, 20)") {
  Rng rng(7);
  TrajectoryConfig t;
  for (int i = 0; i < 1000; ++i) {
    const auto r = resolve_speed(t, rng);
    REQUIRE(r.speed_mps.has_value());
    CHECK(*r.speed_mps > 0.0);
    CHECK(*r.speed_mps < 20.0);
  }
  t.speed_mps = 3.0;
  CHECK(*resolve_speed(t, rng).speed_mps == 3.0);
}

TEST_CASE("nearest base station selection") {
  const std::vector<Point2> one{{0.0, 0.0}};
  const std::vector<Point2> pos{{150.0, 0.0}};
  CHECK(large_scale_gains(pos, one)[0] == path_loss_gain(150.0));

  const std::vector<Point2> two{{0.0, 0.0}, {500.0, 0.0}};
  const std::vector<Point2> p100{{100.0, 0.0}};
  CHECK(large_scale_gains(p100, two)[0] == path_loss_gain(100.0));

  // Equidistant: the lower index wins, and both give the same gain anyway.
  const std::vector<Point2> p250{{250.0, 0.0}};
  CHECK(large_scale_gains(p250, two)[0] == path_loss_gain(250.0));

  const std::vector<Point2> at_bs{{0.0, 0.0}};
  CHECK(large_scale_gains(at_bs, one)[0] == path_loss_gain(1.0));
}

namespace {

double ks_against_gamma(std::vector<double> x, double shape) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = boost::math::gamma_p(shape, x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace

TEST_CASE("small-scale fading moments and distribution") {
  Rng rng(11);
  CHECK(sample_small_scale(rng, 4, 0).empty());
  CHECK_THROWS_AS(sample_small_scale(rng, 0, 3), std::invalid_argument);

  const long n = 100000;
  for (int k : {1, 2, 4}) {
    const auto x = sample_small_scale(rng, k, n);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= n - 1;
    CAPTURE(k);
    CHECK(std::abs(mean - k) < 3.0 * std::sqrt(k / static_cast<double>(n)));
    CHECK(var == doctest::Approx(k).epsilon(0.03));
    // KS critical value at level 0.01 for n = 1e5.
    CHECK(ks_against_gamma(x, k) < 1.628 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("equivalent gains") {
  const std::vector<double> a{2.0};
  const std::vector<double> h{3.0};
  CHECK(equivalent_gains(a, h, 1.0, 1)[0] == 6.0);
  CHECK(equivalent_gains(a, h, 0.5, 1)[0] == 12.0);

  const std::vector<double> alphas{1.0, 10.0, 100.0};
  const std::vector<double> small(12, 1.0);
  const auto g = equivalent_gains(alphas, small, 1.0, 4);
  // Slots are 0-based here: slot T_s - 1 is the last of frame 0, slot T_s opens frame 1.
  CHECK(g[3] == 1.0);
  CHECK(g[4] == 10.0);
  CHECK(g[8] == 100.0);
  CHECK_THROWS_AS(equivalent_gains(alphas, std::vector<double>(11, 1.0), 1.0, 4), std::invalid_argument);
}

TEST_CASE("trace generation is reproducible and frame-consistent") {
  SystemConfig sys;
  sys.frames = 5;
  sys.slots_per_frame = 7;
  const std::vector<double> alphas{1e-12, 2e-12, 3e-12, 4e-12, 5e-12};
  Rng r1(99), r2(99);
  const auto t1 = generate_trace(alphas, sys, r1);
  const auto t2 = generate_trace(alphas, sys, r2);
  CHECK(t1.equivalent_gain_per_slot == t2.equivalent_gain_per_slot);
  REQUIRE(t1.size() == 35);
  for (long t = 0; t < t1.size(); ++t) {
    CHECK(t1.alpha_of_slot(t) == alphas[t / 7]);
    CHECK(t1.equivalent_gain_per_slot[t] > 0.0);
    CHECK(std::isfinite(t1.equivalent_gain_per_slot[t]));
  }
  CHECK_THROWS_AS(generate_trace(std::vector<double>{1.0}, sys, r1), std::invalid_argument);
}

TEST_CASE("system config validation") {
  SystemConfig sys;
  CHECK_NOTHROW(sys.validate());
  CHECK(sys.total_slots() == 12000);
  SystemConfig bad = sys;
  bad.pa_efficiency = 1.5;
  CHECK_THROWS(bad.validate());
  bad = sys;
  bad.p_active_w = 100.0;
  CHECK_THROWS(bad.validate());
  bad = sys;
  bad.frames = 0;
  CHECK_THROWS(bad.validate());
}
