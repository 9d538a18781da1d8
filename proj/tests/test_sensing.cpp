#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "coexist/errors.hpp"
#include "coexist/sensing.hpp"

using namespace coexist;

TEST_CASE("detect boundaries") {
  CHECK(detect(-52.0, -62.0));
  CHECK(detect(-62.0, -62.0));
  CHECK_FALSE(detect(-73.0, -72.0));
  CHECK(detect(-500.0, kNoThreshold));
}

TEST_CASE("ed_success_prob examples") {
  const std::vector<double> ten(10, -52.0);
  const double p = ed_success_prob(ten, -62.0);
  CHECK(p == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(std::abs(p - 0.34) <= 0.03);

  const std::vector<double> far{-62.0 + 100.0};
  CHECK(std::abs(ed_success_prob(far, -62.0) - 1.0) < 1e-4);

  const std::vector<double> one{-52.0};
  CHECK(ed_success_prob(one, -62.0) == doctest::Approx(0.9048).epsilon(1e-4));

  const std::vector<double> none;
  CHECK_THROWS_AS(ed_success_prob(none, -62.0), InvalidArgument);
}

TEST_CASE("ed_success_factors are per link") {
  const std::vector<double> links{-52.0, -62.0, -72.0};
  const auto f = ed_success_factors(links, -62.0);
  REQUIRE(f.size() == 3);
  CHECK(f[0] == doctest::Approx(std::exp(-0.1)));
  CHECK(f[1] == doctest::Approx(std::exp(-1.0)));
  CHECK(f[2] == doctest::Approx(std::exp(-10.0)));
}

TEST_CASE("property: product never exceeds any single-link probability") {
  Rng rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(11));
    std::vector<double> links(n);
    for (auto& r : links) r = rng.uniform(-100.0, -30.0);
    const double t = rng.uniform(-90.0, -50.0);
    const double p = ed_success_prob(links, t);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    for (double r : links) {
      const std::vector<double> single{r};
      CHECK(p <= ed_success_prob(single, t) + 1e-15);
    }
  }
}

TEST_CASE("oracle: closed form against Monte Carlo with exponential fades") {
  Rng rng(1234);
  const std::vector<double> links(10, -52.0);
  const double thr = -62.0;
  const int trials = 1000000;
  int ok = 0;
  for (int i = 0; i < trials; ++i) {
    bool all = true;
    for (double r : links) {
      const LinkBudget lb{0.0, r, 0.0, sample_fast_fade(rng)};
      all = detect(rssi(0.0, lb, true), thr) && all;
    }
    ok += all ? 1 : 0;
  }
  CHECK(std::abs(static_cast<double>(ok) / trials - ed_success_prob(links, thr)) <= 0.01);
}

TEST_CASE("fractional coverage examples on the reference building") {
  const Building b;
  const Position base{25.0, 30.0};
  PropagationModel m;
  m.los = {26.0, 5.0, 1000.0, 0.0};

  Rng rng(1);
  const auto wifi = fractional_ed_coverage(b, base, 20.0, m, {-62.0, kWifiMinSensitivityDbm}, 100000, rng);
  CHECK(std::abs(wifi.ed_fraction - 0.51) <= 0.05);
  CHECK(std::abs(wifi.cell_fraction - 0.87) <= 0.05);
  CHECK(wifi.samples == 100000);

  Rng rng2(1);
  const auto lte = fractional_ed_coverage(b, base, 20.0, m, {-72.0, kLteMinSensitivityDbm}, 100000, rng2);
  CHECK(std::abs(lte.ed_fraction - 0.52) <= 0.05);

  Rng rng3(1);
  const auto all = fractional_ed_coverage(b, base, 20.0, m, {kNoThreshold, kWifiMinSensitivityDbm}, 10000, rng3);
  CHECK(all.ed_fraction == 1.0);
}

TEST_CASE("fractional coverage preconditions") {
  const Building b;
  PropagationModel m;
  Rng rng(1);
  CHECK_THROWS_AS(fractional_ed_coverage(b, {25, 30}, 20.0, m, {}, 999, rng), InvalidArgument);
  CHECK_THROWS_AS(fractional_ed_coverage(b, {60, 30}, 20.0, m, {}, 1000, rng), InvalidArgument);
  // nothing reaches the floor at -200 dBm transmit power
  CHECK_THROWS_AS(fractional_ed_coverage(b, {25, 30}, -200.0, m, {}, 1000, rng), InvalidArgument);
}

TEST_CASE("oracle: coverage against a brute-force count over sampled RSSI") {
  const Building b;
  const Position base{25.0, 30.0};
  PropagationModel m;
  m.variant = PathModel::diffusion;
  Rng r1(9), r2(9);
  const auto cov = fractional_ed_coverage(b, base, 20.0, m, {-62.0, kWifiMinSensitivityDbm}, 20000, r1);
  const auto samples = sample_rssi(b, base, 20.0, m, 20000, r2);
  const auto in_cell = std::count_if(samples.begin(), samples.end(), [](double r) { return r >= -87.5; });
  const auto above = std::count_if(samples.begin(), samples.end(), [](double r) { return r >= -62.0; });
  CHECK(cov.cell_fraction == doctest::Approx(static_cast<double>(in_cell) / 20000.0));
  CHECK(cov.ed_fraction == doctest::Approx(static_cast<double>(above) / static_cast<double>(in_cell)));
}

TEST_CASE("property: ed_fraction non-increasing in the threshold") {
  const Building b;
  PropagationModel m;
  for (auto variant : {PathModel::inh, PathModel::diffusion}) {
    m.variant = variant;
    double prev = 1.0;
    for (double t = -100.0; t <= -30.0; t += 2.5) {
      Rng rng(5);  // same positions for every threshold
      const auto c = fractional_ed_coverage(b, {25.0, 30.0}, 20.0, m, {t, kLteMinSensitivityDbm}, 5000, rng);
      CHECK(c.ed_fraction <= prev);
      prev = c.ed_fraction;
    }
  }
}

TEST_CASE("uplink_ed_failure examples and identity") {
  CoverageResult c;
  c.ed_fraction = 0.45;
  CHECK(uplink_ed_failure(c) == doctest::Approx(0.55));
  c.ed_fraction = 0.58;
  CHECK(uplink_ed_failure(c) == doctest::Approx(0.42));
  c.ed_fraction = 1.0;
  CHECK(uplink_ed_failure(c) == 0.0);
  c.ed_fraction = 1.5;
  CHECK_THROWS_AS(uplink_ed_failure(c), InvalidArgument);

  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    c.ed_fraction = rng.uniform();
    CHECK(uplink_ed_failure(c) + c.ed_fraction == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("multipath margin shifts every sample") {
  const Building b;
  PropagationModel m;
  Rng r1(6), r2(6);
  CoverageOptions shifted;
  shifted.multipath_margin_db = 3.0;
  const auto a = sample_rssi(b, {25, 30}, 20.0, m, 2000, r1);
  const auto c = sample_rssi(b, {25, 30}, 20.0, m, 2000, r2, shifted);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(c[i] == doctest::Approx(a[i] - 3.0));
}

TEST_CASE("empirical_cdf") {
  const std::vector<double> s{-90.0, -80.0, -80.0, -70.0};
  const auto cdf = empirical_cdf(s, -95.0, -65.0, 10.0);
  REQUIRE(cdf.size() == 4);
  CHECK(cdf[0].fraction == 0.0);
  CHECK(cdf[1].fraction == 0.25);
  CHECK(cdf[2].fraction == 0.75);
  CHECK(cdf[3].fraction == 1.0);
  CHECK_THROWS_AS(empirical_cdf(s, -60.0, -70.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(empirical_cdf(s, -60.0, -50.0, 0.0), InvalidArgument);
}
