#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "coexist/errors.hpp"
#include "coexist/propagation.hpp"

using namespace coexist;

namespace {

// log10 through natural logs, so the oracle does not share code with the library
double lg(double x) { return std::log(x) / std::log(10.0); }

}  // namespace

TEST_CASE("path_gain_inh examples") {
  CHECK(path_gain_inh(1.0, 5.0, true) == doctest::Approx(-(32.8 + 20.0 * lg(5.0))).epsilon(1e-12));
  CHECK(path_gain_inh(1.0, 5.0, true) == doctest::Approx(-46.78).epsilon(1e-4));
  CHECK(path_gain_inh(10.0, 5.0, true) == doctest::Approx(-63.68).epsilon(1e-4));
  CHECK(path_gain_inh(0.5, 5.0, true) == path_gain_inh(1.0, 5.0, true));
  CHECK(path_gain_inh(0.5, 5.0, false) == path_gain_inh(1.0, 5.0, false));
  CHECK(path_gain_inh(10.0, 5.0, false) == doctest::Approx(-(43.3 + 11.5 + 20.0 * lg(5.0))));
}

TEST_CASE("path gain rejects bad distances") {
  CHECK_THROWS_AS(path_gain_inh(0.0, 5.0, true), InvalidArgument);
  CHECK_THROWS_AS(path_gain_inh(-3.0, 5.0, true), InvalidArgument);
  CHECK_THROWS_AS(path_gain_inh(std::nan(""), 5.0, true), InvalidArgument);
  CHECK_THROWS_AS(path_gain_inh(std::numeric_limits<double>::infinity(), 5.0, true), InvalidArgument);
  PropagationModel m;
  CHECK_THROWS_AS(path_gain_diffusion(0.0, m), InvalidArgument);
}

TEST_CASE("los_probability_inh examples") {
  CHECK(los_probability_inh(5.0) == 1.0);
  CHECK(los_probability_inh(18.0) == 1.0);
  CHECK(los_probability_inh(45.0) == 0.5);
  CHECK(los_probability_inh(27.0) == doctest::Approx(0.7165).epsilon(1e-4));
  CHECK(los_probability_inh(27.0) == doctest::Approx(std::exp(-1.0 / 3.0)));
  CHECK_THROWS_AS(los_probability_inh(-1.0), InvalidArgument);
}

TEST_CASE("path_gain_diffusion examples") {
  PropagationModel m;
  m.diffusion_ref_gain_db = -40.0;
  m.diffusion_length_m = 30.0;
  CHECK(path_gain_diffusion(1.0, m) == doctest::Approx(-40.0 - 10.0 / std::log(10.0) / 30.0));
  CHECK(path_gain_diffusion(30.0, m) == doctest::Approx(-59.11).epsilon(1e-4));
  // oracle: dB of e^(-d/L)/d
  const double d = 30.0;
  CHECK(path_gain_diffusion(d, m) == doctest::Approx(-40.0 + 10.0 * lg(std::exp(-d / 30.0) / d)));
  CHECK(path_gain_diffusion(20.0, m) > path_gain_diffusion(40.0, m));
}

TEST_CASE("diffusion gain approaches the reference gain at 1 m for long diffusion lengths") {
  PropagationModel m;
  m.diffusion_ref_gain_db = -40.0;
  m.diffusion_length_m = 1e12;
  CHECK(path_gain_diffusion(1.0, m) == doctest::Approx(-40.0));
}

TEST_CASE("property: path gain strictly decreasing in distance") {
  Rng rng(11);
  PropagationModel m;
  for (int i = 0; i < 20000; ++i) {
    double a = 1.0 + rng.uniform() * 500.0;
    double b = 1.0 + rng.uniform() * 500.0;
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    m.diffusion_length_m = 0.5 + rng.uniform() * 50.0;
    m.diffusion_ref_gain_db = -80.0 + rng.uniform() * 60.0;
    const double fc = 0.5 + rng.uniform() * 60.0;
    CHECK(path_gain_inh(a, fc, true) > path_gain_inh(b, fc, true));
    CHECK(path_gain_inh(a, fc, false) > path_gain_inh(b, fc, false));
    CHECK(path_gain_diffusion(a, m) > path_gain_diffusion(b, m));
  }
}

TEST_CASE("sample_shadow") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) CHECK(sample_shadow(0.0, rng) == 0.0);
  CHECK_THROWS_AS(sample_shadow(-1.0, rng), InvalidArgument);

  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_shadow(4.0, rng);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 0.1);
  CHECK(std::abs(sd - 4.0) < 0.1);
}

TEST_CASE("sample_fast_fade tail, mean and positivity") {
  Rng rng(2024);
  const int n = 1000000;
  int below = 0;
  double sum = 0.0;
  bool all_positive = true;
  for (int i = 0; i < n; ++i) {
    const double f = sample_fast_fade(rng);
    if (f < 0.1) ++below;
    sum += f;
    all_positive = all_positive && f > 0.0;
  }
  CHECK(all_positive);
  CHECK(std::abs(static_cast<double>(below) / n - 0.0952) < 0.002);
  CHECK(std::abs(sum / n - 1.0) < 0.01);
}

TEST_CASE("oracle: fast-fade empirical CDF against 1 - e^-x (KS)") {
  Rng rng(77);
  const int n = 1000000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = sample_fast_fade(rng);
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = 1.0 - std::exp(-xs[i]);
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
  }
  CHECK(ks < 0.005);
}

TEST_CASE("rssi examples") {
  LinkBudget link{20.0, -72.0, 0.0, 1.0};
  CHECK(rssi(20.0, link, false) == doctest::Approx(-52.0));
  link.fast_fade = 0.1;
  CHECK(rssi(20.0, link, true) == doctest::Approx(-62.0));
  CHECK(rssi(20.0, link, false) == doctest::Approx(-52.0));
  LinkBudget unity{0.0, 0.0, 0.0, 1.0};
  CHECK(rssi(17.0, unity, false) == 17.0);
  CHECK(rssi(17.0, unity, true) == 17.0);
}

TEST_CASE("property: rssi is linear in tx power") {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    // quarter-dB grid keeps the sums exact in binary floating point
    const double p = std::round(rng.uniform(-10.0, 30.0) * 4.0) / 4.0;
    const double delta = std::round(rng.uniform(-20.0, 20.0) * 4.0) / 4.0;
    LinkBudget link{p, std::round(rng.uniform(-120.0, -30.0) * 4.0) / 4.0,
                    std::round(rng.uniform(-10.0, 10.0) * 4.0) / 4.0, 1.0};
    CHECK(rssi(p + delta, link, false) == rssi(p, link, false) + delta);
    link.fast_fade = rng.exponential();
    CHECK(rssi(p + delta, link, true) == doctest::Approx(rssi(p, link, true) + delta).epsilon(1e-12));
  }
}

TEST_CASE("reproducibility of random streams") {
  Rng a(99), b(99), c(100);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = sample_fast_fade(a);
    CHECK(x == sample_fast_fade(b));
    differs = differs || x != sample_fast_fade(c);
  }
  CHECK(differs);

  Rng s1 = Rng::substream(7, 1), s2 = Rng::substream(7, 1), s3 = Rng::substream(7, 2);
  CHECK(s1.uniform() == s2.uniform());
  CHECK(s1.uniform() != s3.uniform());

  PropagationModel m;
  Rng r1(4), r2(4);
  for (int i = 0; i < 100; ++i) {
    const double d = 1.0 + i;
    const LinkDraw x = draw_link(m, d, r1);
    const LinkDraw y = draw_link(m, d, r2);
    CHECK(x.los == y.los);
    CHECK(x.mean_gain_db() == y.mean_gain_db());
  }
}

TEST_CASE("draw_link respects the shadowing flag and LOS profile") {
  PropagationModel m;
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const LinkDraw d = draw_link(m, 5.0, rng, false);
    CHECK(d.los);
    CHECK(d.shadow_db == 0.0);
    CHECK(d.path_gain_db == path_gain_inh(5.0, m.carrier_ghz, true));
  }
  m.variant = PathModel::diffusion;
  const LinkDraw d = draw_link(m, 12.0, rng, false);
  CHECK(d.path_gain_db == path_gain_diffusion(12.0, m));
}

TEST_CASE("PropagationModel::validate") {
  PropagationModel m;
  CHECK_NOTHROW(m.validate());
  m.carrier_ghz = 0.0;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  m = {};
  m.shadow_sigma_nlos_db = -1.0;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  m = {};
  m.diffusion_length_m = 0.0;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
}
