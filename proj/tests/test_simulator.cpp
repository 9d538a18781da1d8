#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "coexist/cli.hpp"
#include "coexist/config.hpp"
#include "coexist/errors.hpp"
#include "coexist/sim/event_queue.hpp"
#include "coexist/sim/simulator.hpp"

using namespace coexist;
using namespace coexist::sim;

namespace {

const std::string kPresets = COEXIST_PRESET_DIR;

NodeSpec node(const std::string& name, Tech tech, Role role, double x, double y, const std::string& serves = "") {
  NodeSpec n;
  n.name = name;
  n.tech = tech;
  n.role = role;
  n.position = {x, y};
  n.serves = serves;
  return n;
}

Scenario wifi_only() {
  Scenario s;
  s.nodes = {node("ap", Tech::wifi, Role::base, 25, 30), node("sta", Tech::wifi, Role::client, 30, 35, "ap")};
  s.traffic.model = TrafficConfig::Model::full_buffer;
  s.duration_s = 1.0;
  return s;
}

Scenario preset(const std::string& name) { return config::to_scenario(config::load_file(kPresets + "/" + name)); }

std::string metrics_text(const Metrics& m) {
  cli::SimBatch b{"x", {1}, {m}};
  return cli::simulate_csv({b});
}

double airtime_sum(const Metrics& m) { return m.airtime_wifi + m.airtime_lte + m.airtime_idle + m.airtime_overlap; }

}  // namespace

TEST_CASE("event queue orders by time, FIFO on ties, refuses the past") {
  EventQueue<int> q;
  q.push(5us, 1);
  q.push(3us, 2);
  q.push(5us, 3);
  q.push(3us, 4);
  std::vector<int> order;
  while (!q.empty()) order.push_back(q.pop().payload);
  CHECK(order == std::vector{2, 4, 1, 3});
  CHECK(q.now() == 5us);
  CHECK_THROWS_AS(q.push(4us, 9), InternalError);
  CHECK_THROWS_AS(q.pop(), InternalError);
}

TEST_CASE("property: event queue pops nondecreasing times with stable ties") {
  Rng g(1);
  EventQueue<int> q;
  std::vector<std::pair<std::int64_t, int>> pushed;
  for (int i = 0; i < 5000; ++i) {
    const auto t = static_cast<std::int64_t>(g.uniform_int(200));
    q.push(Time(t), i);
    pushed.emplace_back(t, i);
  }
  std::stable_sort(pushed.begin(), pushed.end(), [](auto& a, auto& b) { return a.first < b.first; });
  for (const auto& [t, i] : pushed) {
    const auto e = q.pop();
    REQUIRE(e.time == Time(t));
    REQUIRE(e.payload == i);
  }
}

TEST_CASE("rate_from_sinr examples") {
  const PhyConfig phy;
  CHECK(rate_from_sinr(-50.0, Tech::wifi, phy) == 0.0);
  CHECK(rate_from_sinr(-50.0, Tech::lte, phy) == 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(rate_from_sinr(inf, Tech::wifi, phy) == phy.wifi_rates.max_rate());
  CHECK(rate_from_sinr(inf, Tech::lte, phy) == phy.lte_rates.max_rate());
  CHECK(rate_from_sinr(-inf, Tech::wifi, phy) == 0.0);
  CHECK_THROWS_AS(rate_from_sinr(std::nan(""), Tech::wifi, phy), InvalidArgument);
  CHECK(phy.wifi_rates.threshold_for(phy.wifi_rates.max_rate()) == phy.wifi_rates.entries.back().sinr_db);
  CHECK_THROWS_AS(phy.wifi_rates.threshold_for(1.234), InvalidArgument);
}

TEST_CASE("property: rate_from_sinr is monotone") {
  Rng g(2);
  const PhyConfig phy;
  for (int i = 0; i < 20000; ++i) {
    double a = g.uniform(-20.0, 50.0), b = g.uniform(-20.0, 50.0);
    if (a > b) std::swap(a, b);
    for (auto t : {Tech::wifi, Tech::lte}) CHECK(rate_from_sinr(a, t, phy) <= rate_from_sinr(b, t, phy));
  }
}

TEST_CASE("rate table validation") {
  RateTable t{{{5.0, 10.0}, {4.0, 20.0}}};
  CHECK_THROWS_AS(t.validate("x"), ConfigError);
  RateTable e;
  CHECK_THROWS_AS(e.validate("x"), ConfigError);
}

TEST_CASE("summarize examples") {
  const std::vector<double> v{10, 20, 30};
  CHECK(summarize(v, 50) == 20.0);
  const std::vector<double> one{7.5};
  for (double p : {0.0, 13.0, 50.0, 100.0}) CHECK(summarize(one, p) == 7.5);
  const std::vector<double> none;
  CHECK_THROWS_AS(summarize(none, 50), InvalidArgument);
  CHECK_THROWS_AS(summarize(v, 101), InvalidArgument);
}

TEST_CASE("oracle: summarize against sort-and-index") {
  Rng g(3);
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<double> v(1 + g.uniform_int(40));
    for (auto& x : v) x = g.uniform(0.0, 100.0);
    const double p = g.uniform() < 0.2 ? 50.0 : g.uniform(0.0, 100.0);
    auto s = v;
    std::sort(s.begin(), s.end());
    const double rank = p / 100.0 * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = static_cast<std::size_t>(std::ceil(rank));
    const double expect = s[lo] + (rank - static_cast<double>(lo)) * (s[hi] - s[lo]);
    CHECK(summarize(v, p) == doctest::Approx(expect).epsilon(1e-12));
    if (s.size() % 2 == 1 && p == 50.0) CHECK(summarize(v, p) == s[s.size() / 2]);
  }
}

TEST_CASE("jain_index") {
  const std::vector<double> eq{3, 3, 3};
  CHECK(jain_index(eq) == doctest::Approx(1.0));
  const std::vector<double> one_hot{5, 0, 0, 0};
  CHECK(jain_index(one_hot) == doctest::Approx(0.25));
  const std::vector<double> zeros{0, 0};
  CHECK(jain_index(zeros) == 1.0);
  const std::vector<double> none;
  CHECK_THROWS_AS(jain_index(none), InvalidArgument);
}

TEST_CASE("generate_topology examples") {
  Scenario s;
  s.nodes = {node("ap", Tech::wifi, Role::base, 25, 30), node("enb", Tech::lte, Role::base, 26, 30)};
  s.topology.clients_per_base = 1;
  Rng r1(5), r2(5);
  const Scenario a = generate_topology(s, r1);
  const Scenario b = generate_topology(s, r2);
  REQUIRE(a.nodes.size() == 4);
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i].name == b.nodes[i].name);
    CHECK(a.nodes[i].position.x == b.nodes[i].position.x);
    CHECK(a.nodes[i].position.y == b.nodes[i].position.y);
    CHECK(s.building.contains(a.nodes[i].position));
  }
  CHECK(a.nodes[2].serves == "ap");
  CHECK(a.nodes[2].tech == Tech::wifi);
  CHECK(a.nodes[3].serves == "enb");
  CHECK(a.nodes[3].tech == Tech::lte);

  s.topology.clients_per_base = 0;
  s.topology.poisson_mean = 0.0;
  Rng r3(5);
  CHECK(generate_topology(s, r3).nodes.size() == 2);

  s.nodes[0].position = {80, 30};
  Rng r4(5);
  CHECK_THROWS_AS(generate_topology(s, r4), ConfigError);
}

TEST_CASE("poisson client counts average to the mean") {
  Scenario s;
  s.nodes = {node("ap", Tech::wifi, Role::base, 25, 30)};
  s.topology.poisson_mean = 3.0;
  s.topology.client_radius_m = 10.0;
  Rng rng(6);
  double total = 0.0;
  for (int i = 0; i < 4000; ++i) {
    const Scenario t = generate_topology(s, rng);
    total += static_cast<double>(t.nodes.size() - 1);
    for (std::size_t k = 1; k < t.nodes.size(); ++k) CHECK(distance(t.nodes[k].position, {25, 30}) <= 10.0);
  }
  CHECK(total / 4000.0 == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("scenario validation names the problem") {
  Scenario s = wifi_only();
  CHECK_NOTHROW(s.validate());
  s.nodes[1].serves = "nobody";
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = wifi_only();
  s.nodes[1].position = {-1, 0};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = wifi_only();
  s.nodes[1].name = "ap";
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = wifi_only();
  s.nodes.erase(s.nodes.begin());
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("single Wi-Fi cell without contenders") {
  const Metrics m = run(wifi_only());
  CHECK(m.airtime_lte == 0.0);
  CHECK(m.airtime_overlap == 0.0);
  CHECK(m.collision_count == 0);
  CHECK(airtime_sum(m) == doctest::Approx(1.0).epsilon(1e-9));
  const auto tp = m.client_throughputs(Tech::wifi);
  REQUIRE(tp.size() == 1);
  CHECK(tp[0] > 0.0);
  CHECK(tp[0] <= PhyConfig{}.wifi_rates.max_rate());
  CHECK(m.politeness_checks > 0);
}

TEST_CASE("single LTE cell without contenders") {
  Scenario s;
  s.nodes = {node("enb", Tech::lte, Role::base, 25, 30), node("ue", Tech::lte, Role::client, 30, 35, "enb")};
  s.traffic.model = TrafficConfig::Model::full_buffer;
  s.duration_s = 1.0;
  const Metrics m = run(s);
  CHECK(m.airtime_wifi == 0.0);
  CHECK(m.collision_count == 0);
  const auto tp = m.client_throughputs(Tech::lte);
  REQUIRE(tp.size() == 1);
  CHECK(tp[0] > 0.0);
  CHECK(tp[0] <= PhyConfig{}.lte_rates.max_rate());
}

TEST_CASE("duration zero gives empty metrics") {
  Scenario s = wifi_only();
  s.duration_s = 0.0;
  const Metrics m = run(s);
  CHECK(m.events == 0);
  CHECK(m.airtime_idle == 1.0);
  CHECK(m.client_throughputs(Tech::wifi).empty());
}

TEST_CASE("determinism: identical scenario and seed give identical metrics and trace") {
  const Scenario s = preset("figure4_coexistence.json");
  std::ostringstream t1, t2;
  TraceSink k1(t1), k2(t2);
  k1.header();
  k2.header();
  const Metrics a = run(s, &k1);
  const Metrics b = run(s, &k2);
  CHECK(metrics_text(a) == metrics_text(b));
  CHECK(t1.str() == t2.str());
  CHECK(t1.str().size() > 1000);
  CHECK(a.events == b.events);

  Scenario other = s;
  other.seed += 1;
  CHECK(metrics_text(run(other)) != metrics_text(a));
}

TEST_CASE("collision preset: ACK-window collisions, none with a 15 dB stronger ACK") {
  Scenario s = preset("figure3_collision.json");
  const Metrics m = run(s);
  CHECK(m.ack_window_collisions > 0);
  for (auto& l : s.links) {
    if ((l.a == "enb" && l.b == "sta") || (l.a == "sta" && l.b == "enb")) *l.gain_db += 15.0;
  }
  CHECK(run(s).ack_window_collisions == 0);
}

TEST_CASE("coexistence preset without adaptation: LTE dominates the air and collisions occur") {
  const Scenario s = preset("figure4_coexistence.json");
  const Metrics m = run(s);
  CHECK(m.airtime_lte > 2.0 * m.airtime_wifi);
  CHECK(m.collision_count > 0);
}

TEST_CASE("property: random scenarios keep airtime, politeness and rate bounds") {
  Rng g(77);
  const PhyConfig phy;
  for (int trial = 0; trial < 40; ++trial) {
    Scenario s;
    s.seed = 1000 + static_cast<std::uint64_t>(trial);
    s.duration_s = 0.3;
    s.nodes = {node("ap", Tech::wifi, Role::base, g.uniform(0, 50), g.uniform(0, 120)),
               node("enb", Tech::lte, Role::base, g.uniform(0, 50), g.uniform(0, 120))};
    if (g.uniform() < 0.5) s.nodes.push_back(node("ap2", Tech::wifi, Role::base, g.uniform(0, 50), g.uniform(0, 120)));
    s.topology.clients_per_base = 1 + static_cast<int>(g.uniform_int(1));
    s.topology.client_radius_m = 15.0;
    s.traffic.model = g.uniform() < 0.5 ? TrafficConfig::Model::full_buffer : TrafficConfig::Model::file_transfer;
    s.traffic.file_bytes = 2e5;
    s.traffic.arrival_rate = 5.0;
    s.propagation.variant = g.uniform() < 0.5 ? PathModel::inh : PathModel::diffusion;
    s.coordination.adaptive_ed = g.uniform() < 0.5;
    s.coordination.adaptive.update_period_s = 0.05;
    s.relay.latency = 10ms;
    s.wifi.dcf.rts_cts = g.uniform() < 0.5;
    s.phy.sense_fast_fading = g.uniform() < 0.3;
    s.channels = {36, 40};
    s.coordination.channel_selection = g.uniform() < 0.3;
    Metrics m;
    REQUIRE_NOTHROW(m = run(s));  // InternalError on any politeness or airtime breach
    CHECK(airtime_sum(m) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.politeness_checks > 0);
    for (const auto& n : m.nodes) {
      const double cap = n.tech == Tech::wifi ? phy.wifi_rates.max_rate() : phy.lte_rates.max_rate();
      for (double x : n.throughputs_mbps) {
        CHECK(x >= 0.0);
        CHECK(x <= cap + 1e-9);
      }
      CHECK(n.airtime >= 0.0);
      CHECK(n.airtime <= 1.0);
    }
  }
}

TEST_CASE("adaptive ED lowers thresholds toward a detected neighbour") {
  Scenario s = preset("figure4_coexistence.json");
  s.coordination.adaptive_ed = true;
  s.duration_s = 3.0;
  const Metrics m = run(s);
  for (const auto& n : m.nodes) {
    if (n.role != Role::base) continue;
    const double t_default = n.tech == Tech::wifi ? s.wifi.ed_threshold_dbm : s.lte.lbt.ed_threshold_dbm;
    CHECK(n.ed_threshold_dbm < t_default);
    CHECK(n.ed_threshold_dbm >= s.coordination.adaptive.t_min_dbm);
  }
}
