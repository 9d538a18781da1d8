#include "coexist/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "coexist/errors.hpp"
#include "coexist/relay.hpp"

namespace coexist::sim {

std::string_view to_string(Tech tech) { return tech == Tech::wifi ? "wifi" : "lte"; }
std::string_view to_string(Role role) { return role == Role::base ? "base" : "client"; }

void TrafficConfig::validate() const {
  if (model == Model::file_transfer && (!(file_bytes > 0.0) || !(arrival_rate > 0.0))) {
    throw ConfigError("traffic.file_bytes and traffic.arrival_rate must be positive for file_transfer");
  }
}

double RateTable::rate(double sinr_db) const {
  double r = 0.0;
  for (const auto& e : entries) {
    if (sinr_db >= e.sinr_db) r = e.mbps;
  }
  return r;
}

double RateTable::threshold_for(double mbps) const {
  for (const auto& e : entries) {
    if (e.mbps == mbps) return e.sinr_db;
  }
  throw InvalidArgument("rate not in table");
}

double RateTable::max_rate() const { return entries.empty() ? 0.0 : entries.back().mbps; }
double RateTable::min_threshold() const { return entries.empty() ? 0.0 : entries.front().sinr_db; }

void RateTable::validate(std::string_view name) const {
  if (entries.empty()) throw ConfigError(std::string(name) + ": rate table is empty");
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (!(entries[i].sinr_db > entries[i - 1].sinr_db) || !(entries[i].mbps > entries[i - 1].mbps)) {
      throw ConfigError(std::string(name) + ": rate table must be strictly increasing");
    }
  }
  if (!(entries.front().mbps > 0.0)) throw ConfigError(std::string(name) + ": rates must be positive");
}

// 802.11n 20 MHz single stream; the lowest entry sits at the -87.5 dBm decode floor.
RateTable default_wifi_rates() {
  return {{{6.5, 6.5}, {9.5, 13.0}, {12.0, 19.5}, {15.0, 26.0}, {19.0, 39.0}, {23.0, 52.0}, {25.0, 58.5},
           {27.0, 65.0}}};
}

// 20 MHz single-layer CQI ladder; the lowest entry sits at the -100 dBm floor.
RateTable default_lte_rates() {
  return {{{-6.0, 3.0}, {-3.0, 6.0}, {0.0, 10.0}, {3.0, 16.0}, {6.0, 24.0}, {9.0, 32.0}, {12.0, 42.0},
           {15.0, 52.0}, {18.0, 60.0}, {21.0, 68.0}}};
}

double rate_from_sinr(double sinr_db, Tech tech, const PhyConfig& phy) {
  if (std::isnan(sinr_db)) throw InvalidArgument("SINR must not be NaN");
  return (tech == Tech::wifi ? phy.wifi_rates : phy.lte_rates).rate(sinr_db);
}

int Scenario::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void Scenario::validate() const {
  if (!(building.width > 0.0) || !(building.length > 0.0)) throw ConfigError("building dimensions must be positive");
  if (!(duration_s >= 0.0)) throw ConfigError("simulation.duration_s must be >= 0");
  if (channels.empty()) throw ConfigError("simulation.channels must not be empty");
  try {
    propagation.validate();
    wifi.timing.validate();
    wifi.dcf.validate();
    lte.lbt.validate(wifi.timing);
    coordination.adaptive.validate();
    coordination.select.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  traffic.validate();
  phy.wifi_rates.validate("wifi_mac.rates");
  phy.lte_rates.validate("lte_mac.rates");
  if (wifi.frame_bytes <= 0) throw ConfigError("wifi_mac.frame_bytes must be positive");
  if (!(lte.nack_ratio > 0.0 && lte.nack_ratio <= 1.0)) throw ConfigError("lte_mac.nack_ratio must be in (0, 1]");

  for (int ch : channels) {
    CellInfo probe;
    probe.operator_cell_id = "probe";
    probe.channel = ch;
    try {
      probe.validate();
    } catch (const std::exception&) {
      throw ConfigError("simulation.channels: " + std::to_string(ch) + " is not a valid channel");
    }
  }

  std::set<std::string> names;
  bool any_base = false;
  for (const auto& n : nodes) {
    if (n.name.empty()) throw ConfigError("node without a name");
    if (n.name.size() > 32) throw ConfigError("node name '" + n.name + "' exceeds 32 bytes");
    if (!names.insert(n.name).second) throw ConfigError("duplicate node name '" + n.name + "'");
    if (!building.contains(n.position)) {
      throw ConfigError("node '" + n.name + "' lies outside the building");
    }
    any_base = any_base || n.role == Role::base;
  }
  if (!any_base) throw ConfigError("scenario needs at least one base");
  for (const auto& n : nodes) {
    if (n.role != Role::client) continue;
    const int b = index_of(n.serves);
    if (b < 0 || nodes[b].role != Role::base || nodes[b].tech != n.tech) {
      throw ConfigError("client '" + n.name + "' must serve a base of its own technology, got '" + n.serves + "'");
    }
    if (n.arrival_rate && !(*n.arrival_rate >= 0.0)) {
      throw ConfigError("client '" + n.name + "' arrival_rate must be >= 0");
    }
  }
  for (const auto& l : links) {
    if (index_of(l.a) < 0 || index_of(l.b) < 0 || l.a == l.b) {
      throw ConfigError("link override '" + l.a + "'-'" + l.b + "' does not name two distinct nodes");
    }
  }
}

namespace {

int poisson(double mean, Rng& rng) {
  const double limit = std::exp(-mean);
  double p = rng.uniform_open();
  int k = 0;
  while (p > limit) {
    p *= rng.uniform_open();
    ++k;
  }
  return k;
}

Position place_client(const Scenario& cfg, const Position& base, Rng& rng) {
  if (cfg.topology.client_radius_m <= 0.0) {
    return {rng.uniform(0.0, cfg.building.width), rng.uniform(0.0, cfg.building.length)};
  }
  for (;;) {
    const double r = cfg.topology.client_radius_m * std::sqrt(rng.uniform());
    const double phi = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const Position p{base.x + r * std::cos(phi), base.y + r * std::sin(phi)};
    if (cfg.building.contains(p)) return p;
  }
}

}  // namespace

Scenario generate_topology(const Scenario& cfg, Rng& rng) {
  for (const auto& n : cfg.nodes) {
    if (n.role == Role::base && !cfg.building.contains(n.position)) {
      throw ConfigError("base '" + n.name + "' lies outside the building");
    }
  }
  if (cfg.topology.clients_per_base < 0 || cfg.topology.poisson_mean < 0.0) {
    throw ConfigError("topology client counts must be non-negative");
  }
  Scenario out = cfg;
  for (const auto& base : cfg.nodes) {
    if (base.role != Role::base) continue;
    const int count = cfg.topology.poisson_mean > 0.0 ? poisson(cfg.topology.poisson_mean, rng)
                                                      : cfg.topology.clients_per_base;
    for (int i = 0; i < count; ++i) {
      NodeSpec c;
      c.name = base.name + "_c" + std::to_string(i);
      c.tech = base.tech;
      c.role = Role::client;
      c.position = place_client(cfg, base.position, rng);
      c.tx_power_dbm = base.tx_power_dbm;
      c.serves = base.name;
      out.nodes.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace coexist::sim
