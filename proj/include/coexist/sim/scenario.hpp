#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coexist/coordination.hpp"
#include "coexist/mac_lte.hpp"
#include "coexist/mac_wifi.hpp"
#include "coexist/propagation.hpp"
#include "coexist/random.hpp"

namespace coexist::sim {

enum class Tech { wifi, lte };
enum class Role { base, client };

std::string_view to_string(Tech tech);
std::string_view to_string(Role role);

struct NodeSpec {
  std::string name;
  Tech tech = Tech::wifi;
  Role role = Role::base;
  Position position;
  double tx_power_dbm = 20.0;
  std::string serves;                  // clients: name of their base
  std::optional<double> arrival_rate;  // clients: files/s, overrides traffic default
};

/// Overrides the drawn mean gain of one link (symmetric).
struct LinkOverride {
  std::string a;
  std::string b;
  std::optional<double> gain_db;  // replaces path gain + shadowing when set
  double offset_db = 0.0;         // added on top
};

struct TrafficConfig {
  enum class Model { full_buffer, file_transfer };
  Model model = Model::file_transfer;
  double file_bytes = 2e6;
  double arrival_rate = 1.0;  // files per second per client

  void validate() const;
};

struct TopologyConfig {
  int clients_per_base = 0;     // generated clients per base (fixed count)
  double poisson_mean = 0.0;    // when > 0, Poisson count per base instead
  double client_radius_m = 0.0; // 0: uniform over the building, else within this radius of the base
};

struct RateEntry {
  double sinr_db;
  double mbps;
};

/// Monotone step map from SINR to PHY rate.
struct RateTable {
  std::vector<RateEntry> entries;  // ascending in both columns

  double rate(double sinr_db) const;
  double threshold_for(double mbps) const;
  double max_rate() const;
  double min_threshold() const;
  void validate(std::string_view name) const;
};

RateTable default_wifi_rates();
RateTable default_lte_rates();

struct PhyConfig {
  double noise_floor_dbm = -94.0;
  double capture_threshold_db = 10.0;
  double link_margin_db = 3.0;  // link adaptation backoff from the mean SNR
  Time cca_delay = 4us;
  bool sense_fast_fading = false;
  RateTable wifi_rates = default_wifi_rates();
  RateTable lte_rates = default_lte_rates();
};

double rate_from_sinr(double sinr_db, Tech tech, const PhyConfig& phy = {});

struct WifiSimConfig {
  MacTiming timing;
  DcfConfig dcf;
  double ed_threshold_dbm = -62.0;
  int frame_bytes = 1500;  // aggregate size of one data frame
  Time max_ppdu = 5484us;  // caps frame_bytes at low rates
  bool beacons = true;
  bool cts_requires_idle_medium = false;
};

struct LteSimConfig {
  LbtConfig lbt;
  double nack_ratio = 0.8;  // fraction of failed subframes that counts as a collision
};

struct RelayConfig {
  bool enabled = true;
  Time latency = 100ms;
  double helper_tx_power_dbm = 20.0;
};

struct CoordinationSimConfig {
  bool adaptive_ed = false;
  AdaptiveEdConfig adaptive;
  bool channel_selection = false;
  ChannelSelectConfig select;
};

struct Scenario {
  Building building;
  std::vector<NodeSpec> nodes;
  std::vector<LinkOverride> links;
  PropagationModel propagation;
  bool shadowing = true;
  bool fast_fading = true;
  TrafficConfig traffic;
  TopologyConfig topology;
  std::vector<int> channels{36};
  std::uint64_t seed = 1;
  double duration_s = 10.0;
  PhyConfig phy;
  WifiSimConfig wifi;
  LteSimConfig lte;
  RelayConfig relay;
  CoordinationSimConfig coordination;

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
  int index_of(std::string_view name) const;
};

/// Realizes generated clients (fixed or Poisson count per base) on top of the
/// configured nodes. Deterministic in `rng`.
Scenario generate_topology(const Scenario& cfg, Rng& rng);

}  // namespace coexist::sim
