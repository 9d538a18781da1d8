#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coexist/coordination.hpp"
#include "coexist/sensing.hpp"
#include "coexist/sim/scenario.hpp"

namespace coexist::config {

using Json = nlohmann::ordered_json;

/// Complete configuration tree with every default filled in.
Json defaults();

/// Overlays `user` on `base`. Unknown keys raise ConfigError naming the dotted key.
Json merge(const Json& base, const Json& user);

/// Parses a JSON file and merges it over defaults().
Json load_file(const std::string& path);

/// Applies one "dotted.key=value" override. The value is read as JSON when it
/// parses, else as a string. Array elements are addressed by index (nodes.0.x).
void apply_override(Json& cfg, std::string_view assignment);

sim::Scenario to_scenario(const Json& cfg);
ChannelSelectConfig to_select(const Json& cfg);
AdaptiveEdConfig to_adaptive(const Json& cfg);

struct CoverageSpec {
  Building building;
  PropagationModel propagation;
  Position base{25.0, 30.0};
  double tx_power_dbm = 20.0;
  std::size_t samples = 100000;
  std::vector<PathModel> models;
  std::vector<double> thresholds_dbm;
  CoverageOptions options;
  double cdf_lo_dbm = -110.0;
  double cdf_hi_dbm = -20.0;
  double cdf_step_db = 1.0;
  std::uint64_t seed = 1;
};
CoverageSpec to_coverage(const Json& cfg);

/// Scan records as CSV:
/// source,cell_id,channel,rssi_dbm,n_attached,utilization,node_type,mac_spec,tx_power_offset_db
/// An empty utilization field means the neighbour sent no load element.
std::vector<ScanEntry> read_scan_csv(std::istream& in);

}  // namespace coexist::config
