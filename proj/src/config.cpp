#include "coexist/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "coexist/errors.hpp"

namespace coexist::config {

namespace {

Json rate_rows(const sim::RateTable& t) {
  Json rows = Json::array();
  for (const auto& e : t.entries) rows.push_back(Json::array({e.sinr_db, e.mbps}));
  return rows;
}

const Json& node_template() {
  static const Json t = {{"name", ""},        {"tech", "wifi"},   {"role", "base"},       {"x", 0.0},
                         {"y", 0.0},          {"tx_power_dbm", 20.0}, {"serves", ""}, {"arrival_rate", nullptr}};
  return t;
}

const Json& link_template() {
  static const Json t = {{"a", ""}, {"b", ""}, {"gain_db", nullptr}, {"offset_db", 0.0}};
  return t;
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Template for the elements of an array-valued key, or null when the array is opaque.
const Json* element_template(const std::string& path) {
  if (path == "nodes") return &node_template();
  if (path == "links") return &link_template();
  return nullptr;
}

Json merge_at(const Json& base, const Json& user, const std::string& prefix) {
  if (base.is_object()) {
    if (!user.is_object()) throw ConfigError("config key '" + prefix + "' must be an object");
    Json out = base;
    for (auto it = user.begin(); it != user.end(); ++it) {
      const std::string key = join(prefix, it.key());
      if (!base.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
      out[it.key()] = merge_at(base[it.key()], it.value(), key);
    }
    return out;
  }
  if (const Json* tmpl = element_template(prefix)) {
    if (!user.is_array()) throw ConfigError("config key '" + prefix + "' must be an array");
    Json out = Json::array();
    for (std::size_t i = 0; i < user.size(); ++i) {
      out.push_back(merge_at(*tmpl, user[i], prefix + "." + std::to_string(i)));
    }
    return out;
  }
  return user;
}

// Walks a dotted path; returns the value or throws ConfigError with the key.
const Json& at(const Json& cfg, const std::string& path) {
  const Json* cur = &cfg;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string seg = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (cur->is_object() && cur->contains(seg)) {
      cur = &(*cur)[seg];
    } else if (cur->is_array() && !seg.empty() && seg.find_first_not_of("0123456789") == std::string::npos &&
               std::stoul(seg) < cur->size()) {
      cur = &(*cur)[std::stoul(seg)];
    } else {
      throw ConfigError("missing config key '" + path + "'");
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return *cur;
}

template <typename T>
T get(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

double num(const Json& cfg, const std::string& path) {
  const Json& v = at(cfg, path);
  if (!v.is_number()) throw ConfigError("config key '" + path + "' must be a number");
  return v.get<double>();
}

int integer(const Json& cfg, const std::string& path) {
  const Json& v = at(cfg, path);
  if (!v.is_number_integer()) throw ConfigError("config key '" + path + "' must be an integer");
  return v.get<int>();
}

bool boolean(const Json& cfg, const std::string& path) {
  const Json& v = at(cfg, path);
  if (!v.is_boolean()) throw ConfigError("config key '" + path + "' must be true or false");
  return v.get<bool>();
}

std::string str(const Json& cfg, const std::string& path) {
  const Json& v = at(cfg, path);
  if (!v.is_string()) throw ConfigError("config key '" + path + "' must be a string");
  return v.get<std::string>();
}

Time us(const Json& cfg, const std::string& path) { return from_us(num(cfg, path)); }
Time ms(const Json& cfg, const std::string& path) { return from_us(num(cfg, path) * 1e3); }

PathModel path_model(const std::string& s, const std::string& key) {
  if (s == "inh") return PathModel::inh;
  if (s == "diffusion") return PathModel::diffusion;
  throw ConfigError("config key '" + key + "' must be 'inh' or 'diffusion', got '" + s + "'");
}

sim::RateTable rates(const Json& cfg, const std::string& path) {
  const Json& v = at(cfg, path);
  if (!v.is_array()) throw ConfigError("config key '" + path + "' must be a list of [sinr_db, mbps] pairs");
  sim::RateTable t;
  for (const auto& row : v) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
      throw ConfigError("config key '" + path + "' must be a list of [sinr_db, mbps] pairs");
    }
    t.entries.push_back({row[0].get<double>(), row[1].get<double>()});
  }
  return t;
}

PropagationModel propagation(const Json& cfg) {
  PropagationModel m;
  m.variant = path_model(str(cfg, "propagation.model"), "propagation.model");
  m.carrier_ghz = num(cfg, "propagation.carrier_ghz");
  m.shadow_sigma_los_db = num(cfg, "propagation.shadow_sigma_los_db");
  m.shadow_sigma_nlos_db = num(cfg, "propagation.shadow_sigma_nlos_db");
  m.diffusion_ref_gain_db = num(cfg, "propagation.diffusion_ref_gain_db");
  m.diffusion_length_m = num(cfg, "propagation.diffusion_length_m");
  m.los.certain_m = num(cfg, "propagation.los.certain_m");
  m.los.decay_m = num(cfg, "propagation.los.decay_m");
  m.los.plateau_start_m = num(cfg, "propagation.los.plateau_start_m");
  m.los.plateau = num(cfg, "propagation.los.plateau");
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("propagation: ") + e.what());
  }
  return m;
}

Building building(const Json& cfg) {
  return {num(cfg, "building.width_m"), num(cfg, "building.length_m")};
}

}  // namespace

Json defaults() {
  const sim::PhyConfig phy;
  Json j;
  j["simulation"] = {{"seed", 1}, {"duration_s", 10.0}, {"channels", Json::array({36})}};
  j["building"] = {{"width_m", 50.0}, {"length_m", 120.0}};
  j["propagation"] = {{"model", "inh"},
                      {"carrier_ghz", 5.0},
                      {"shadow_sigma_los_db", 3.0},
                      {"shadow_sigma_nlos_db", 4.0},
                      {"shadowing", true},
                      {"fast_fading", true},
                      {"diffusion_ref_gain_db", -54.0},
                      {"diffusion_length_m", 5.5},
                      {"los", {{"certain_m", 18.0}, {"decay_m", 27.0}, {"plateau_start_m", 37.0}, {"plateau", 0.5}}}};
  j["phy"] = {{"noise_floor_dbm", -94.0},
              {"capture_threshold_db", 10.0},
              {"link_margin_db", 3.0},
              {"cca_delay_us", 4.0},
              {"sense_fast_fading", false},
              {"wifi_rates", rate_rows(phy.wifi_rates)},
              {"lte_rates", rate_rows(phy.lte_rates)}};
  j["wifi_mac"] = {{"slot_us", 9.0},
                   {"sifs_us", 16.0},
                   {"difs_us", 34.0},
                   {"ack_us", 44.0},
                   {"cts_us", 44.0},
                   {"rts_us", 52.0},
                   {"preamble_us", 20.0},
                   {"beacon_us", 300.0},
                   {"beacon_interval_ms", 100.0},
                   {"cw_min", 15},
                   {"cw_max", 1023},
                   {"retry_limit", 7},
                   {"rts_cts", true},
                   {"ed_threshold_dbm", -62.0},
                   {"frame_bytes", 1500},
                   {"max_ppdu_us", 5484.0},
                   {"beacons", true},
                   {"cts_requires_idle_medium", false}};
  j["lte_mac"] = {{"cw_min", 15},          {"cw_max", 63},        {"ed_threshold_dbm", -72.0},
                  {"burst_ms", 8.0},       {"max_burst_ms", 8.0}, {"slot_us", 9.0},
                  {"defer_us", 25.0},      {"subframe_ms", 1.0},  {"nack_ratio", 0.8}};
  j["coordination"] = {{"adaptive_ed", false},
                       {"t_default_dbm", nullptr},
                       {"t_min_dbm", -82.0},
                       {"update_period_s", 1.0},
                       {"margin_db", 0.0},
                       {"channel_selection", false},
                       {"rssi_filter_dbm", -82.0},
                       {"w1", 10.0},
                       {"w2", 1.0},
                       {"lte_timeshare_penalty", 1.5},
                       {"penalty_on_wifi_ap", true},
                       {"penalty_on_lte_enb", true},
                       {"default_utilization", 0.5}};
  j["relay"] = {{"enabled", true}, {"latency_ms", 100.0}, {"helper_tx_power_dbm", 20.0}};
  j["traffic"] = {{"model", "file_transfer"}, {"file_bytes", 2e6}, {"arrival_rate", 1.0}};
  j["topology"] = {{"clients_per_base", 0}, {"poisson_mean", 0.0}, {"client_radius_m", 0.0}};
  j["nodes"] = Json::array();
  j["links"] = Json::array();
  j["coverage"] = {{"base_x", 25.0},
                   {"base_y", 30.0},
                   {"tx_power_dbm", 20.0},
                   {"samples", 100000},
                   {"models", Json::array({"inh", "diffusion"})},
                   {"thresholds_dbm", Json::array({-62.0, -72.0})},
                   {"shadowing", true},
                   {"fast_fading", false},
                   {"multipath_margin_db", 0.0},
                   {"cdf_lo_dbm", -110.0},
                   {"cdf_hi_dbm", -20.0},
                   {"cdf_step_db", 1.0}};
  return j;
}

Json merge(const Json& base, const Json& user) { return merge_at(base, user, ""); }

Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json user;
  try {
    user = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return merge(defaults(), user);
}

void apply_override(Json& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    value = raw;
  }

  Json* cur = &cfg;
  std::string path;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = key.find('.', start);
    const std::string seg = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    path = join(path, seg);
    if (cur->is_array()) {
      std::size_t idx = 0;
      const auto [p, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), idx);
      if (ec != std::errc() || p != seg.data() + seg.size() || idx >= cur->size()) {
        throw ConfigError("unknown config key '" + path + "'");
      }
      cur = &(*cur)[idx];
    } else if (cur->is_object() && cur->contains(seg)) {
      cur = &(*cur)[seg];
    } else {
      throw ConfigError("unknown config key '" + path + "'");
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (cur->is_object() && !value.is_object()) throw ConfigError("config key '" + path + "' is a section");
  *cur = value;
}

sim::Scenario to_scenario(const Json& cfg) {
  sim::Scenario s;
  s.building = building(cfg);
  s.propagation = propagation(cfg);
  s.shadowing = boolean(cfg, "propagation.shadowing");
  s.fast_fading = boolean(cfg, "propagation.fast_fading");

  const Json& seed = at(cfg, "simulation.seed");
  if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0) {
    throw ConfigError("config key 'simulation.seed' must be a non-negative integer");
  }
  s.seed = seed.get<std::uint64_t>();
  s.duration_s = num(cfg, "simulation.duration_s");
  s.channels.clear();
  for (const auto& c : at(cfg, "simulation.channels")) s.channels.push_back(get<int>(c, "simulation.channels"));

  s.phy.noise_floor_dbm = num(cfg, "phy.noise_floor_dbm");
  s.phy.capture_threshold_db = num(cfg, "phy.capture_threshold_db");
  s.phy.link_margin_db = num(cfg, "phy.link_margin_db");
  s.phy.cca_delay = us(cfg, "phy.cca_delay_us");
  s.phy.sense_fast_fading = boolean(cfg, "phy.sense_fast_fading");
  s.phy.wifi_rates = rates(cfg, "phy.wifi_rates");
  s.phy.lte_rates = rates(cfg, "phy.lte_rates");

  auto& t = s.wifi.timing;
  t.slot = us(cfg, "wifi_mac.slot_us");
  t.sifs = us(cfg, "wifi_mac.sifs_us");
  t.difs = us(cfg, "wifi_mac.difs_us");
  t.ack_duration = us(cfg, "wifi_mac.ack_us");
  t.cts_duration = us(cfg, "wifi_mac.cts_us");
  t.rts_duration = us(cfg, "wifi_mac.rts_us");
  t.preamble = us(cfg, "wifi_mac.preamble_us");
  t.beacon_duration = us(cfg, "wifi_mac.beacon_us");
  t.beacon_interval = ms(cfg, "wifi_mac.beacon_interval_ms");
  s.wifi.dcf.cw_min = integer(cfg, "wifi_mac.cw_min");
  s.wifi.dcf.cw_max = integer(cfg, "wifi_mac.cw_max");
  s.wifi.dcf.retry_limit = integer(cfg, "wifi_mac.retry_limit");
  s.wifi.dcf.rts_cts = boolean(cfg, "wifi_mac.rts_cts");
  s.wifi.ed_threshold_dbm = num(cfg, "wifi_mac.ed_threshold_dbm");
  s.wifi.frame_bytes = integer(cfg, "wifi_mac.frame_bytes");
  s.wifi.max_ppdu = us(cfg, "wifi_mac.max_ppdu_us");
  s.wifi.beacons = boolean(cfg, "wifi_mac.beacons");
  s.wifi.cts_requires_idle_medium = boolean(cfg, "wifi_mac.cts_requires_idle_medium");
  if (s.wifi.max_ppdu <= t.preamble) throw ConfigError("config key 'wifi_mac.max_ppdu_us' must exceed the preamble");

  auto& l = s.lte.lbt;
  l.cw_min = integer(cfg, "lte_mac.cw_min");
  l.cw_max = integer(cfg, "lte_mac.cw_max");
  l.ed_threshold_dbm = num(cfg, "lte_mac.ed_threshold_dbm");
  l.burst_length = ms(cfg, "lte_mac.burst_ms");
  l.max_burst = ms(cfg, "lte_mac.max_burst_ms");
  l.slot = us(cfg, "lte_mac.slot_us");
  l.defer = us(cfg, "lte_mac.defer_us");
  l.subframe = ms(cfg, "lte_mac.subframe_ms");
  s.lte.nack_ratio = num(cfg, "lte_mac.nack_ratio");

  s.coordination.adaptive_ed = boolean(cfg, "coordination.adaptive_ed");
  s.coordination.adaptive = to_adaptive(cfg);
  s.coordination.channel_selection = boolean(cfg, "coordination.channel_selection");
  s.coordination.select = to_select(cfg);

  s.relay.enabled = boolean(cfg, "relay.enabled");
  s.relay.latency = ms(cfg, "relay.latency_ms");
  s.relay.helper_tx_power_dbm = num(cfg, "relay.helper_tx_power_dbm");
  if (s.relay.latency < Time::zero()) throw ConfigError("config key 'relay.latency_ms' must be >= 0");

  const std::string model = str(cfg, "traffic.model");
  if (model == "full_buffer") {
    s.traffic.model = sim::TrafficConfig::Model::full_buffer;
  } else if (model == "file_transfer") {
    s.traffic.model = sim::TrafficConfig::Model::file_transfer;
  } else {
    throw ConfigError("config key 'traffic.model' must be 'full_buffer' or 'file_transfer', got '" + model + "'");
  }
  s.traffic.file_bytes = num(cfg, "traffic.file_bytes");
  s.traffic.arrival_rate = num(cfg, "traffic.arrival_rate");

  s.topology.clients_per_base = integer(cfg, "topology.clients_per_base");
  s.topology.poisson_mean = num(cfg, "topology.poisson_mean");
  s.topology.client_radius_m = num(cfg, "topology.client_radius_m");

  const Json& nodes = at(cfg, "nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string p = "nodes." + std::to_string(i);
    sim::NodeSpec n;
    n.name = str(cfg, p + ".name");
    const std::string tech = str(cfg, p + ".tech");
    if (tech == "wifi") {
      n.tech = sim::Tech::wifi;
    } else if (tech == "lte") {
      n.tech = sim::Tech::lte;
    } else {
      throw ConfigError("config key '" + p + ".tech' must be 'wifi' or 'lte', got '" + tech + "'");
    }
    const std::string role = str(cfg, p + ".role");
    if (role == "base") {
      n.role = sim::Role::base;
    } else if (role == "client") {
      n.role = sim::Role::client;
    } else {
      throw ConfigError("config key '" + p + ".role' must be 'base' or 'client', got '" + role + "'");
    }
    n.position = {num(cfg, p + ".x"), num(cfg, p + ".y")};
    n.tx_power_dbm = num(cfg, p + ".tx_power_dbm");
    n.serves = str(cfg, p + ".serves");
    if (!at(cfg, p + ".arrival_rate").is_null()) n.arrival_rate = num(cfg, p + ".arrival_rate");
    s.nodes.push_back(std::move(n));
  }
  const Json& links = at(cfg, "links");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string p = "links." + std::to_string(i);
    sim::LinkOverride o;
    o.a = str(cfg, p + ".a");
    o.b = str(cfg, p + ".b");
    if (!at(cfg, p + ".gain_db").is_null()) o.gain_db = num(cfg, p + ".gain_db");
    o.offset_db = num(cfg, p + ".offset_db");
    s.links.push_back(std::move(o));
  }
  s.validate();
  return s;
}

ChannelSelectConfig to_select(const Json& cfg) {
  ChannelSelectConfig c;
  c.rssi_filter_threshold_dbm = num(cfg, "coordination.rssi_filter_dbm");
  c.w1 = num(cfg, "coordination.w1");
  c.w2 = num(cfg, "coordination.w2");
  c.lte_timeshare_penalty = num(cfg, "coordination.lte_timeshare_penalty");
  c.penalty_on_wifi_ap = boolean(cfg, "coordination.penalty_on_wifi_ap");
  c.penalty_on_lte_enb = boolean(cfg, "coordination.penalty_on_lte_enb");
  c.default_utilization = num(cfg, "coordination.default_utilization");
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("coordination: ") + e.what());
  }
  return c;
}

AdaptiveEdConfig to_adaptive(const Json& cfg) {
  AdaptiveEdConfig c;
  const Json& td = at(cfg, "coordination.t_default_dbm");
  c.t_default_dbm = td.is_null() ? num(cfg, "wifi_mac.ed_threshold_dbm") : num(cfg, "coordination.t_default_dbm");
  c.t_min_dbm = num(cfg, "coordination.t_min_dbm");
  c.update_period_s = num(cfg, "coordination.update_period_s");
  c.margin_db = num(cfg, "coordination.margin_db");
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("coordination: ") + e.what());
  }
  return c;
}

CoverageSpec to_coverage(const Json& cfg) {
  CoverageSpec c;
  c.building = building(cfg);
  c.propagation = propagation(cfg);
  c.base = {num(cfg, "coverage.base_x"), num(cfg, "coverage.base_y")};
  c.tx_power_dbm = num(cfg, "coverage.tx_power_dbm");
  const int samples = integer(cfg, "coverage.samples");
  if (samples < 1000) throw ConfigError("config key 'coverage.samples' must be at least 1000");
  c.samples = static_cast<std::size_t>(samples);
  for (const auto& m : at(cfg, "coverage.models")) {
    c.models.push_back(path_model(get<std::string>(m, "coverage.models"), "coverage.models"));
  }
  for (const auto& t : at(cfg, "coverage.thresholds_dbm")) {
    c.thresholds_dbm.push_back(get<double>(t, "coverage.thresholds_dbm"));
  }
  if (c.models.empty() || c.thresholds_dbm.empty()) {
    throw ConfigError("config keys 'coverage.models' and 'coverage.thresholds_dbm' must not be empty");
  }
  c.options.shadowing = boolean(cfg, "coverage.shadowing");
  c.options.fast_fading = boolean(cfg, "coverage.fast_fading");
  c.options.multipath_margin_db = num(cfg, "coverage.multipath_margin_db");
  c.cdf_lo_dbm = num(cfg, "coverage.cdf_lo_dbm");
  c.cdf_hi_dbm = num(cfg, "coverage.cdf_hi_dbm");
  c.cdf_step_db = num(cfg, "coverage.cdf_step_db");
  if (!(c.cdf_step_db > 0.0) || !(c.cdf_hi_dbm >= c.cdf_lo_dbm)) {
    throw ConfigError("config keys 'coverage.cdf_*' must describe a non-empty grid with a positive step");
  }
  const Json& seed = at(cfg, "simulation.seed");
  if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0) {
    throw ConfigError("config key 'simulation.seed' must be a non-negative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  return c;
}

std::vector<ScanEntry> read_scan_csv(std::istream& in) {
  std::vector<ScanEntry> out;
  std::string line;
  bool header = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("source,", 0) == 0) continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 9) {
      throw ConfigError("scan line " + std::to_string(lineno) + ": expected 9 fields, got " + std::to_string(f.size()));
    }
    try {
      ScanEntry e;
      e.source = scan_source_from_string(f[0]);
      e.cell.operator_cell_id = f[1];
      e.cell.channel = std::stoi(f[2]);
      e.rssi_dbm = std::stod(f[3]);
      e.n_attached = std::stoi(f[4]);
      e.cell.station_count = e.n_attached;
      if (!f[5].empty()) {
        e.utilization = std::stod(f[5]);
        e.cell.channel_utilization = *e.utilization;
      }
      e.cell.node_type = node_type_from_string(f[6]);
      e.cell.mac_spec = mac_spec_from_string(f[7]);
      e.cell.tx_power_offset_db = std::stoi(f[8]);
      out.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw ConfigError("scan line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace coexist::config
