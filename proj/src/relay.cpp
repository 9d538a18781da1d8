#include "coexist/relay.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "coexist/errors.hpp"

namespace coexist {

namespace {

bool valid_channel(int ch) {
  if (ch >= 1 && ch <= 14) return true;
  if (ch >= 36 && ch <= 64) return ch % 4 == 0;
  if (ch >= 100 && ch <= 144) return ch % 4 == 0;
  if (ch >= 149 && ch <= 165) return (ch - 149) % 4 == 0;
  return false;
}

InformationElement vendor_ie(std::uint8_t subtype, std::uint8_t value) {
  return {ie::kVendorSpecific, {ie::kOui[0], ie::kOui[1], ie::kOui[2], subtype, value}};
}

bool has_our_oui(const InformationElement& e) {
  return e.payload.size() >= 4 && e.payload[0] == ie::kOui[0] && e.payload[1] == ie::kOui[1] &&
         e.payload[2] == ie::kOui[2];
}

void expect_length(const InformationElement& e, std::size_t n) {
  if (e.payload.size() != n) {
    throw DecodeError(e.element_id, "expected length " + std::to_string(n) + ", got " +
                                        std::to_string(e.payload.size()));
  }
}

}  // namespace

bool is_lte(NodeType type) { return type != NodeType::wifi; }

void CellInfo::validate() const {
  if (operator_cell_id.size() > ie::kMaxSsidLength) {
    throw InvalidArgument("operator cell id longer than 32 bytes");
  }
  if (!valid_channel(channel)) throw InvalidArgument("channel " + std::to_string(channel) + " not in the unlicensed set");
  if (station_count < 0 || station_count > 0xffff) throw InvalidArgument("station count out of 16-bit range");
  if (!(channel_utilization >= 0.0 && channel_utilization <= 1.0)) {
    throw InvalidArgument("channel utilization outside [0, 1]");
  }
  if (admission_capacity < 0 || admission_capacity > 0xffff) {
    throw InvalidArgument("admission capacity out of 16-bit range");
  }
  if (tx_power_offset_db < -128 || tx_power_offset_db > 127) {
    throw InvalidArgument("tx power offset out of signed 8-bit range");
  }
}

std::uint8_t encode_utilization(double utilization) {
  const double scaled = std::floor(utilization * 255.0 + 0.5);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

double decode_utilization(std::uint8_t byte) { return static_cast<double>(byte) / 255.0; }

std::vector<InformationElement> encode_pseudo_beacon(const CellInfo& cell) {
  if (cell.operator_cell_id.size() > ie::kMaxSsidLength) {
    throw EncodeError("operator cell id '" + cell.operator_cell_id + "' exceeds the 32-byte SSID limit");
  }
  try {
    cell.validate();
  } catch (const InvalidArgument& e) {
    throw EncodeError(e.what());
  }

  std::vector<InformationElement> ies;
  ies.push_back({ie::kSsid, {cell.operator_cell_id.begin(), cell.operator_cell_id.end()}});
  const auto ch = static_cast<std::uint8_t>(cell.channel);
  ies.push_back({ie::kDsParameterSet, {ch}});

  InformationElement ht{ie::kHtOperation, std::vector<std::uint8_t>(ie::kHtOperationLength, 0)};
  ht.payload[0] = ch;
  ies.push_back(std::move(ht));

  const auto count = static_cast<std::uint16_t>(cell.station_count);
  const auto cap = static_cast<std::uint16_t>(cell.admission_capacity);
  ies.push_back({ie::kBssLoad,
                 {static_cast<std::uint8_t>(count & 0xff), static_cast<std::uint8_t>(count >> 8),
                  encode_utilization(cell.channel_utilization), static_cast<std::uint8_t>(cap & 0xff),
                  static_cast<std::uint8_t>(cap >> 8)}});

  ies.push_back(vendor_ie(ie::kSubtypeNodeType, static_cast<std::uint8_t>(cell.node_type)));
  ies.push_back(vendor_ie(ie::kSubtypeMacSpec, static_cast<std::uint8_t>(cell.mac_spec)));
  ies.push_back(vendor_ie(ie::kSubtypeTxOffset,
                          static_cast<std::uint8_t>(static_cast<std::int8_t>(cell.tx_power_offset_db))));
  return ies;
}

DecodedBeacon decode_pseudo_beacon(std::span<const InformationElement> ies) {
  DecodedBeacon out;
  CellInfo& cell = out.cell;
  bool have_ssid = false;
  bool have_ds = false;
  std::optional<int> ht_channel;

  for (const auto& e : ies) {
    switch (e.element_id) {
      case ie::kSsid:
        if (e.payload.size() > ie::kMaxSsidLength) throw DecodeError(e.element_id, "SSID longer than 32 bytes");
        if (!have_ssid) cell.operator_cell_id.assign(e.payload.begin(), e.payload.end());
        have_ssid = true;
        break;
      case ie::kDsParameterSet:
        expect_length(e, 1);
        if (!have_ds) cell.channel = e.payload[0];
        have_ds = true;
        break;
      case ie::kHtOperation:
        expect_length(e, ie::kHtOperationLength);
        if (!ht_channel) ht_channel = e.payload[0];
        break;
      case ie::kBssLoad:
        expect_length(e, ie::kBssLoadLength);
        if (!out.has_load) {
          cell.station_count = e.payload[0] | (e.payload[1] << 8);
          cell.channel_utilization = decode_utilization(e.payload[2]);
          cell.admission_capacity = e.payload[3] | (e.payload[4] << 8);
        }
        out.has_load = true;
        break;
      case ie::kVendorSpecific: {
        if (e.payload.size() < 3) throw DecodeError(e.element_id, "vendor element shorter than an OUI");
        if (!has_our_oui(e)) {
          if (e.payload.size() == 3 && e.payload[0] == ie::kOui[0] && e.payload[1] == ie::kOui[1] &&
              e.payload[2] == ie::kOui[2]) {
            throw DecodeError(e.element_id, "vendor element missing subtype");
          }
          break;
        }
        expect_length(e, 5);
        const std::uint8_t value = e.payload[4];
        switch (e.payload[3]) {
          case ie::kSubtypeNodeType:
            if (value < 1 || value > 5) throw DecodeError(e.element_id, "unknown node type " + std::to_string(value));
            cell.node_type = static_cast<NodeType>(value);
            break;
          case ie::kSubtypeMacSpec:
            if (value < 1 || value > 4) throw DecodeError(e.element_id, "unknown MAC spec " + std::to_string(value));
            cell.mac_spec = static_cast<MacSpec>(value);
            break;
          case ie::kSubtypeTxOffset:
            cell.tx_power_offset_db = static_cast<std::int8_t>(value);
            break;
          default:
            throw DecodeError(e.element_id, "unknown vendor subtype " + std::to_string(e.payload[3]));
        }
        out.pseudo = true;
        break;
      }
      default:
        break;  // other beacon elements are not ours to interpret
    }
  }

  if (!have_ssid) throw DecodeError(ie::kSsid, "missing SSID element");
  if (!have_ds) throw DecodeError(ie::kDsParameterSet, "missing DS Parameter Set element");
  if (ht_channel && *ht_channel != cell.channel) {
    throw DecodeError(ie::kHtOperation, "primary channel " + std::to_string(*ht_channel) +
                                            " disagrees with DS Parameter Set channel " +
                                            std::to_string(cell.channel));
  }
  try {
    cell.validate();
  } catch (const InvalidArgument& e) {
    throw DecodeError(ie::kDsParameterSet, e.what());
  }
  return out;
}

std::vector<std::uint8_t> serialize_ies(std::span<const InformationElement> ies) {
  std::vector<std::uint8_t> out;
  for (const auto& e : ies) {
    if (e.payload.size() > 255) throw EncodeError("element payload longer than 255 bytes");
    out.push_back(e.element_id);
    out.push_back(e.length());
    out.insert(out.end(), e.payload.begin(), e.payload.end());
  }
  return out;
}

std::vector<InformationElement> parse_ies(std::span<const std::uint8_t> bytes) {
  std::vector<InformationElement> ies;
  std::size_t i = 0;
  while (i < bytes.size()) {
    const std::uint8_t id = bytes[i];
    if (i + 1 >= bytes.size()) throw DecodeError(id, "truncated header");
    const std::size_t len = bytes[i + 1];
    if (i + 2 + len > bytes.size()) {
      throw DecodeError(id, "length " + std::to_string(len) + " runs past end of body");
    }
    ies.push_back({id, {bytes.begin() + static_cast<std::ptrdiff_t>(i + 2),
                        bytes.begin() + static_cast<std::ptrdiff_t>(i + 2 + len)}});
    i += 2 + len;
  }
  return ies;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw InvalidArgument("hex string has odd length");
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw InvalidArgument("invalid hex digit at offset " + std::to_string(i));
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

ScanEntry scan_entry_from_beacon(const DecodedBeacon& beacon, double rssi_dbm, ScanSource source) {
  ScanEntry e;
  e.source = source;
  e.cell = beacon.cell;
  e.rssi_dbm = rssi_dbm;
  e.n_attached = beacon.has_load ? beacon.cell.station_count : 0;
  if (beacon.has_load) e.utilization = beacon.cell.channel_utilization;
  return e;
}

std::vector<ScanEntry> merge_scans(std::span<const ScanEntry> ota, std::span<const ScanEntry> relayed) {
  // Within one source, keep the strongest report of each cell.
  auto collapse = [](std::span<const ScanEntry> in) {
    std::map<std::string, ScanEntry> by_id;
    for (const auto& e : in) {
      auto [it, inserted] = by_id.try_emplace(e.cell.operator_cell_id, e);
      if (!inserted && e.rssi_dbm > it->second.rssi_dbm) it->second = e;
    }
    return by_id;
  };
  auto merged = collapse(ota);
  for (auto& [id, rel] : collapse(relayed)) {
    auto it = merged.find(id);
    if (it == merged.end()) {
      merged.emplace(id, rel);
      continue;
    }
    ScanEntry& e = it->second;
    if (!is_lte(e.cell.node_type) && is_lte(rel.cell.node_type)) {
      e.cell.node_type = rel.cell.node_type;
      e.cell.mac_spec = rel.cell.mac_spec;
      e.cell.tx_power_offset_db = rel.cell.tx_power_offset_db;
    }
    if (!e.utilization && rel.utilization) {
      e.utilization = rel.utilization;
      e.n_attached = rel.n_attached;
      e.cell.station_count = rel.cell.station_count;
      e.cell.channel_utilization = rel.cell.channel_utilization;
      e.cell.admission_capacity = rel.cell.admission_capacity;
    }
  }

  std::vector<ScanEntry> out;
  out.reserve(merged.size());
  for (auto& [id, e] : merged) out.push_back(std::move(e));
  std::stable_sort(out.begin(), out.end(), [](const ScanEntry& a, const ScanEntry& b) {
    if (a.rssi_dbm != b.rssi_dbm) return a.rssi_dbm > b.rssi_dbm;
    return a.cell.operator_cell_id < b.cell.operator_cell_id;
  });
  return out;
}

std::string_view to_string(NodeType type) {
  switch (type) {
    case NodeType::rel13_laa: return "rel13_laa";
    case NodeType::rel14_elaa: return "rel14_elaa";
    case NodeType::multefire: return "multefire";
    case NodeType::lte_u: return "lte_u";
    case NodeType::wifi: return "wifi";
  }
  return "?";
}

std::string_view to_string(MacSpec spec) {
  switch (spec) {
    case MacSpec::lbt_cat4: return "lbt_cat4";
    case MacSpec::lbt_catx: return "lbt_catx";
    case MacSpec::other: return "other";
    case MacSpec::dcf: return "dcf";
  }
  return "?";
}

std::string_view to_string(ScanSource source) {
  return source == ScanSource::over_the_air ? "over_the_air" : "relayed";
}

NodeType node_type_from_string(std::string_view s) {
  for (auto t : {NodeType::rel13_laa, NodeType::rel14_elaa, NodeType::multefire, NodeType::lte_u, NodeType::wifi}) {
    if (s == to_string(t)) return t;
  }
  throw InvalidArgument("unknown node type '" + std::string(s) + "'");
}

MacSpec mac_spec_from_string(std::string_view s) {
  for (auto m : {MacSpec::lbt_cat4, MacSpec::lbt_catx, MacSpec::other, MacSpec::dcf}) {
    if (s == to_string(m)) return m;
  }
  throw InvalidArgument("unknown MAC spec '" + std::string(s) + "'");
}

ScanSource scan_source_from_string(std::string_view s) {
  if (s == "over_the_air") return ScanSource::over_the_air;
  if (s == "relayed") return ScanSource::relayed;
  throw InvalidArgument("unknown scan source '" + std::string(s) + "'");
}

}  // namespace coexist
