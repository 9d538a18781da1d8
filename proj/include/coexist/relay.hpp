#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coexist {

enum class NodeType : std::uint8_t { rel13_laa = 1, rel14_elaa = 2, multefire = 3, lte_u = 4, wifi = 5 };
enum class MacSpec : std::uint8_t { lbt_cat4 = 1, lbt_catx = 2, other = 3, dcf = 4 };

bool is_lte(NodeType type);

/// Identity and load of a cell as carried in a (pseudo) beacon.
struct CellInfo {
  std::string operator_cell_id;  // PLMN + cell id, at most 32 bytes
  int channel = 36;
  int station_count = 0;               // 0..65535
  double channel_utilization = 0.0;    // [0, 1], carried as round(u * 255)
  int admission_capacity = 0;          // opaque 16-bit value
  NodeType node_type = NodeType::wifi;
  MacSpec mac_spec = MacSpec::dcf;
  int tx_power_offset_db = 0;          // -128..127, relative to the helper AP beacon

  void validate() const;
  bool operator==(const CellInfo&) const = default;
};

struct InformationElement {
  std::uint8_t element_id = 0;
  std::vector<std::uint8_t> payload;

  std::uint8_t length() const { return static_cast<std::uint8_t>(payload.size()); }
  bool operator==(const InformationElement&) const = default;
};

namespace ie {
inline constexpr std::uint8_t kSsid = 0;
inline constexpr std::uint8_t kDsParameterSet = 3;
inline constexpr std::uint8_t kBssLoad = 11;
inline constexpr std::uint8_t kHtOperation = 61;
inline constexpr std::uint8_t kVendorSpecific = 221;

inline constexpr std::uint8_t kOui[3] = {0x00, 0x00, 0x00};
inline constexpr std::uint8_t kSubtypeNodeType = 1;
inline constexpr std::uint8_t kSubtypeMacSpec = 2;
inline constexpr std::uint8_t kSubtypeTxOffset = 3;

inline constexpr std::size_t kHtOperationLength = 22;
inline constexpr std::size_t kBssLoadLength = 5;
inline constexpr std::size_t kMaxSsidLength = 32;
}  // namespace ie

std::uint8_t encode_utilization(double utilization);
double decode_utilization(std::uint8_t byte);

std::vector<InformationElement> encode_pseudo_beacon(const CellInfo& cell);

struct DecodedBeacon {
  CellInfo cell;
  bool pseudo = false;    // vendor elements with our OUI were present
  bool has_load = false;  // a BSS Load element was present
};

/// Legacy beacons (no vendor elements) decode to a Wi-Fi view of the cell.
/// Throws DecodeError on malformed elements.
DecodedBeacon decode_pseudo_beacon(std::span<const InformationElement> ies);

/// Element list <-> raw body bytes (id, length, payload)*.
std::vector<std::uint8_t> serialize_ies(std::span<const InformationElement> ies);
std::vector<InformationElement> parse_ies(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

enum class ScanSource { over_the_air, relayed };

struct ScanEntry {
  ScanSource source = ScanSource::over_the_air;
  CellInfo cell;
  double rssi_dbm = -100.0;
  int n_attached = 0;
  std::optional<double> utilization;
  bool rssi_adjusted = false;  // tx power offset already folded into rssi_dbm

  bool operator==(const ScanEntry&) const = default;
};

/// Builds a scan entry from a decoded beacon heard at `rssi_dbm`.
ScanEntry scan_entry_from_beacon(const DecodedBeacon& beacon, double rssi_dbm, ScanSource source);

/// Union of over-the-air and relayed scans keyed by operator_cell_id.
std::vector<ScanEntry> merge_scans(std::span<const ScanEntry> ota, std::span<const ScanEntry> relayed);

std::string_view to_string(NodeType type);
std::string_view to_string(MacSpec spec);
std::string_view to_string(ScanSource source);
NodeType node_type_from_string(std::string_view s);
MacSpec mac_spec_from_string(std::string_view s);
ScanSource scan_source_from_string(std::string_view s);

}  // namespace coexist
