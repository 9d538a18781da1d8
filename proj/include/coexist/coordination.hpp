#pragma once

#include <span>
#include <vector>

#include "coexist/relay.hpp"

namespace coexist {

enum class RunningOn { wifi_ap, lte_enb };

struct ChannelSelectConfig {
  double rssi_filter_threshold_dbm = -82.0;
  double w1 = 10.0;  // weight on average utilization
  double w2 = 1.0;   // weight on attached clients
  double lte_timeshare_penalty = 1.5;
  bool penalty_on_wifi_ap = true;  // Wi-Fi APs also penalize uLTE neighbours
  bool penalty_on_lte_enb = true;
  double default_utilization = 0.5;  // for neighbours without a load element

  void validate() const;
};

struct ChannelMetric {
  int channel = 0;
  double metric = 0.0;
  std::vector<ScanEntry> contributors;
};

struct AdaptiveEdConfig {
  double t_default_dbm = -62.0;
  double t_min_dbm = -82.0;
  double update_period_s = 1.0;
  double margin_db = 0.0;

  void validate() const;
};

/// RSSI with the uLTE tx power offset applied (once).
double effective_rssi(const ScanEntry& entry);

std::vector<ScanEntry> filter_scan(std::span<const ScanEntry> scan, const ChannelSelectConfig& cfg,
                                   RunningOn running_on);

/// True when `entry` is of the other technology and the penalty applies on `running_on`.
bool penalized(const ScanEntry& entry, const ChannelSelectConfig& cfg, RunningOn running_on);

ChannelMetric channel_metric(int channel, std::span<const ScanEntry> entries_on_channel,
                             const ChannelSelectConfig& cfg, RunningOn running_on);

int select_channel(std::span<const ChannelMetric> metrics);

/// Full pipeline: filter, group by candidate channel, score, pick.
struct ChannelSelection {
  int channel = 0;
  std::vector<ChannelMetric> metrics;
};
ChannelSelection select_channel_from_scan(std::span<const ScanEntry> scan, std::span<const int> candidates,
                                          const ChannelSelectConfig& cfg, RunningOn running_on);

/// New ED threshold from a scan of co-channel neighbours on `channel`.
double adapt_ed_threshold(std::span<const ScanEntry> scan, int channel, const AdaptiveEdConfig& cfg);

}  // namespace coexist
