#include "coexist/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coexist/errors.hpp"

namespace coexist {

void ChannelSelectConfig::validate() const {
  if (!(w1 >= 0.0) || !(w2 >= 0.0) || (w1 == 0.0 && w2 == 0.0)) {
    throw InvalidArgument("channel metric weights must be non-negative and not both zero");
  }
  if (!(lte_timeshare_penalty >= 1.0)) throw InvalidArgument("timeshare penalty must be >= 1");
  if (!(default_utilization >= 0.0 && default_utilization <= 1.0)) {
    throw InvalidArgument("default utilization outside [0, 1]");
  }
}

void AdaptiveEdConfig::validate() const {
  if (!(t_min_dbm <= t_default_dbm)) throw InvalidArgument("t_min must not exceed t_default");
  if (!(update_period_s > 0.0)) throw InvalidArgument("update period must be positive");
  if (!std::isfinite(margin_db) || margin_db < 0.0) throw InvalidArgument("margin must be finite and >= 0");
}

double effective_rssi(const ScanEntry& entry) {
  if (entry.rssi_adjusted || !is_lte(entry.cell.node_type)) return entry.rssi_dbm;
  return entry.rssi_dbm + entry.cell.tx_power_offset_db;
}

std::vector<ScanEntry> filter_scan(std::span<const ScanEntry> scan, const ChannelSelectConfig& cfg,
                                   RunningOn /*running_on*/) {
  std::vector<ScanEntry> kept;
  for (const auto& e : scan) {
    ScanEntry adjusted = e;
    adjusted.rssi_dbm = effective_rssi(e);
    adjusted.rssi_adjusted = true;
    if (adjusted.rssi_dbm >= cfg.rssi_filter_threshold_dbm) kept.push_back(std::move(adjusted));
  }
  return kept;
}

bool penalized(const ScanEntry& entry, const ChannelSelectConfig& cfg, RunningOn running_on) {
  const bool lte_entry = is_lte(entry.cell.node_type);
  if (running_on == RunningOn::wifi_ap) return cfg.penalty_on_wifi_ap && lte_entry;
  return cfg.penalty_on_lte_enb && !lte_entry;
}

ChannelMetric channel_metric(int channel, std::span<const ScanEntry> entries_on_channel,
                             const ChannelSelectConfig& cfg, RunningOn running_on) {
  ChannelMetric m;
  m.channel = channel;
  if (entries_on_channel.empty()) return m;

  double util_sum = 0.0;
  double attached_sum = 0.0;
  for (const auto& e : entries_on_channel) {
    if (e.cell.channel != channel) {
      throw InvalidArgument("entry '" + e.cell.operator_cell_id + "' is on channel " +
                            std::to_string(e.cell.channel) + ", not " + std::to_string(channel));
    }
    const double factor = penalized(e, cfg, running_on) ? cfg.lte_timeshare_penalty : 1.0;
    util_sum += factor * e.utilization.value_or(cfg.default_utilization);
    attached_sum += factor * e.n_attached;
  }
  m.metric = cfg.w1 * util_sum / static_cast<double>(entries_on_channel.size()) + cfg.w2 * attached_sum;
  m.contributors.assign(entries_on_channel.begin(), entries_on_channel.end());
  return m;
}

int select_channel(std::span<const ChannelMetric> metrics) {
  if (metrics.empty()) throw InvalidArgument("no candidate channels");
  const ChannelMetric* best = &metrics.front();
  for (const auto& m : metrics) {
    if (m.metric < best->metric || (m.metric == best->metric && m.channel < best->channel)) best = &m;
  }
  return best->channel;
}

ChannelSelection select_channel_from_scan(std::span<const ScanEntry> scan, std::span<const int> candidates,
                                          const ChannelSelectConfig& cfg, RunningOn running_on) {
  const auto kept = filter_scan(scan, cfg, running_on);
  ChannelSelection sel;
  for (int ch : candidates) {
    std::vector<ScanEntry> on_channel;
    std::copy_if(kept.begin(), kept.end(), std::back_inserter(on_channel),
                 [ch](const ScanEntry& e) { return e.cell.channel == ch; });
    sel.metrics.push_back(channel_metric(ch, on_channel, cfg, running_on));
  }
  sel.channel = select_channel(sel.metrics);
  return sel;
}

double adapt_ed_threshold(std::span<const ScanEntry> scan, int channel, const AdaptiveEdConfig& cfg) {
  bool any = false;
  double weakest = 0.0;
  for (const auto& e : scan) {
    if (e.cell.channel != channel || e.n_attached <= 0) continue;
    const double r = effective_rssi(e);
    weakest = any ? std::min(weakest, r) : r;
    any = true;
  }
  if (!any) return cfg.t_default_dbm;
  return std::clamp(weakest - cfg.margin_db, cfg.t_min_dbm, cfg.t_default_dbm);
}

}  // namespace coexist
