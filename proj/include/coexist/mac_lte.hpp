#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "coexist/mac_wifi.hpp"
#include "coexist/random.hpp"
#include "coexist/units.hpp"

namespace coexist {

/// Cat-4 load-based LBT parameters of the unlicensed-LTE downlink.
struct LbtConfig {
  int cw_min = 15;
  int cw_max = 63;
  double ed_threshold_dbm = -72.0;
  Time burst_length = 8ms;
  Time max_burst = 8ms;
  Time slot = 9us;
  Time defer = 25us;  // SIFS + one slot
  Time subframe = 1ms;

  void validate(const MacTiming& wifi_timing) const;
};

enum class LbtPhase { idle, defer, backoff, tx_burst };

enum class LbtEventKind {
  data_ready,
  energy_above,
  energy_below_slot,
  defer_done,
  burst_done,
  collision_feedback,
  success_feedback,
};

enum class LbtAction { start_burst, await_feedback };

struct LbtState {
  LbtPhase phase = LbtPhase::idle;
  int cw = 15;
  int backoff_counter = 0;
  double ed_threshold_dbm = -72.0;
  Time burst_length = 8ms;
  bool has_data = false;

  static LbtState initial(const LbtConfig& cfg) {
    LbtState s;
    s.cw = cfg.cw_min;
    s.ed_threshold_dbm = cfg.ed_threshold_dbm;
    s.burst_length = cfg.burst_length;
    return s;
  }
};

struct LbtStepResult {
  LbtState state;
  std::vector<LbtAction> actions;
};

/// Advances the LBT state machine.
///
/// Legal (phase, event) pairs:
///
///   idle      data_ready, energy_above, energy_below_slot,
///             collision_feedback, success_feedback
///   defer     energy_above, defer_done
///   backoff   energy_below_slot, energy_above
///   tx_burst  burst_done, energy_above, energy_below_slot
///
/// HARQ-style feedback for a burst is delivered in idle, right after burst_done.
LbtStepResult lbt_step(const LbtState& state, LbtEventKind event, const LbtConfig& cfg, Rng& rng);

/// The doubling ladder {cw_min, 2*cw_min+1, ..., cw_max}.
std::vector<int> lbt_cw_ladder(const LbtConfig& cfg);

enum class AckWindowDecision { defer, transmit };

struct AckWindowOutcome {
  AckWindowDecision decision;
  Time window_end;       // data_end + sifs + slot
  bool ack_collision;    // a sub-threshold ACK is in flight when we transmit
};

/// What an eNB that deferred to a Wi-Fi data frame does once it ends.
/// `ack_rssi_dbm` is empty when no ACK follows the data frame.
AckWindowOutcome ack_window_check(Time data_end, std::optional<double> ack_rssi_dbm, double ed_threshold_dbm,
                                  const MacTiming& timing);

std::string_view to_string(LbtPhase phase);
std::string_view to_string(LbtEventKind kind);
std::string_view to_string(LbtAction action);

}  // namespace coexist
