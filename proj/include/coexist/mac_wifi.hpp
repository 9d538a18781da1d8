#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "coexist/random.hpp"
#include "coexist/units.hpp"

namespace coexist {

/// 802.11 OFDM timing. Control frame durations are at the lowest MCS.
struct MacTiming {
  Time slot = 9us;
  Time sifs = 16us;
  Time difs = 34us;
  Time ack_duration = 44us;
  Time cts_duration = 44us;
  Time rts_duration = 52us;
  Time preamble = 20us;
  Time beacon_duration = 300us;
  Time beacon_interval = 100ms;

  /// Throws InvalidArgument unless difs == sifs + 2 slots and all values are positive.
  void validate() const;
};

struct DcfConfig {
  int cw_min = 15;
  int cw_max = 1023;
  int retry_limit = 7;
  bool rts_cts = true;

  void validate() const;
};

enum class DcfPhase { idle, defer, backoff, tx_data, await_ack, tx_ack, nav_blocked };

/// Which part of the current access attempt is outstanding.
enum class DcfStage { none, rts, data };

enum class FrameClass { unicast, broadcast };

enum class DcfEventKind {
  packet_ready,      // a frame was queued for transmission
  medium_busy,       // energy at or above the ED threshold was sensed
  medium_idle_slot,  // one full idle slot elapsed during backoff
  defer_done,        // DIFS of continuous idle medium elapsed
  tx_done,           // our own transmission ended
  cts_received,
  ack_received,
  ack_timeout,
  rts_cts_fail,      // CTS timeout after an RTS
  respond,           // we must answer with CTS/ACK after SIFS
  nav_expired,
};

struct DcfEvent {
  DcfEventKind kind;
  FrameClass frame = FrameClass::unicast;  // only read by packet_ready
};

enum class DcfAction {
  emit_rts,
  emit_data,
  emit_response,
  start_response_timer,
  frame_delivered,
  frame_dropped,
};

struct DcfState {
  DcfPhase phase = DcfPhase::idle;
  int cw = 15;
  int backoff_counter = 0;
  Time nav_until = Time::zero();
  int retry_count = 0;
  bool has_frame = false;
  FrameClass frame = FrameClass::unicast;
  DcfStage stage = DcfStage::none;

  static DcfState initial(const DcfConfig& cfg) {
    DcfState s;
    s.cw = cfg.cw_min;
    return s;
  }
};

struct DcfStepResult {
  DcfState state;
  std::vector<DcfAction> actions;
};

/// Advances the DCF transmitter/receiver by one event.
///
/// Legal (phase, event) pairs:
///
///   idle         packet_ready, medium_busy, respond, nav_expired
///   defer        medium_busy, defer_done, respond
///   backoff      medium_idle_slot, medium_busy, respond
///   tx_data      tx_done
///   await_ack    cts_received (stage rts), ack_received / ack_timeout (stage data),
///                rts_cts_fail (stage rts), medium_busy
///   tx_ack       tx_done, medium_busy
///   nav_blocked  nav_expired, medium_busy, packet_ready, respond
///
/// Anything else throws ProtocolViolation.
DcfStepResult dcf_step(const DcfState& state, DcfEvent event, const DcfConfig& cfg, Rng& rng);

/// Virtual carrier sense: extends the NAV to now + duration if that is later.
DcfState nav_update(DcfState state, Time duration, Time now);

/// Start and end of the ACK answering a data frame that ends at `data_end`.
std::pair<Time, Time> ack_schedule(Time data_end, const MacTiming& timing);

std::string_view to_string(DcfPhase phase);
std::string_view to_string(DcfEventKind kind);
std::string_view to_string(DcfAction action);

}  // namespace coexist
