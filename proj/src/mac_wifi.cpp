#include "coexist/mac_wifi.hpp"

#include <algorithm>
#include <string>

#include "coexist/errors.hpp"

namespace coexist {

namespace {

bool is_cw_form(int cw) { return cw > 0 && ((cw + 1) & cw) == 0; }

[[noreturn]] void illegal(const DcfState& s, DcfEventKind e) {
  throw ProtocolViolation("dcf: event " + std::string(to_string(e)) + " illegal in phase " +
                          std::string(to_string(s.phase)));
}

void emit(DcfState& s, const DcfConfig& cfg, std::vector<DcfAction>& actions) {
  s.phase = DcfPhase::tx_data;
  if (s.frame == FrameClass::unicast && cfg.rts_cts) {
    s.stage = DcfStage::rts;
    actions.push_back(DcfAction::emit_rts);
  } else {
    s.stage = DcfStage::data;
    actions.push_back(DcfAction::emit_data);
  }
}

void finish_frame(DcfState& s) {
  s.has_frame = false;
  s.stage = DcfStage::none;
  s.retry_count = 0;
  s.phase = DcfPhase::idle;
}

void fail_attempt(DcfState& s, const DcfConfig& cfg, Rng& rng, std::vector<DcfAction>& actions) {
  ++s.retry_count;
  if (s.retry_count > cfg.retry_limit) {
    s.cw = cfg.cw_min;
    finish_frame(s);
    actions.push_back(DcfAction::frame_dropped);
    return;
  }
  s.cw = std::min(2 * s.cw + 1, cfg.cw_max);
  s.backoff_counter = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(s.cw)));
  s.stage = DcfStage::none;
  s.phase = DcfPhase::defer;
}

}  // namespace

void MacTiming::validate() const {
  if (slot <= Time::zero() || sifs <= Time::zero() || difs <= Time::zero() || ack_duration <= Time::zero() ||
      cts_duration <= Time::zero() || rts_duration <= Time::zero() || beacon_interval <= Time::zero()) {
    throw InvalidArgument("MAC timing values must be positive");
  }
  if (difs != sifs + 2 * slot) throw InvalidArgument("DIFS must equal SIFS + 2 slots");
}

void DcfConfig::validate() const {
  if (!is_cw_form(cw_min) || !is_cw_form(cw_max) || cw_min > cw_max) {
    throw InvalidArgument("contention window bounds must be 2^k-1 with cw_min <= cw_max");
  }
  if (retry_limit < 0) throw InvalidArgument("retry limit must be non-negative");
}

DcfStepResult dcf_step(const DcfState& state, DcfEvent event, const DcfConfig& cfg, Rng& rng) {
  DcfStepResult r{state, {}};
  DcfState& s = r.state;
  auto& actions = r.actions;

  switch (s.phase) {
    case DcfPhase::idle:
      switch (event.kind) {
        case DcfEventKind::packet_ready:
          s.has_frame = true;
          s.frame = event.frame;
          s.stage = DcfStage::none;
          s.backoff_counter = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(s.cw)));
          s.phase = DcfPhase::defer;
          return r;
        case DcfEventKind::medium_busy:
        case DcfEventKind::nav_expired:
          return r;
        case DcfEventKind::respond:
          s.phase = DcfPhase::tx_ack;
          actions.push_back(DcfAction::emit_response);
          return r;
        default:
          illegal(state, event.kind);
      }

    case DcfPhase::defer:
      switch (event.kind) {
        case DcfEventKind::medium_busy:
          return r;
        case DcfEventKind::defer_done:
          if (s.backoff_counter == 0) {
            emit(s, cfg, actions);
          } else {
            s.phase = DcfPhase::backoff;
          }
          return r;
        case DcfEventKind::respond:
          s.phase = DcfPhase::tx_ack;
          actions.push_back(DcfAction::emit_response);
          return r;
        default:
          illegal(state, event.kind);
      }

    case DcfPhase::backoff:
      switch (event.kind) {
        case DcfEventKind::medium_idle_slot:
          if (--s.backoff_counter == 0) emit(s, cfg, actions);
          return r;
        case DcfEventKind::medium_busy:
          s.phase = DcfPhase::defer;  // counter frozen
          return r;
        case DcfEventKind::respond:
          s.phase = DcfPhase::tx_ack;
          actions.push_back(DcfAction::emit_response);
          return r;
        default:
          illegal(state, event.kind);
      }

    case DcfPhase::tx_data:
      if (event.kind != DcfEventKind::tx_done) illegal(state, event.kind);
      if (s.frame == FrameClass::broadcast) {
        finish_frame(s);
        actions.push_back(DcfAction::frame_delivered);
      } else {
        s.phase = DcfPhase::await_ack;
        actions.push_back(DcfAction::start_response_timer);
      }
      return r;

    case DcfPhase::await_ack:
      switch (event.kind) {
        case DcfEventKind::medium_busy:
          return r;
        case DcfEventKind::cts_received:
          if (s.stage != DcfStage::rts) illegal(state, event.kind);
          s.stage = DcfStage::data;
          s.phase = DcfPhase::tx_data;
          actions.push_back(DcfAction::emit_data);
          return r;
        case DcfEventKind::ack_received:
          if (s.stage != DcfStage::data) illegal(state, event.kind);
          s.cw = cfg.cw_min;
          finish_frame(s);
          actions.push_back(DcfAction::frame_delivered);
          return r;
        case DcfEventKind::ack_timeout:
          if (s.stage != DcfStage::data) illegal(state, event.kind);
          fail_attempt(s, cfg, rng, actions);
          return r;
        case DcfEventKind::rts_cts_fail:
          if (s.stage != DcfStage::rts) illegal(state, event.kind);
          fail_attempt(s, cfg, rng, actions);
          return r;
        default:
          illegal(state, event.kind);
      }

    case DcfPhase::tx_ack:
      switch (event.kind) {
        case DcfEventKind::medium_busy:
          return r;
        case DcfEventKind::tx_done:
          s.phase = s.has_frame ? DcfPhase::defer : DcfPhase::idle;
          return r;
        default:
          illegal(state, event.kind);
      }

    case DcfPhase::nav_blocked:
      switch (event.kind) {
        case DcfEventKind::medium_busy:
          return r;
        case DcfEventKind::nav_expired:
          s.phase = s.has_frame ? DcfPhase::defer : DcfPhase::idle;
          return r;
        case DcfEventKind::packet_ready:
          if (s.has_frame) illegal(state, event.kind);
          s.has_frame = true;
          s.frame = event.frame;
          s.stage = DcfStage::none;
          s.backoff_counter = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(s.cw)));
          return r;
        case DcfEventKind::respond:
          s.phase = DcfPhase::tx_ack;
          actions.push_back(DcfAction::emit_response);
          return r;
        default:
          illegal(state, event.kind);
      }
  }
  illegal(state, event.kind);
}

DcfState nav_update(DcfState state, Time duration, Time now) {
  if (duration < Time::zero()) throw InvalidArgument("NAV duration must be non-negative");
  if (duration == Time::zero() && state.nav_until <= now) return state;
  state.nav_until = std::max(state.nav_until, now + duration);
  if (now < state.nav_until &&
      (state.phase == DcfPhase::idle || state.phase == DcfPhase::defer || state.phase == DcfPhase::backoff)) {
    state.phase = DcfPhase::nav_blocked;
  }
  return state;
}

std::pair<Time, Time> ack_schedule(Time data_end, const MacTiming& timing) {
  if (data_end < Time::zero()) throw InvalidArgument("data end must be non-negative");
  const Time start = data_end + timing.sifs;
  return {start, start + timing.ack_duration};
}

std::string_view to_string(DcfPhase phase) {
  switch (phase) {
    case DcfPhase::idle: return "idle";
    case DcfPhase::defer: return "defer";
    case DcfPhase::backoff: return "backoff";
    case DcfPhase::tx_data: return "tx_data";
    case DcfPhase::await_ack: return "await_ack";
    case DcfPhase::tx_ack: return "tx_ack";
    case DcfPhase::nav_blocked: return "nav_blocked";
  }
  return "?";
}

std::string_view to_string(DcfEventKind kind) {
  switch (kind) {
    case DcfEventKind::packet_ready: return "packet_ready";
    case DcfEventKind::medium_busy: return "medium_busy";
    case DcfEventKind::medium_idle_slot: return "medium_idle_slot";
    case DcfEventKind::defer_done: return "defer_done";
    case DcfEventKind::tx_done: return "tx_done";
    case DcfEventKind::cts_received: return "cts_received";
    case DcfEventKind::ack_received: return "ack_received";
    case DcfEventKind::ack_timeout: return "ack_timeout";
    case DcfEventKind::rts_cts_fail: return "rts_cts_fail";
    case DcfEventKind::respond: return "respond";
    case DcfEventKind::nav_expired: return "nav_expired";
  }
  return "?";
}

std::string_view to_string(DcfAction action) {
  switch (action) {
    case DcfAction::emit_rts: return "emit_rts";
    case DcfAction::emit_data: return "emit_data";
    case DcfAction::emit_response: return "emit_response";
    case DcfAction::start_response_timer: return "start_response_timer";
    case DcfAction::frame_delivered: return "frame_delivered";
    case DcfAction::frame_dropped: return "frame_dropped";
  }
  return "?";
}

}  // namespace coexist
