#include "coexist/mac_lte.hpp"

#include <algorithm>
#include <string>

#include "coexist/errors.hpp"

namespace coexist {

namespace {

[[noreturn]] void illegal(const LbtState& s, LbtEventKind e) {
  throw ProtocolViolation("lbt: event " + std::string(to_string(e)) + " illegal in phase " +
                          std::string(to_string(s.phase)));
}

void start_burst(LbtState& s, std::vector<LbtAction>& actions) {
  s.phase = LbtPhase::tx_burst;
  actions.push_back(LbtAction::start_burst);
}

}  // namespace

void LbtConfig::validate(const MacTiming& wifi_timing) const {
  auto cw_form = [](int cw) { return cw > 0 && ((cw + 1) & cw) == 0; };
  if (!cw_form(cw_min) || !cw_form(cw_max) || cw_min > cw_max) {
    throw InvalidArgument("LBT contention window bounds must be 2^k-1 with cw_min <= cw_max");
  }
  if (burst_length <= Time::zero() || burst_length > max_burst) {
    throw InvalidArgument("burst length must be positive and within the regulatory maximum");
  }
  if (slot <= Time::zero() || subframe <= Time::zero()) throw InvalidArgument("LBT timing must be positive");
  if (defer < wifi_timing.sifs + slot) throw InvalidArgument("defer period must be at least SIFS + one slot");
}

LbtStepResult lbt_step(const LbtState& state, LbtEventKind event, const LbtConfig& cfg, Rng& rng) {
  LbtStepResult r{state, {}};
  LbtState& s = r.state;

  switch (s.phase) {
    case LbtPhase::idle:
      switch (event) {
        case LbtEventKind::data_ready:
          s.has_data = true;
          s.backoff_counter = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(s.cw)));
          s.phase = LbtPhase::defer;
          return r;
        case LbtEventKind::energy_above:
        case LbtEventKind::energy_below_slot:
          return r;
        case LbtEventKind::collision_feedback:
          s.cw = std::min(2 * s.cw + 1, cfg.cw_max);
          return r;
        case LbtEventKind::success_feedback:
          s.cw = cfg.cw_min;
          return r;
        default:
          illegal(state, event);
      }

    case LbtPhase::defer:
      switch (event) {
        case LbtEventKind::energy_above:
          return r;
        case LbtEventKind::defer_done:
          if (s.backoff_counter == 0) {
            start_burst(s, r.actions);
          } else {
            s.phase = LbtPhase::backoff;
          }
          return r;
        default:
          illegal(state, event);
      }

    case LbtPhase::backoff:
      switch (event) {
        case LbtEventKind::energy_below_slot:
          if (--s.backoff_counter == 0) start_burst(s, r.actions);
          return r;
        case LbtEventKind::energy_above:
          s.phase = LbtPhase::defer;  // counter preserved
          return r;
        default:
          illegal(state, event);
      }

    case LbtPhase::tx_burst:
      switch (event) {
        case LbtEventKind::burst_done:
          s.has_data = false;
          s.phase = LbtPhase::idle;
          r.actions.push_back(LbtAction::await_feedback);
          return r;
        case LbtEventKind::energy_above:
        case LbtEventKind::energy_below_slot:
          return r;
        default:
          illegal(state, event);
      }
  }
  illegal(state, event);
}

std::vector<int> lbt_cw_ladder(const LbtConfig& cfg) {
  std::vector<int> ladder{cfg.cw_min};
  while (ladder.back() < cfg.cw_max) ladder.push_back(std::min(2 * ladder.back() + 1, cfg.cw_max));
  return ladder;
}

AckWindowOutcome ack_window_check(Time data_end, std::optional<double> ack_rssi_dbm, double ed_threshold_dbm,
                                  const MacTiming& timing) {
  AckWindowOutcome out{AckWindowDecision::transmit, data_end + timing.sifs + timing.slot, false};
  if (!ack_rssi_dbm) return out;
  if (*ack_rssi_dbm >= ed_threshold_dbm) {
    out.decision = AckWindowDecision::defer;
  } else {
    out.ack_collision = true;
  }
  return out;
}

std::string_view to_string(LbtPhase phase) {
  switch (phase) {
    case LbtPhase::idle: return "idle";
    case LbtPhase::defer: return "defer";
    case LbtPhase::backoff: return "backoff";
    case LbtPhase::tx_burst: return "tx_burst";
  }
  return "?";
}

std::string_view to_string(LbtEventKind kind) {
  switch (kind) {
    case LbtEventKind::data_ready: return "data_ready";
    case LbtEventKind::energy_above: return "energy_above";
    case LbtEventKind::energy_below_slot: return "energy_below_slot";
    case LbtEventKind::defer_done: return "defer_done";
    case LbtEventKind::burst_done: return "burst_done";
    case LbtEventKind::collision_feedback: return "collision_feedback";
    case LbtEventKind::success_feedback: return "success_feedback";
  }
  return "?";
}

std::string_view to_string(LbtAction action) {
  switch (action) {
    case LbtAction::start_burst: return "start_burst";
    case LbtAction::await_feedback: return "await_feedback";
  }
  return "?";
}

}  // namespace coexist
