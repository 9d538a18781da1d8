#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "coexist/errors.hpp"
#include "coexist/relay.hpp"
#include "coexist/sensing.hpp"
#include "coexist/sim/event_queue.hpp"
#include "coexist/sim/simulator.hpp"

namespace coexist::sim {

std::vector<double> Metrics::client_throughputs(Tech tech) const {
  std::vector<double> out;
  for (const auto& n : nodes) {
    if (n.tech == tech && n.role == Role::client) {
      out.insert(out.end(), n.throughputs_mbps.begin(), n.throughputs_mbps.end());
    }
  }
  return out;
}

TraceSink::TraceSink(std::ostream& out) : out_(out) {}

void TraceSink::header() { out_ << "time_ns,node,tech,event,from,to,actions\n"; }

void TraceSink::record(Time t, std::string_view node, Tech tech, std::string_view event, std::string_view from,
                       std::string_view to, std::string_view actions) {
  out_ << t.count() << ',' << node << ',' << to_string(tech) << ',' << event << ',' << from << ',' << to << ','
       << actions << '\n';
}

double summarize(std::span<const double> values, double percentile) {
  if (values.empty()) throw InvalidArgument("summarize: empty value list");
  if (!(percentile >= 0.0 && percentile <= 100.0)) throw InvalidArgument("percentile must be in [0, 100]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = percentile / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

double jain_index(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("jain_index: empty value list");
  double sum = 0.0;
  double sq = 0.0;
  for (double x : values) {
    if (x < 0.0) throw InvalidArgument("jain_index: negative value");
    sum += x;
    sq += x * x;
  }
  if (sq == 0.0) return 1.0;
  return sum * sum / (static_cast<double>(values.size()) * sq);
}

namespace {

enum class TxKind { rts, cts, data, ack, beacon, burst };

std::string_view kind_name(TxKind k) {
  switch (k) {
    case TxKind::rts: return "rts";
    case TxKind::cts: return "cts";
    case TxKind::data: return "data";
    case TxKind::ack: return "ack";
    case TxKind::beacon: return "beacon";
    case TxKind::burst: return "burst";
  }
  return "?";
}

struct Tx {
  std::uint64_t id = 0;
  TxKind kind = TxKind::data;
  int src = -1;
  int dst = -1;  // -1 broadcast
  int channel = 0;
  Time start{};
  Time end{};
  double rate_mbps = 0.0;
  double bits = 0.0;
  Time nav{};
  Time answers_end{};  // cts/ack: end of the frame being answered
  int subframes = 0;
  double bits_per_subframe = 0.0;
  bool visible = false;
  bool ended = false;
  // burst outcome
  double delivered_bits = 0.0;
  int failed_subframes = 0;
};

struct File {
  Time arrival{};
  double total = 0.0;
  double left = 0.0;
};

struct Frame {
  bool beacon = false;
  int dst = -1;
  double bits = 0.0;
  double rate_mbps = 0.0;
  Time data_duration{};
};

struct PendingResponse {
  TxKind kind = TxKind::cts;
  int dst = -1;
  Time nav{};
  Time answers_end{};
};

enum class Timer { none, defer, backoff };

struct Node {
  NodeSpec spec;
  int channel = 0;
  int base = -1;
  std::vector<int> clients;
  std::size_t rr = 0;
  double ed_dbm = 0.0;
  double default_ed_dbm = 0.0;
  bool busy = false;
  std::uint64_t current_tx = 0;

  Timer timer = Timer::none;
  Time anchor{};
  std::uint64_t access_gen = 0;
  std::uint64_t resp_gen = 0;
  std::uint64_t nav_gen = 0;

  DcfState dcf;
  LbtState lbt;
  Frame frame;
  bool beacon_pending = false;
  PendingResponse pending;

  // clients
  std::deque<File> files;
  double rate_mbps = 0.0;  // link-adapted rate from the base
  double arrival_rate = 0.0;

  std::map<std::string, ScanEntry> ota;
  std::map<std::string, ScanEntry> relayed;

  Time tx_time{};
  Time tx_time_at_beacon{};
  NodeMetrics m;
};

enum class Ev {
  visible,
  tx_end,
  tx_begin,
  access_timer,
  response_timeout,
  nav_expire,
  arrival,
  beacon_tick,
  relay_cell,
  pseudo_beacon,
  relay_scan,
  adapt_tick,
};

struct Event {
  Ev kind;
  int node = -1;
  std::uint64_t gen = 0;  // timer generation or tx id
  std::size_t aux = 0;    // payload index
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string join_actions(const std::vector<DcfAction>& a) {
  std::string s;
  for (auto x : a) {
    if (!s.empty()) s += ';';
    s += to_string(x);
  }
  return s;
}

std::string join_actions(const std::vector<LbtAction>& a) {
  std::string s;
  for (auto x : a) {
    if (!s.empty()) s += ';';
    s += to_string(x);
  }
  return s;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

class Engine {
 public:
  Engine(const Scenario& sc, TraceSink* trace) : trace_(trace), mac_rng_(Rng::substream(sc.seed, 3)) {
    sc.validate();
    Rng topo = Rng::substream(sc.seed, 0);
    sc_ = generate_topology(sc, topo);
    sc_.validate();
    traffic_rng_ = Rng::substream(sc_.seed, 2);
    end_ = from_seconds(sc_.duration_s);
    fade_seed_ = splitmix(sc_.seed ^ 0x5eedfadeULL);
    build_nodes();
    build_gains();
    select_channels();
    link_adaptation();
  }

  Metrics run() {
    Metrics out;
    out.duration_s = sc_.duration_s;
    if (end_ > Time::zero()) {
      schedule_initial();
      while (!q_.empty() && q_.next_time() < end_) {
        auto e = q_.pop();
        ++out.events;
        dispatch(e.payload);
      }
      account_airtime(end_);
    }
    finish(out);
    return out;
  }

 private:
  // ---- setup ----

  void build_nodes() {
    nodes_.resize(sc_.nodes.size());
    for (std::size_t i = 0; i < sc_.nodes.size(); ++i) {
      Node& n = nodes_[i];
      n.spec = sc_.nodes[i];
      n.channel = sc_.channels.front();
      n.default_ed_dbm = n.spec.tech == Tech::wifi ? sc_.wifi.ed_threshold_dbm : sc_.lte.lbt.ed_threshold_dbm;
      n.ed_dbm = n.default_ed_dbm;
      n.dcf = DcfState::initial(sc_.wifi.dcf);
      n.lbt = LbtState::initial(sc_.lte.lbt);
      n.m.name = n.spec.name;
      n.m.tech = n.spec.tech;
      n.m.role = n.spec.role;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      Node& n = nodes_[i];
      if (n.spec.role != Role::client) continue;
      n.base = sc_.index_of(n.spec.serves);
      nodes_[n.base].clients.push_back(static_cast<int>(i));
      n.arrival_rate = n.spec.arrival_rate.value_or(sc_.traffic.arrival_rate);
    }
  }

  void build_gains() {
    const std::size_t n = nodes_.size();
    gain_.assign(n, std::vector<double>(n, 0.0));
    Rng rng = Rng::substream(sc_.seed, 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = std::max(distance(nodes_[i].spec.position, nodes_[j].spec.position), 1.0);
        const LinkDraw draw = draw_link(sc_.propagation, d, rng, sc_.shadowing);
        gain_[i][j] = gain_[j][i] = draw.mean_gain_db();
      }
    }
    for (const auto& l : sc_.links) {
      const int a = sc_.index_of(l.a);
      const int b = sc_.index_of(l.b);
      double g = l.gain_db ? *l.gain_db : gain_[a][b];
      g += l.offset_db;
      gain_[a][b] = gain_[b][a] = g;
    }
  }

  double rx_dbm(int from, int to) const { return nodes_[from].spec.tx_power_dbm + gain_[from][to]; }

  CellInfo cell_of(int b, double utilization) const {
    const Node& n = nodes_[b];
    CellInfo c;
    c.operator_cell_id = n.spec.name;
    c.channel = n.channel;
    c.station_count = static_cast<int>(n.clients.size());
    c.channel_utilization = std::clamp(utilization, 0.0, 1.0);
    c.admission_capacity = 0;
    if (n.spec.tech == Tech::wifi) {
      c.node_type = NodeType::wifi;
      c.mac_spec = MacSpec::dcf;
    } else {
      c.node_type = NodeType::rel13_laa;
      c.mac_spec = MacSpec::lbt_cat4;
      c.tx_power_offset_db =
          static_cast<int>(std::clamp(std::lround(n.spec.tx_power_dbm - sc_.relay.helper_tx_power_dbm), -128L, 127L));
    }
    return c;
  }

  // Rssi of base `from`'s beacon at base `to`, or nothing when it cannot be heard.
  std::optional<double> beacon_rssi(int from, int to) const {
    const Node& f = nodes_[from];
    double r = 0.0;
    if (f.spec.tech == Tech::wifi) {
      if (nodes_[to].spec.tech == Tech::lte && !sc_.relay.enabled) return std::nullopt;
      r = rx_dbm(from, to);
    } else {
      if (!sc_.relay.enabled) return std::nullopt;
      r = sc_.relay.helper_tx_power_dbm + gain_[from][to];
    }
    if (r - sc_.phy.noise_floor_dbm < sc_.phy.wifi_rates.min_threshold()) return std::nullopt;
    return r;
  }

  void select_channels() {
    if (!sc_.coordination.channel_selection) return;
    for (std::size_t b = 0; b < nodes_.size(); ++b) {
      if (nodes_[b].spec.role != Role::base) continue;
      std::vector<ScanEntry> scan;
      for (std::size_t o = 0; o < nodes_.size(); ++o) {
        if (o == b || nodes_[o].spec.role != Role::base) continue;
        const auto r = beacon_rssi(static_cast<int>(o), static_cast<int>(b));
        if (!r) continue;
        ScanEntry e;
        e.source = nodes_[b].spec.tech == Tech::wifi ? ScanSource::over_the_air : ScanSource::relayed;
        e.cell = cell_of(static_cast<int>(o), 0.0);
        e.rssi_dbm = *r;
        e.n_attached = e.cell.station_count;
        scan.push_back(e);
      }
      const RunningOn on = nodes_[b].spec.tech == Tech::wifi ? RunningOn::wifi_ap : RunningOn::lte_enb;
      const auto sel = select_channel_from_scan(scan, sc_.channels, sc_.coordination.select, on);
      nodes_[b].channel = sel.channel;
      for (int c : nodes_[b].clients) nodes_[c].channel = sel.channel;
    }
  }

  void link_adaptation() {
    for (auto& n : nodes_) {
      if (n.spec.role != Role::client) continue;
      const int b = n.base;
      const double snr = rx_dbm(b, static_cast<int>(&n - nodes_.data())) - sc_.phy.noise_floor_dbm;
      const RateTable& table = n.spec.tech == Tech::wifi ? sc_.phy.wifi_rates : sc_.phy.lte_rates;
      double r = table.rate(snr - sc_.phy.link_margin_db);
      if (r <= 0.0) r = table.entries.front().mbps;
      n.rate_mbps = r;
    }
  }

  void schedule_initial() {
    Rng& tr = traffic_rng_;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      Node& n = nodes_[i];
      if (n.spec.role == Role::client) {
        if (sc_.traffic.model == TrafficConfig::Model::full_buffer) {
          n.files.push_back({Time::zero(), kInf, kInf});
          q_.push(Time::zero(), {Ev::arrival, static_cast<int>(i), 0, 1});
        } else if (n.arrival_rate > 0.0) {
          q_.push(from_seconds(tr.exponential(1.0 / n.arrival_rate)), {Ev::arrival, static_cast<int>(i)});
        }
        continue;
      }
      if (n.spec.tech == Tech::wifi && sc_.wifi.beacons) {
        q_.push(Time::zero(), {Ev::beacon_tick, static_cast<int>(i)});
      }
      if (n.spec.tech == Tech::lte && sc_.relay.enabled) {
        q_.push(Time::zero(), {Ev::relay_cell, static_cast<int>(i)});
      }
      if (sc_.coordination.adaptive_ed) {
        q_.push(sc_.relay.latency + sc_.wifi.timing.beacon_interval, {Ev::adapt_tick, static_cast<int>(i)});
      }
    }
  }

  // ---- tracing ----

  void trace(int node, std::string_view event, std::string_view from, std::string_view to,
             std::string_view actions) {
    if (!trace_) return;
    trace_->record(q_.now(), nodes_[node].spec.name, nodes_[node].spec.tech, event, from, to, actions);
  }

  // ---- MAC stepping ----

  DcfStepResult dcf(int n, DcfEventKind kind, FrameClass frame = FrameClass::unicast) {
    Node& node = nodes_[n];
    const DcfPhase from = node.dcf.phase;
    DcfStepResult r = dcf_step(node.dcf, DcfEvent{kind, frame}, sc_.wifi.dcf, mac_rng_);
    node.dcf = r.state;
    trace(n, to_string(kind), to_string(from), to_string(node.dcf.phase), join_actions(r.actions));
    return r;
  }

  LbtStepResult lbt(int n, LbtEventKind kind) {
    Node& node = nodes_[n];
    const LbtPhase from = node.lbt.phase;
    LbtStepResult r = lbt_step(node.lbt, kind, sc_.lte.lbt, mac_rng_);
    node.lbt = r.state;
    trace(n, to_string(kind), to_string(from), to_string(node.lbt.phase), join_actions(r.actions));
    return r;
  }

  bool contending(const Node& n) const {
    if (n.spec.tech == Tech::wifi) return n.dcf.phase == DcfPhase::defer || n.dcf.phase == DcfPhase::backoff;
    return n.lbt.phase == LbtPhase::defer || n.lbt.phase == LbtPhase::backoff;
  }

  Time slot_of(const Node& n) const { return n.spec.tech == Tech::wifi ? sc_.wifi.timing.slot : sc_.lte.lbt.slot; }
  Time defer_of(const Node& n) const { return n.spec.tech == Tech::wifi ? sc_.wifi.timing.difs : sc_.lte.lbt.defer; }
  int counter_of(const Node& n) const {
    return n.spec.tech == Tech::wifi ? n.dcf.backoff_counter : n.lbt.backoff_counter;
  }

  void cancel_access(Node& n) {
    n.timer = Timer::none;
    ++n.access_gen;
  }

  // Applies `k` idle backoff slots; returns true when the node started transmitting.
  bool idle_slots(int idx, int k) {
    Node& n = nodes_[idx];
    for (int i = 0; i < k; ++i) {
      if (n.spec.tech == Tech::wifi) {
        auto r = dcf(idx, DcfEventKind::medium_idle_slot);
        if (!r.actions.empty()) {
          handle_dcf(idx, DcfEventKind::medium_idle_slot, r);
          return true;
        }
      } else {
        auto r = lbt(idx, LbtEventKind::energy_below_slot);
        if (!r.actions.empty()) {
          handle_lbt(idx, r);
          return true;
        }
      }
    }
    return false;
  }

  // Stops a running backoff, crediting the whole idle slots that elapsed.
  void freeze(int idx) {
    Node& n = nodes_[idx];
    if (n.timer == Timer::backoff) {
      const auto slots = static_cast<int>((q_.now() - n.anchor) / slot_of(n));
      const int k = std::min(slots, counter_of(n) - 1);
      cancel_access(n);
      idle_slots(idx, k);
    } else if (n.timer == Timer::defer) {
      cancel_access(n);
    }
  }

  void reevaluate(int idx) {
    Node& n = nodes_[idx];
    if (n.spec.role != Role::base) return;
    if (!contending(n) || n.busy || n.current_tx != 0) {
      if (n.timer != Timer::none && (!contending(n) || n.busy)) freeze(idx);
      return;
    }
    if (n.timer != Timer::none) return;
    const bool in_defer =
        n.spec.tech == Tech::wifi ? n.dcf.phase == DcfPhase::defer : n.lbt.phase == LbtPhase::defer;
    ++n.access_gen;
    if (in_defer) {
      n.timer = Timer::defer;
      q_.push(q_.now() + defer_of(n), {Ev::access_timer, idx, n.access_gen});
    } else {
      n.timer = Timer::backoff;
      n.anchor = q_.now();
      q_.push(q_.now() + counter_of(n) * slot_of(n), {Ev::access_timer, idx, n.access_gen});
    }
  }

  double energy_mw(int idx) const {
    double e = dbm_to_mw(sc_.phy.noise_floor_dbm);
    for (const auto& t : txs_) {
      if (!t.visible || t.ended || t.src == idx || t.channel != nodes_[idx].channel) continue;
      double p = dbm_to_mw(rx_dbm(t.src, idx));
      if (sc_.phy.sense_fast_fading) p *= fade(t.id, idx, 0);
      e += p;
    }
    return e;
  }

  bool energy_busy(int idx) const { return mw_to_dbm(energy_mw(idx)) >= nodes_[idx].ed_dbm; }

  void update_sense(int idx) {
    Node& n = nodes_[idx];
    if (n.spec.role != Role::base) return;
    const bool b = energy_busy(idx);
    if (b != n.busy) {
      n.busy = b;
      if (b) {
        freeze(idx);
        if (n.current_tx == 0 && contending(n)) {
          if (n.spec.tech == Tech::wifi) {
            dcf(idx, DcfEventKind::medium_busy);
          } else {
            lbt(idx, LbtEventKind::energy_above);
          }
        }
      }
    }
    reevaluate(idx);
  }

  void update_channel(int channel) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].channel == channel) update_sense(static_cast<int>(i));
    }
  }

  void check_politeness(int idx) {
    ++politeness_checks_;
    if (energy_busy(idx)) {
      throw InternalError("ED politeness violated by " + nodes_[idx].spec.name + " at t=" +
                          std::to_string(q_.now().count()) + " ns");
    }
  }

  // ---- traffic ----

  bool has_traffic(int client) const {
    const Node& c = nodes_[client];
    return !c.files.empty() && c.files.front().left > 0.0;
  }

  int next_client(Node& b) {
    for (std::size_t k = 0; k < b.clients.size(); ++k) {
      const std::size_t i = (b.rr + k) % b.clients.size();
      if (has_traffic(b.clients[i])) {
        b.rr = (i + 1) % b.clients.size();
        return b.clients[i];
      }
    }
    return -1;
  }

  void deliver(int client, double bits) {
    Node& c = nodes_[client];
    if (bits <= 0.0 || c.files.empty()) return;
    c.m.delivered_bits += bits;
    nodes_[c.base].m.delivered_bits += bits;
    File& f = c.files.front();
    f.left -= bits;
    if (f.left <= 1e-6 && std::isfinite(f.total)) {
      const double secs = to_seconds(q_.now() - f.arrival);
      c.m.throughputs_mbps.push_back(secs > 0.0 ? f.total / secs / 1e6 : 0.0);
      c.files.pop_front();
    }
  }

  void kick(int idx) {
    Node& n = nodes_[idx];
    if (n.spec.role != Role::base) return;
    if (n.spec.tech == Tech::wifi) {
      if (n.dcf.has_frame) return;
      if (n.dcf.phase != DcfPhase::idle && n.dcf.phase != DcfPhase::nav_blocked) return;
      Frame f;
      if (n.beacon_pending) {
        f.beacon = true;
      } else {
        const int c = next_client(n);
        if (c < 0) return;
        const Node& cl = nodes_[c];
        f.dst = c;
        f.rate_mbps = cl.rate_mbps;
        const double cap = cl.rate_mbps * to_us(sc_.wifi.max_ppdu - sc_.wifi.timing.preamble);
        f.bits = std::min({static_cast<double>(sc_.wifi.frame_bytes) * 8.0, cap, cl.files.front().left});
        f.data_duration = sc_.wifi.timing.preamble + Time(static_cast<std::int64_t>(
                                                          std::ceil(f.bits * 1000.0 / f.rate_mbps)));
      }
      n.frame = f;
      auto r = dcf(idx, DcfEventKind::packet_ready, f.beacon ? FrameClass::broadcast : FrameClass::unicast);
      handle_dcf(idx, DcfEventKind::packet_ready, r);
    } else {
      if (n.lbt.phase != LbtPhase::idle) return;
      bool any = false;
      for (int c : n.clients) any = any || has_traffic(c);
      if (!any) return;
      auto r = lbt(idx, LbtEventKind::data_ready);
      handle_lbt(idx, r);
    }
    reevaluate(idx);
  }

  // ---- transmissions ----

  void start_tx(Tx t) {
    account_airtime(q_.now());
    t.id = next_tx_id_++;
    t.start = q_.now();
    Node& n = nodes_[t.src];
    t.channel = n.channel;
    n.current_tx = t.id;
    n.tx_time += std::min(t.end, end_) - t.start;
    (is_lte_kind(t.kind) ? active_lte_ : active_wifi_) += 1;
    if (t.kind == TxKind::burst) {
      trace(t.src, "tx_start:burst", "", "", std::to_string(t.subframes));
    } else {
      trace(t.src, std::string("tx_start:") + std::string(kind_name(t.kind)), "", "", "");
    }
    prune();
    txs_.push_back(t);
    q_.push(t.start + sc_.phy.cca_delay, {Ev::visible, t.src, t.id});
    q_.push(t.end, {Ev::tx_end, t.src, t.id});
  }

  static bool is_lte_kind(TxKind k) { return k == TxKind::burst; }

  Tx make_tx(TxKind kind, int src, int dst, Time duration) {
    Tx t;
    t.kind = kind;
    t.src = src;
    t.dst = dst;
    t.end = q_.now() + duration;
    return t;
  }

  const MacTiming& timing() const { return sc_.wifi.timing; }

  void send_rts(int idx) {
    const Node& n = nodes_[idx];
    Tx t = make_tx(TxKind::rts, idx, n.frame.dst, timing().rts_duration);
    t.nav = 3 * timing().sifs + timing().cts_duration + n.frame.data_duration + timing().ack_duration;
    start_tx(t);
  }

  void send_data(int idx) {
    const Node& n = nodes_[idx];
    if (n.frame.beacon) {
      start_tx(make_tx(TxKind::beacon, idx, -1, timing().beacon_duration));
      return;
    }
    Tx t = make_tx(TxKind::data, idx, n.frame.dst, n.frame.data_duration);
    t.rate_mbps = n.frame.rate_mbps;
    t.bits = n.frame.bits;
    t.nav = timing().sifs + timing().ack_duration;
    start_tx(t);
  }

  void handle_dcf(int idx, DcfEventKind cause, const DcfStepResult& r) {
    Node& n = nodes_[idx];
    for (auto a : r.actions) {
      switch (a) {
        case DcfAction::emit_rts:
          check_politeness(idx);
          send_rts(idx);
          break;
        case DcfAction::emit_data:
          if (cause == DcfEventKind::cts_received) {
            q_.push(q_.now() + timing().sifs, {Ev::tx_begin, idx});
          } else {
            check_politeness(idx);
            send_data(idx);
          }
          break;
        case DcfAction::emit_response: {
          const PendingResponse& p = n.pending;
          Tx t = make_tx(p.kind, idx, p.dst,
                         p.kind == TxKind::cts ? timing().cts_duration : timing().ack_duration);
          t.nav = p.nav;
          t.answers_end = p.answers_end;
          start_tx(t);
          break;
        }
        case DcfAction::start_response_timer: {
          ++n.resp_gen;
          const Time resp = n.dcf.stage == DcfStage::rts ? timing().cts_duration : timing().ack_duration;
          q_.push(q_.now() + timing().sifs + resp + timing().slot, {Ev::response_timeout, idx, n.resp_gen});
          break;
        }
        case DcfAction::frame_delivered:
          if (n.frame.beacon) {
            n.beacon_pending = false;
          } else {
            deliver(n.frame.dst, n.frame.bits);
          }
          break;
        case DcfAction::frame_dropped:
          ++n.m.drops;
          break;
      }
    }
    if ((cause == DcfEventKind::ack_timeout || cause == DcfEventKind::rts_cts_fail) &&
        std::find(r.actions.begin(), r.actions.end(), DcfAction::frame_dropped) == r.actions.end()) {
      ++n.m.retransmissions;
    }
    const bool done = std::any_of(r.actions.begin(), r.actions.end(), [](DcfAction a) {
      return a == DcfAction::frame_delivered || a == DcfAction::frame_dropped;
    });
    if (done) kick(idx);
  }

  void handle_lbt(int idx, const LbtStepResult& r) {
    Node& n = nodes_[idx];
    for (auto a : r.actions) {
      if (a != LbtAction::start_burst) continue;
      check_politeness(idx);
      const int c = next_client(n);
      if (c < 0) throw InternalError("LTE burst without pending data");
      const Node& cl = nodes_[c];
      const double bps_sf = cl.rate_mbps * to_us(sc_.lte.lbt.subframe);
      const auto max_sf = static_cast<int>(sc_.lte.lbt.burst_length / sc_.lte.lbt.subframe);
      const double left = cl.files.front().left;
      const int needed = std::isfinite(left) ? static_cast<int>(std::ceil(left / bps_sf - 1e-9)) : max_sf;
      const int sf = std::clamp(needed, 1, std::max(max_sf, 1));
      Tx t = make_tx(TxKind::burst, idx, c, sf * sc_.lte.lbt.subframe);
      t.rate_mbps = cl.rate_mbps;
      t.subframes = sf;
      t.bits_per_subframe = bps_sf;
      t.bits = std::min(left, sf * bps_sf);
      start_tx(t);
    }
  }

  // ---- reception ----

  double fade(std::uint64_t tx_id, int rx, int sub) const {
    if (!sc_.fast_fading) return 1.0;
    const std::uint64_t h = splitmix(fade_seed_ ^ splitmix(tx_id * 0x100000001b3ULL ^
                                                           (static_cast<std::uint64_t>(rx) << 32) ^
                                                           static_cast<std::uint64_t>(sub)));
    const double u = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    return -std::log(u);
  }

  struct Reception {
    bool ok = false;
    bool interfered = false;
    bool lte_in_window = false;  // an LTE burst began after t.answers_end and overlapped
  };

  Reception receive(const Tx& t, int rx, Time a, Time b, int sub, double threshold_db) const {
    Reception out;
    std::vector<const Tx*> others;
    for (const auto& u : txs_) {
      if (u.id == t.id || u.channel != t.channel || u.start >= b || u.end <= a) continue;
      if (u.src == rx) {
        out.interfered = true;  // half duplex
        return out;
      }
      others.push_back(&u);
      if (u.kind == TxKind::burst && u.start >= t.answers_end && (t.kind == TxKind::ack || t.kind == TxKind::cts)) {
        out.lte_in_window = true;
      }
    }
    const double s = dbm_to_mw(rx_dbm(t.src, rx)) * fade(t.id, rx, sub);
    const double noise = dbm_to_mw(sc_.phy.noise_floor_dbm);
    std::vector<Time> cuts{a, b};
    for (const Tx* u : others) {
      if (u->start > a) cuts.push_back(u->start);
      if (u->end < b) cuts.push_back(u->end);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    out.ok = true;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const Time lo = cuts[k];
      const Time hi = cuts[k + 1];
      double interference = 0.0;
      for (const Tx* u : others) {
        if (u->start < hi && u->end > lo) interference += dbm_to_mw(rx_dbm(u->src, rx)) * fade(u->id, rx, 0);
      }
      const double sinr = linear_to_db(s / (noise + interference));
      double need = threshold_db;
      if (interference > 0.0) {
        out.interfered = true;
        need = std::max(need, sc_.phy.capture_threshold_db);
      }
      if (sinr < need) out.ok = false;
    }
    return out;
  }

  double control_threshold() const { return sc_.phy.wifi_rates.min_threshold(); }

  void note_loss(const Tx& t, const Reception& r) {
    if (!r.interfered) return;
    ++nodes_[t.src].m.collisions;
    if (r.lte_in_window) ++ack_window_collisions_;
  }

  void overhear_nav(const Tx& t, int rx) {
    Node& n = nodes_[rx];
    if (t.nav <= Time::zero()) return;
    if (!receive(t, rx, t.start, t.end, 0, control_threshold()).ok) return;
    freeze(rx);
    const DcfPhase from = n.dcf.phase;
    n.dcf = nav_update(n.dcf, t.nav, q_.now());
    trace(rx, "nav_update", to_string(from), to_string(n.dcf.phase), "");
    ++n.nav_gen;
    q_.push(n.dcf.nav_until, {Ev::nav_expire, rx, n.nav_gen});
  }

  void on_tx_end(std::uint64_t id) {
    Tx* tp = find_tx(id);
    if (!tp) throw InternalError("unknown transmission ended");
    account_airtime(q_.now());
    Tx& t = *tp;
    t.ended = true;
    (is_lte_kind(t.kind) ? active_lte_ : active_wifi_) -= 1;
    Node& src = nodes_[t.src];
    src.current_tx = 0;
    trace(t.src, std::string("tx_end:") + std::string(kind_name(t.kind)), "", "", "");

    switch (t.kind) {
      case TxKind::rts: {
        const auto r = receive(t, t.dst, t.start, t.end, 0, control_threshold());
        if (r.ok) {
          Node& d = nodes_[t.dst];
          const bool nav_idle = d.dcf.nav_until <= q_.now();
          const bool medium_ok = !sc_.wifi.cts_requires_idle_medium ||
                                 mw_to_dbm(energy_mw(t.dst)) < d.ed_dbm;
          if (nav_idle && medium_ok && d.current_tx == 0) {
            d.pending = {TxKind::cts, t.src, t.nav - timing().sifs - timing().cts_duration, t.end};
            q_.push(q_.now() + timing().sifs, {Ev::tx_begin, t.dst});
          }
        } else {
          note_loss(t, r);
        }
        overhear_all(t);
        break;
      }
      case TxKind::data: {
        const double thr = sc_.phy.wifi_rates.threshold_for(t.rate_mbps);
        const auto r = receive(t, t.dst, t.start, t.end, 0, thr);
        if (r.ok) {
          nodes_[t.dst].pending = {TxKind::ack, t.src, Time::zero(), t.end};
          q_.push(q_.now() + timing().sifs, {Ev::tx_begin, t.dst});
        } else {
          note_loss(t, r);
        }
        overhear_all(t);
        break;
      }
      case TxKind::cts:
      case TxKind::ack: {
        const auto r = receive(t, t.dst, t.start, t.end, 0, control_threshold());
        Node& d = nodes_[t.dst];
        const DcfStage want = t.kind == TxKind::cts ? DcfStage::rts : DcfStage::data;
        if (r.ok && d.dcf.phase == DcfPhase::await_ack && d.dcf.stage == want) {
          ++d.resp_gen;
          const auto kind = t.kind == TxKind::cts ? DcfEventKind::cts_received : DcfEventKind::ack_received;
          auto step = dcf(t.dst, kind);
          handle_dcf(t.dst, kind, step);
        } else if (!r.ok) {
          note_loss(t, r);
        }
        if (t.kind == TxKind::cts) overhear_all(t);
        break;
      }
      case TxKind::beacon:
        beacon_heard(t);
        break;
      case TxKind::burst:
        burst_outcome(t);
        break;
    }

    if (src.spec.tech == Tech::wifi) {
      auto step = dcf(t.src, DcfEventKind::tx_done);
      handle_dcf(t.src, DcfEventKind::tx_done, step);
    } else {
      lbt(t.src, LbtEventKind::burst_done);
      const bool collided = t.failed_subframes >= sc_.lte.nack_ratio * t.subframes;
      lbt(t.src, collided ? LbtEventKind::collision_feedback : LbtEventKind::success_feedback);
      kick(t.src);
    }
    t.visible = false;
    update_channel(t.channel);
  }

  void overhear_all(const Tx& t) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const int r = static_cast<int>(i);
      if (r == t.src || r == t.dst || nodes_[i].spec.tech != Tech::wifi || nodes_[i].channel != t.channel) continue;
      overhear_nav(t, r);
    }
  }

  void burst_outcome(Tx& t) {
    const double thr = sc_.phy.lte_rates.threshold_for(t.rate_mbps);
    bool interfered = false;
    double remaining = t.bits;
    for (int k = 0; k < t.subframes; ++k) {
      const Time a = t.start + k * sc_.lte.lbt.subframe;
      const auto r = receive(t, t.dst, a, a + sc_.lte.lbt.subframe, k + 1, thr);
      const double bits = std::min(remaining, t.bits_per_subframe);
      remaining -= bits;
      if (r.ok) {
        t.delivered_bits += bits;
      } else {
        ++t.failed_subframes;
        interfered = interfered || r.interfered;
      }
    }
    if (t.failed_subframes > 0) {
      nodes_[t.src].m.retransmissions += t.failed_subframes;
      if (interfered) ++nodes_[t.src].m.collisions;
    }
    deliver(t.dst, t.delivered_bits);
  }

  std::vector<std::uint8_t> beacon_body(int b) {
    Node& n = nodes_[b];
    const Time interval = timing().beacon_interval;
    const double util = to_seconds(n.tx_time - n.tx_time_at_beacon) / to_seconds(interval);
    n.tx_time_at_beacon = n.tx_time;
    const auto ies = encode_pseudo_beacon(cell_of(b, util));
    return serialize_ies(ies);
  }

  ScanEntry scan_from_body(const std::vector<std::uint8_t>& body, double rssi, ScanSource source) {
    const auto ies = parse_ies(body);
    return scan_entry_from_beacon(decode_pseudo_beacon(ies), rssi, source);
  }

  void beacon_heard(const Tx& t) {
    const auto body = beacon_body(t.src);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const int r = static_cast<int>(i);
      Node& n = nodes_[i];
      if (r == t.src || n.spec.role != Role::base || n.channel != t.channel) continue;
      if (n.spec.tech == Tech::lte && !sc_.relay.enabled) continue;
      if (n.spec.tech == Tech::wifi) {
        if (!receive(t, r, t.start, t.end, 0, control_threshold()).ok) continue;
        ScanEntry e = scan_from_body(body, rx_dbm(t.src, r), ScanSource::over_the_air);
        n.ota[e.cell.operator_cell_id] = e;
      } else {
        // The helper AP is a separate radio next to the eNB.
        if (!receive_helper(t, r)) continue;
        relay_payloads_.push_back(scan_from_body(body, rx_dbm(t.src, r), ScanSource::relayed));
        q_.push(q_.now() + sc_.relay.latency, {Ev::relay_scan, r, 0, relay_payloads_.size() - 1});
      }
    }
  }

  bool receive_helper(const Tx& t, int enb) const {
    // Same SINR rule as any receiver, without the eNB's own transmissions.
    const double s = dbm_to_mw(rx_dbm(t.src, enb)) * fade(t.id, enb, 0);
    const double noise = dbm_to_mw(sc_.phy.noise_floor_dbm);
    double worst = 0.0;
    for (const auto& u : txs_) {
      if (u.id == t.id || u.src == enb || u.channel != t.channel || u.start >= t.end || u.end <= t.start) continue;
      worst += dbm_to_mw(rx_dbm(u.src, enb)) * fade(u.id, enb, 0);
    }
    const double sinr = linear_to_db(s / (noise + worst));
    const double need = worst > 0.0 ? std::max(control_threshold(), sc_.phy.capture_threshold_db) : control_threshold();
    return sinr >= need;
  }

  // ---- airtime ----

  void account_airtime(Time now) {
    now = std::min(now, end_);
    if (now <= last_account_) return;
    const Time d = now - last_account_;
    if (active_wifi_ > 0 && active_lte_ > 0) {
      overlap_ += d;
    } else if (active_wifi_ > 0) {
      wifi_ += d;
    } else if (active_lte_ > 0) {
      lte_ += d;
    } else {
      idle_ += d;
    }
    last_account_ = now;
  }

  Tx* find_tx(std::uint64_t id) {
    for (auto& t : txs_) {
      if (t.id == id) return &t;
    }
    return nullptr;
  }

  void prune() {
    const Time horizon = q_.now() - 100ms;
    while (!txs_.empty() && txs_.front().ended && txs_.front().end < horizon) txs_.pop_front();
  }

  // ---- dispatch ----

  void dispatch(const Event& e) {
    switch (e.kind) {
      case Ev::visible: {
        Tx* t = find_tx(e.gen);
        if (!t || t->ended) return;
        t->visible = true;
        update_channel(t->channel);
        return;
      }
      case Ev::tx_end:
        on_tx_end(e.gen);
        return;
      case Ev::tx_begin:
        on_tx_begin(e.node);
        return;
      case Ev::access_timer:
        on_access_timer(e.node, e.gen);
        return;
      case Ev::response_timeout: {
        Node& n = nodes_[e.node];
        if (e.gen != n.resp_gen || n.dcf.phase != DcfPhase::await_ack) return;
        const auto kind = n.dcf.stage == DcfStage::rts ? DcfEventKind::rts_cts_fail : DcfEventKind::ack_timeout;
        auto r = dcf(e.node, kind);
        handle_dcf(e.node, kind, r);
        reevaluate(e.node);
        return;
      }
      case Ev::nav_expire: {
        Node& n = nodes_[e.node];
        if (e.gen != n.nav_gen || n.dcf.nav_until > q_.now()) return;
        if (n.dcf.phase == DcfPhase::nav_blocked) dcf(e.node, DcfEventKind::nav_expired);
        kick(e.node);
        reevaluate(e.node);
        return;
      }
      case Ev::arrival:
        on_arrival(e.node, e.aux == 1);
        return;
      case Ev::beacon_tick: {
        Node& n = nodes_[e.node];
        n.beacon_pending = true;
        kick(e.node);
        q_.push(q_.now() + timing().beacon_interval, {Ev::beacon_tick, e.node});
        return;
      }
      case Ev::relay_cell:
        relay_bodies_.push_back(beacon_body(e.node));
        q_.push(q_.now() + sc_.relay.latency, {Ev::pseudo_beacon, e.node, 0, relay_bodies_.size() - 1});
        q_.push(q_.now() + timing().beacon_interval, {Ev::relay_cell, e.node});
        return;
      case Ev::pseudo_beacon:
        on_pseudo_beacon(e.node, relay_bodies_[e.aux]);
        return;
      case Ev::relay_scan: {
        const ScanEntry& s = relay_payloads_[e.aux];
        nodes_[e.node].relayed[s.cell.operator_cell_id] = s;
        return;
      }
      case Ev::adapt_tick:
        on_adapt(e.node);
        q_.push(q_.now() + from_seconds(sc_.coordination.adaptive.update_period_s), {Ev::adapt_tick, e.node});
        return;
    }
  }

  void on_tx_begin(int idx) {
    Node& n = nodes_[idx];
    if (n.spec.role == Role::client) {
      if (n.current_tx != 0) return;
      const DcfPhase p = n.dcf.phase;
      if (p != DcfPhase::idle && p != DcfPhase::nav_blocked && p != DcfPhase::defer && p != DcfPhase::backoff) return;
      auto r = dcf(idx, DcfEventKind::respond);
      handle_dcf(idx, DcfEventKind::respond, r);
      return;
    }
    send_data(idx);  // data after CTS
  }

  void on_access_timer(int idx, std::uint64_t gen) {
    Node& n = nodes_[idx];
    if (gen != n.access_gen) return;
    const Timer which = n.timer;
    n.timer = Timer::none;
    if (which == Timer::defer) {
      if (n.spec.tech == Tech::wifi) {
        auto r = dcf(idx, DcfEventKind::defer_done);
        handle_dcf(idx, DcfEventKind::defer_done, r);
      } else {
        auto r = lbt(idx, LbtEventKind::defer_done);
        handle_lbt(idx, r);
      }
    } else if (which == Timer::backoff) {
      idle_slots(idx, counter_of(n));
    }
    reevaluate(idx);
  }

  void on_arrival(int client, bool initial_full_buffer) {
    Node& c = nodes_[client];
    if (!initial_full_buffer) {
      const double bits = sc_.traffic.file_bytes * 8.0;
      c.files.push_back({q_.now(), bits, bits});
      q_.push(q_.now() + from_seconds(traffic_rng_.exponential(1.0 / c.arrival_rate)), {Ev::arrival, client});
    }
    kick(c.base);
  }

  void on_pseudo_beacon(int enb, const std::vector<std::uint8_t>& body) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const int r = static_cast<int>(i);
      Node& n = nodes_[i];
      if (r == enb || n.spec.role != Role::base || n.channel != nodes_[enb].channel) continue;
      const auto rssi = beacon_rssi(enb, r);
      if (!rssi) continue;
      if (n.spec.tech == Tech::wifi) {
        ScanEntry e = scan_from_body(body, *rssi, ScanSource::over_the_air);
        n.ota[e.cell.operator_cell_id] = e;
      } else {
        relay_payloads_.push_back(scan_from_body(body, *rssi, ScanSource::relayed));
        q_.push(q_.now() + sc_.relay.latency, {Ev::relay_scan, r, 0, relay_payloads_.size() - 1});
      }
    }
  }

  void on_adapt(int idx) {
    Node& n = nodes_[idx];
    if (n.spec.role != Role::base) return;
    std::vector<ScanEntry> ota;
    std::vector<ScanEntry> rel;
    for (const auto& [id, e] : n.ota) ota.push_back(e);
    for (const auto& [id, e] : n.relayed) rel.push_back(e);
    const auto scan = merge_scans(ota, rel);
    AdaptiveEdConfig cfg = sc_.coordination.adaptive;
    cfg.t_default_dbm = n.default_ed_dbm;
    cfg.t_min_dbm = std::min(cfg.t_min_dbm, cfg.t_default_dbm);
    const double t = adapt_ed_threshold(scan, n.channel, cfg);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", t);
    trace(idx, "adapt_tick", "", "", buf);
    n.ed_dbm = t;
    n.lbt.ed_threshold_dbm = t;
    update_sense(idx);
  }

  void finish(Metrics& out) {
    const double dur = sc_.duration_s;
    for (auto& n : nodes_) {
      if (n.spec.role == Role::client && sc_.traffic.model == TrafficConfig::Model::full_buffer && dur > 0.0) {
        n.m.throughputs_mbps.push_back(n.m.delivered_bits / dur / 1e6);
      }
      n.m.airtime = dur > 0.0 ? to_seconds(n.tx_time) / dur : 0.0;
      n.m.ed_threshold_dbm = n.ed_dbm;
      n.m.channel = n.channel;
      out.collision_count += n.m.collisions;
      out.retransmissions += n.m.retransmissions;
      out.nodes.push_back(n.m);
    }
    out.ack_window_collisions = ack_window_collisions_;
    out.politeness_checks = politeness_checks_;
    if (end_ > Time::zero()) {
      const double total = static_cast<double>(end_.count());
      out.airtime_wifi = static_cast<double>(wifi_.count()) / total;
      out.airtime_lte = static_cast<double>(lte_.count()) / total;
      out.airtime_overlap = static_cast<double>(overlap_.count()) / total;
      out.airtime_idle = static_cast<double>(idle_.count()) / total;
    } else {
      out.airtime_idle = 1.0;
    }
    const double sum = out.airtime_wifi + out.airtime_lte + out.airtime_overlap + out.airtime_idle;
    if (std::abs(sum - 1.0) > 1e-9) throw InternalError("airtime fractions do not sum to 1");
  }

  Scenario sc_;
  TraceSink* trace_;
  Rng mac_rng_;
  Rng traffic_rng_ = Rng(0);
  Time end_{};
  std::uint64_t fade_seed_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::vector<double>> gain_;
  EventQueue<Event> q_;
  std::deque<Tx> txs_;
  std::uint64_t next_tx_id_ = 1;
  std::vector<std::vector<std::uint8_t>> relay_bodies_;
  std::vector<ScanEntry> relay_payloads_;
  int active_wifi_ = 0;
  int active_lte_ = 0;
  Time last_account_{};
  Time wifi_{};
  Time lte_{};
  Time overlap_{};
  Time idle_{};
  int ack_window_collisions_ = 0;
  std::uint64_t politeness_checks_ = 0;
};

}  // namespace

Metrics run(const Scenario& scenario, TraceSink* trace) {
  Engine engine(scenario, trace);
  return engine.run();
}

}  // namespace coexist::sim
