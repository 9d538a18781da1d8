#include "coexist/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "coexist/errors.hpp"
#include "coexist/relay.hpp"

namespace coexist::cli {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

namespace {

std::string model_name(PathModel m) { return m == PathModel::inh ? "inh" : "diffusion"; }

struct Cell {
  const char* name;
  double floor_dbm;
};
constexpr Cell kCells[] = {{"wifi", kWifiMinSensitivityDbm}, {"lte", kLteMinSensitivityDbm}};

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw CLI::ValidationError(what, "'" + item + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

double median_or_nan(const std::vector<double>& v) {
  return v.empty() ? std::nan("") : sim::summarize(v, 50.0);
}

double mean_or_nan(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

// ---- coverage ----

std::vector<CoverageRow> coverage_rows(const config::CoverageSpec& spec) {
  std::vector<CoverageRow> rows;
  for (PathModel model : spec.models) {
    PropagationModel pm = spec.propagation;
    pm.variant = model;
    const std::uint64_t mi = model == PathModel::inh ? 0 : 1;
    for (std::uint64_t ci = 0; ci < 2; ++ci) {
      for (double thr : spec.thresholds_dbm) {
        // Same sample stream for every threshold so fractions are monotone in it.
        Rng rng = Rng::substream(spec.seed, 16 * mi + ci);
        CoverageRow row;
        row.model = model;
        row.cell = kCells[ci].name;
        row.threshold_dbm = thr;
        row.result = fractional_ed_coverage(spec.building, spec.base, spec.tx_power_dbm, pm,
                                            EdConfig{thr, kCells[ci].floor_dbm}, spec.samples, rng, spec.options);
        row.uplink_failure = uplink_ed_failure(row.result);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string coverage_csv(const std::vector<CoverageRow>& rows) {
  std::string s = "model,cell,threshold_dbm,cell_fraction,ed_fraction,uplink_failure,samples\n";
  for (const auto& r : rows) {
    s += model_name(r.model) + "," + r.cell + "," + fmt(r.threshold_dbm) + "," + fmt(r.result.cell_fraction) + "," +
         fmt(r.result.ed_fraction) + "," + fmt(r.uplink_failure) + "," + std::to_string(r.result.samples) + "\n";
  }
  return s;
}

std::string coverage_cdf_csv(const config::CoverageSpec& spec) {
  std::string s = "model,rssi_dbm,fraction\n";
  for (PathModel model : spec.models) {
    PropagationModel pm = spec.propagation;
    pm.variant = model;
    Rng rng = Rng::substream(spec.seed, 100 + (model == PathModel::inh ? 0 : 1));
    const auto samples = sample_rssi(spec.building, spec.base, spec.tx_power_dbm, pm, spec.samples, rng, spec.options);
    for (const auto& p : empirical_cdf(samples, spec.cdf_lo_dbm, spec.cdf_hi_dbm, spec.cdf_step_db)) {
      s += model_name(model) + "," + fmt(p.rssi_dbm) + "," + fmt(p.fraction) + "\n";
    }
  }
  return s;
}

// ---- edprob ----

EdProb edprob(const std::vector<double>& mean_rssi_dbm, double threshold_dbm, std::size_t mc_samples,
              std::uint64_t seed) {
  EdProb r;
  r.factors = ed_success_factors(mean_rssi_dbm, threshold_dbm);
  r.closed_form = ed_success_prob(mean_rssi_dbm, threshold_dbm);
  if (mc_samples > 0) {
    Rng rng = Rng::substream(seed, 7);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < mc_samples; ++i) {
      bool all = true;
      for (double m : mean_rssi_dbm) {
        // draw every link so the stream position does not depend on outcomes
        const double p = m + linear_to_db(sample_fast_fade(rng));
        all = all && detect(p, threshold_dbm);
      }
      hits += all ? 1 : 0;
    }
    r.monte_carlo = static_cast<double>(hits) / static_cast<double>(mc_samples);
  }
  return r;
}

std::string edprob_csv(const std::vector<double>& mean_rssi_dbm, const EdProb& r) {
  std::string s = "item,mean_rssi_dbm,probability\n";
  for (std::size_t i = 0; i < r.factors.size(); ++i) {
    s += "link" + std::to_string(i) + "," + fmt(mean_rssi_dbm[i]) + "," + fmt(r.factors[i]) + "\n";
  }
  s += "closed_form,," + fmt(r.closed_form) + "\n";
  if (r.monte_carlo) s += "monte_carlo,," + fmt(*r.monte_carlo) + "\n";
  return s;
}

// ---- simulate ----

std::vector<double> SimBatch::pooled(sim::Tech tech) const {
  std::vector<double> out;
  for (const auto& m : runs) {
    const auto v = m.client_throughputs(tech);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::vector<SimBatch> simulate(const config::Json& cfg, int runs, bool compare, unsigned threads,
                               std::ostream* trace) {
  if (runs < 1) throw InvalidArgument("--runs must be at least 1");
  const sim::Scenario base = config::to_scenario(cfg);
  std::vector<sim::Scenario> variants;
  if (compare) {
    sim::Scenario off = base;
    off.coordination.adaptive_ed = false;
    sim::Scenario on = base;
    on.coordination.adaptive_ed = true;
    variants = {off, on};
  } else {
    variants = {base};
  }
  std::vector<SimBatch> batches;
  for (const auto& v : variants) {
    SimBatch b;
    b.label = v.coordination.adaptive_ed ? "adaptive_on" : "adaptive_off";
    for (int i = 0; i < runs; ++i) b.seeds.push_back(base.seed + static_cast<std::uint64_t>(i));
    b.runs.resize(static_cast<std::size_t>(runs));
    batches.push_back(std::move(b));
  }
  const std::size_t total = variants.size() * static_cast<std::size_t>(runs);
  std::size_t first = 0;
  if (trace) {
    sim::TraceSink sink(*trace);
    sink.header();
    sim::Scenario s = variants[0];
    batches[0].runs[0] = sim::run(s, &sink);
    first = 1;
  }
  parallel_for(total - first, threads, [&](std::size_t k) {
    const std::size_t idx = k + first;
    const std::size_t vi = idx / static_cast<std::size_t>(runs);
    const std::size_t ri = idx % static_cast<std::size_t>(runs);
    sim::Scenario s = variants[vi];
    s.seed = batches[vi].seeds[ri];
    batches[vi].runs[ri] = sim::run(s);
  });
  return batches;
}

std::string simulate_csv(const std::vector<SimBatch>& batches) {
  std::string s =
      "config,seed,node,tech,role,files,median_mbps,mean_mbps,collisions,retransmissions,airtime,"
      "ack_window_collisions\n";
  auto row = [&](const std::string& label, const std::string& seed, const std::string& node, const std::string& tech,
                 const std::string& role, std::size_t files, double med, double mean, long collisions, long retx,
                 double airtime, const std::string& ackwin) {
    s += label + "," + seed + "," + node + "," + tech + "," + role + "," + std::to_string(files) + "," + fmt(med) +
         "," + fmt(mean) + "," + std::to_string(collisions) + "," + std::to_string(retx) + "," + fmt(airtime) + "," +
         ackwin + "\n";
  };
  for (const auto& b : batches) {
    for (std::size_t i = 0; i < b.runs.size(); ++i) {
      const auto& m = b.runs[i];
      const std::string seed = std::to_string(b.seeds[i]);
      for (const auto& n : m.nodes) {
        row(b.label, seed, n.name, std::string(sim::to_string(n.tech)), std::string(sim::to_string(n.role)),
            n.throughputs_mbps.size(), median_or_nan(n.throughputs_mbps), mean_or_nan(n.throughputs_mbps),
            n.collisions, n.retransmissions, n.airtime, "");
      }
      for (auto tech : {sim::Tech::wifi, sim::Tech::lte}) {
        const auto v = m.client_throughputs(tech);
        long col = 0;
        long retx = 0;
        for (const auto& n : m.nodes) {
          if (n.tech != tech) continue;
          col += n.collisions;
          retx += n.retransmissions;
        }
        const double air = (tech == sim::Tech::wifi ? m.airtime_wifi : m.airtime_lte) + m.airtime_overlap;
        row(b.label, seed, "all", std::string(sim::to_string(tech)), "client", v.size(), median_or_nan(v),
            mean_or_nan(v), col, retx, air, std::to_string(m.ack_window_collisions));
      }
    }
    for (auto tech : {sim::Tech::wifi, sim::Tech::lte}) {
      const auto v = b.pooled(tech);
      long col = 0;
      long retx = 0;
      double air = 0.0;
      long ackwin = 0;
      for (const auto& m : b.runs) {
        for (const auto& n : m.nodes) {
          if (n.tech != tech) continue;
          col += n.collisions;
          retx += n.retransmissions;
        }
        air += (tech == sim::Tech::wifi ? m.airtime_wifi : m.airtime_lte) + m.airtime_overlap;
        ackwin += m.ack_window_collisions;
      }
      air /= static_cast<double>(std::max<std::size_t>(b.runs.size(), 1));
      row(b.label, "pooled", "all", std::string(sim::to_string(tech)), "client", v.size(), median_or_nan(v),
          mean_or_nan(v), col, retx, air, std::to_string(ackwin));
    }
  }
  return s;
}

// ---- command line ----

namespace {

struct Common {
  std::string config_path;
  std::optional<std::int64_t> seed;
  std::string out_path;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Common& c, bool with_config = true) {
  if (with_config) {
    sub->add_option("--config", c.config_path, "JSON config file (defaults when omitted)");
    sub->add_option("--set", c.sets, "Override a config key: dotted.key=value (repeatable)");
  }
  sub->add_option("--seed", c.seed, "Seed override")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", c.out_path, "Output file (stdout when omitted)");
}

config::Json load(const Common& c) {
  config::Json cfg = c.config_path.empty() ? config::defaults() : config::load_file(c.config_path);
  for (const auto& s : c.sets) config::apply_override(cfg, s);
  if (c.seed) cfg["simulation"]["seed"] = *c.seed;
  return cfg;
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + c.out_path + "'");
  f << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

std::vector<ScanEntry> read_scan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scan file '" + path + "'");
  return config::read_scan_csv(in);
}

RunningOn running_on_from(const std::string& s) {
  if (s == "wifi_ap") return RunningOn::wifi_ap;
  if (s == "lte_enb") return RunningOn::lte_enb;
  throw CLI::ValidationError("--running-on", "must be wifi_ap or lte_enb");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wi-Fi / unlicensed LTE coexistence experiments"};
  app.name(args.empty() ? "coexist" : args[0]);
  app.require_subcommand(1);

  Common cov_c;
  std::string cdf_path;
  auto* cov = app.add_subcommand("coverage", "Fractional ED coverage grid and RSSI CDF");
  add_common(cov, cov_c);
  cov->add_option("--cdf", cdf_path, "RSSI CDF output (default: <out>.cdf.csv, or appended to stdout)");

  Common ed_c;
  std::string rssi_list;
  double ed_thr = -62.0;
  std::size_t mc = 0;
  auto* ed = app.add_subcommand("edprob", "Probability that every link clears the ED threshold");
  add_common(ed, ed_c, false);
  ed->add_option("--rssi", rssi_list, "Comma-separated mean RSSIs in dBm")->required();
  ed->add_option("--threshold", ed_thr, "ED threshold in dBm");
  ed->add_option("--mc", mc, "Monte Carlo trials for a cross-check (0: off)");

  Common sel_c;
  std::string sel_scan;
  std::string sel_channels;
  std::string sel_on = "wifi_ap";
  auto* sel = app.add_subcommand("select", "Channel selection from a scan file");
  add_common(sel, sel_c);
  sel->add_option("--scan", sel_scan, "Scan CSV")->required();
  sel->add_option("--channels", sel_channels, "Candidate channels (default: simulation.channels)");
  sel->add_option("--running-on", sel_on, "wifi_ap or lte_enb");

  Common ad_c;
  std::string ad_scan;
  std::optional<int> ad_channel;
  std::string ad_on = "wifi_ap";
  auto* ad = app.add_subcommand("adapt", "Adaptive ED threshold from a scan file");
  add_common(ad, ad_c);
  ad->add_option("--scan", ad_scan, "Scan CSV")->required();
  ad->add_option("--channel", ad_channel, "Operating channel (default: first of simulation.channels)");
  ad->add_option("--running-on", ad_on, "wifi_ap or lte_enb (picks the default threshold)");

  auto* beacon = app.add_subcommand("beacon", "Pseudo beacon codec");
  beacon->require_subcommand(1);
  Common enc_c;
  CellInfo cell;
  std::string node_type = "rel13_laa";
  std::string mac_spec = "lbt_cat4";
  auto* enc = beacon->add_subcommand("encode", "Print the element body as hex");
  add_common(enc, enc_c, false);
  enc->add_option("--id", cell.operator_cell_id, "Operator cell id (SSID)")->required();
  enc->add_option("--channel", cell.channel, "Channel");
  enc->add_option("--stations", cell.station_count, "Attached stations");
  enc->add_option("--utilization", cell.channel_utilization, "Channel utilization in [0, 1]");
  enc->add_option("--capacity", cell.admission_capacity, "Available admission capacity");
  enc->add_option("--node-type", node_type, "rel13_laa, rel14_elaa, multefire, lte_u or wifi");
  enc->add_option("--mac-spec", mac_spec, "lbt_cat4, lbt_catx, other or dcf");
  enc->add_option("--tx-offset", cell.tx_power_offset_db, "TX power offset in dB");
  Common dec_c;
  std::string hex;
  auto* dec = beacon->add_subcommand("decode", "Decode a hex element body");
  add_common(dec, dec_c, false);
  dec->add_option("hex", hex, "Element body as hex")->required();

  Common sim_c;
  int runs = 1;
  bool compare = false;
  std::string trace_path;
  auto* simc = app.add_subcommand("simulate", "Run the discrete-event simulator");
  add_common(simc, sim_c);
  simc->add_option("--runs", runs, "Number of consecutive seeds")->check(CLI::PositiveNumber);
  simc->add_flag("--compare-adaptive", compare, "Run with adaptive ED off and on");
  simc->add_option("--trace", trace_path, "Per-event trace of the first run");

  Common sw_c;
  std::string sw_param;
  std::string sw_values;
  int sw_runs = 1;
  auto* sw = app.add_subcommand("sweep", "Sweep one config key over values and seeds");
  add_common(sw, sw_c);
  sw->add_option("--param", sw_param, "Dotted config key")->required();
  sw->add_option("--values", sw_values, "Comma-separated values")->required();
  sw->add_option("--runs", sw_runs, "Seeds per value")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*cov) {
      const auto cfg = load(cov_c);
      const auto spec = config::to_coverage(cfg);
      const std::string grid = coverage_csv(coverage_rows(spec));
      const std::string cdf = coverage_cdf_csv(spec);
      emit(cov_c, grid, out);
      if (!cdf_path.empty()) {
        write_file(cdf_path, cdf);
      } else if (!cov_c.out_path.empty()) {
        write_file(cov_c.out_path + ".cdf.csv", cdf);
      } else {
        out << "\n" << cdf;
      }
    } else if (*ed) {
      const auto list = parse_list(rssi_list, "--rssi");
      if (list.empty()) throw CLI::ValidationError("--rssi", "at least one RSSI is required");
      const auto r = edprob(list, ed_thr, mc, static_cast<std::uint64_t>(ed_c.seed.value_or(1)));
      emit(ed_c, edprob_csv(list, r), out);
    } else if (*sel) {
      const auto cfg = load(sel_c);
      const auto scan = read_scan(sel_scan);
      std::vector<int> channels;
      if (sel_channels.empty()) {
        for (const auto& c : cfg["simulation"]["channels"]) channels.push_back(c.get<int>());
      } else {
        for (double c : parse_list(sel_channels, "--channels")) channels.push_back(static_cast<int>(c));
      }
      const auto result = select_channel_from_scan(scan, channels, config::to_select(cfg), running_on_from(sel_on));
      std::string s = "channel,metric,contributors,selected\n";
      for (const auto& m : result.metrics) {
        s += std::to_string(m.channel) + "," + fmt(m.metric) + "," + std::to_string(m.contributors.size()) + "," +
             (m.channel == result.channel ? "1" : "0") + "\n";
      }
      emit(sel_c, s, out);
    } else if (*ad) {
      const auto cfg = load(ad_c);
      const auto scan = read_scan(ad_scan);
      const RunningOn on = running_on_from(ad_on);
      auto acfg = config::to_adaptive(cfg);
      if (cfg["coordination"]["t_default_dbm"].is_null() && on == RunningOn::lte_enb) {
        acfg.t_default_dbm = cfg["lte_mac"]["ed_threshold_dbm"].get<double>();
        acfg.t_min_dbm = std::min(acfg.t_min_dbm, acfg.t_default_dbm);
      }
      const int channel = ad_channel.value_or(cfg["simulation"]["channels"].at(0).get<int>());
      const double t = adapt_ed_threshold(scan, channel, acfg);
      int active = 0;
      for (const auto& e : scan) active += (e.cell.channel == channel && e.n_attached > 0) ? 1 : 0;
      emit(ad_c, "channel,threshold_dbm,active_neighbors\n" + std::to_string(channel) + "," + fmt(t) + "," +
                     std::to_string(active) + "\n",
           out);
    } else if (*enc) {
      try {
        cell.node_type = node_type_from_string(node_type);
        cell.mac_spec = mac_spec_from_string(mac_spec);
      } catch (const InvalidArgument& e) {
        throw CLI::ValidationError("--node-type/--mac-spec", e.what());
      }
      const auto ies = encode_pseudo_beacon(cell);
      emit(enc_c, to_hex(serialize_ies(ies)) + "\n", out);
    } else if (*dec) {
      std::vector<std::uint8_t> bytes;
      try {
        bytes = from_hex(hex);
      } catch (const InvalidArgument& e) {
        throw DecodeError(-1, e.what());
      }
      const auto d = decode_pseudo_beacon(parse_ies(bytes));
      const auto& c = d.cell;
      std::string s =
          "operator_cell_id,channel,station_count,channel_utilization,admission_capacity,node_type,mac_spec,"
          "tx_power_offset_db,pseudo,has_load\n";
      s += c.operator_cell_id + "," + std::to_string(c.channel) + "," + std::to_string(c.station_count) + "," +
           fmt(c.channel_utilization) + "," + std::to_string(c.admission_capacity) + "," +
           std::string(to_string(c.node_type)) + "," + std::string(to_string(c.mac_spec)) + "," +
           std::to_string(c.tx_power_offset_db) + "," + (d.pseudo ? "1" : "0") + "," + (d.has_load ? "1" : "0") +
           "\n";
      emit(dec_c, s, out);
    } else if (*simc) {
      const auto cfg = load(sim_c);
      std::ofstream tf;
      if (!trace_path.empty()) {
        tf.open(trace_path, std::ios::binary);
        if (!tf) throw std::runtime_error("cannot write '" + trace_path + "'");
      }
      const auto batches = simulate(cfg, runs, compare, 0, trace_path.empty() ? nullptr : &tf);
      emit(sim_c, simulate_csv(batches), out);
    } else if (*sw) {
      const auto base = load(sw_c);
      std::vector<std::string> values;
      {
        std::stringstream ss(sw_values);
        std::string v;
        while (std::getline(ss, v, ',')) {
          if (!v.empty()) values.push_back(v);
        }
      }
      if (values.empty()) throw CLI::ValidationError("--values", "at least one value is required");
      std::vector<sim::Scenario> scenarios;
      for (const auto& v : values) {
        auto cfg = base;
        config::apply_override(cfg, sw_param + "=" + v);
        scenarios.push_back(config::to_scenario(cfg));
      }
      const std::size_t n = scenarios.size() * static_cast<std::size_t>(sw_runs);
      std::vector<sim::Metrics> results(n);
      parallel_for(n, 0, [&](std::size_t k) {
        sim::Scenario s = scenarios[k / static_cast<std::size_t>(sw_runs)];
        s.seed += k % static_cast<std::size_t>(sw_runs);
        results[k] = sim::run(s);
      });
      std::string s =
          "param,value,seed,wifi_median_mbps,lte_median_mbps,jain,collisions,ack_window_collisions,airtime_wifi,"
          "airtime_lte,airtime_overlap,airtime_idle\n";
      for (std::size_t k = 0; k < n; ++k) {
        const auto& m = results[k];
        const auto& sc = scenarios[k / static_cast<std::size_t>(sw_runs)];
        const double wm = median_or_nan(m.client_throughputs(sim::Tech::wifi));
        const double lm = median_or_nan(m.client_throughputs(sim::Tech::lte));
        std::vector<double> meds;
        if (!std::isnan(wm)) meds.push_back(wm);
        if (!std::isnan(lm)) meds.push_back(lm);
        const double jain = meds.empty() ? std::nan("") : sim::jain_index(meds);
        s += sw_param + "," + values[k / static_cast<std::size_t>(sw_runs)] + "," +
             std::to_string(sc.seed + k % static_cast<std::size_t>(sw_runs)) + "," + fmt(wm) + "," + fmt(lm) + "," +
             fmt(jain) + "," + std::to_string(m.collision_count) + "," + std::to_string(m.ack_window_collisions) +
             "," + fmt(m.airtime_wifi) + "," + fmt(m.airtime_lte) + "," + fmt(m.airtime_overlap) + "," +
             fmt(m.airtime_idle) + "\n";
      }
      emit(sw_c, s, out);
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace coexist::cli
