// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coexist/cli.hpp"
#include "coexist/config.hpp"
#include "coexist/propagation.hpp"
#include "coexist/sensing.hpp"
#include "coexist/sim/simulator.hpp"

using namespace coexist;

namespace {

const std::string kPresets = COEXIST_PRESET_DIR;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget_s > 0.0 && secs >= budget_s) {
    c.ok = false;
    c.detail << " [over time budget " << budget_s << " s]";
  }
  if (!c.ok) ++failures;
  char t[32];
  std::snprintf(t, sizeof t, "%.2f", secs);
  std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " (" << t << " s)"
            << c.detail.str() << std::endl;
}

std::string num(double v) { return cli::fmt(v); }

const cli::CoverageRow* find_row(const std::vector<cli::CoverageRow>& rows, const std::string& cell, double thr) {
  for (const auto& r : rows) {
    if (r.cell == cell && r.threshold_dbm == thr) return &r;
  }
  return nullptr;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int cli_to_file(std::vector<std::string> args, const std::string& out_path) {
  args.insert(args.begin(), "coexist");
  args.push_back("--out");
  args.push_back(out_path);
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

}  // namespace

int main() {
  std::vector<cli::CoverageRow> inh_rows, diff_rows;

  criterion(1, "fast-fade tail P{fade >= 10 dB} = 1 - e^-0.1 within 0.002 at 1e6 samples", 5.0, [](Check& c) {
    Rng rng(1);
    const int n = 1'000'000;
    int deep = 0;
    for (int i = 0; i < n; ++i) deep += sample_fast_fade(rng) <= 0.1 ? 1 : 0;
    const double p = static_cast<double>(deep) / n;
    const double expect = 1.0 - std::exp(-0.1);
    c.detail << " p=" << num(p) << " expected=" << num(expect);
    c.expect(std::abs(p - expect) <= 0.002, "tail within 0.002");
  });

  criterion(2, "ED success product for 10 links at -52 dBm, threshold -62 dBm", 10.0, [](Check& c) {
    const std::vector<double> links(10, -52.0);
    const auto r = cli::edprob(links, -62.0, 1'000'000, 1);
    c.detail << " closed_form=" << num(r.closed_form) << " monte_carlo=" << num(r.monte_carlo.value_or(NAN));
    c.expect(std::abs(r.closed_form - std::exp(-1.0)) <= 1e-12, "closed form equals e^-1");
    c.expect(std::abs(r.closed_form - 0.34) <= 0.03, "rounded 0.34 within 0.03");
    c.expect(r.monte_carlo && std::abs(*r.monte_carlo - r.closed_form) <= 0.01, "Monte Carlo within 0.01");
  });

  criterion(3, "InH coverage 51/45/58/52% within 5 pp, Wi-Fi cell fraction 87% within 5 pp", 30.0, [&](Check& c) {
    const auto spec = config::to_coverage(config::load_file(kPresets + "/coverage_inh.json"));
    c.expect(spec.samples >= 100000, "at least 1e5 samples");
    c.expect(spec.tx_power_dbm == 20.0, "20 dBm TX");
    inh_rows = cli::coverage_rows(spec);
    const struct {
      const char* cell;
      double thr;
      double target;
    } want[] = {{"wifi", -62, 0.51}, {"lte", -62, 0.45}, {"wifi", -72, 0.58}, {"lte", -72, 0.52}};
    for (const auto& w : want) {
      const auto* r = find_row(inh_rows, w.cell, w.thr);
      c.expect(r != nullptr, std::string("row ") + w.cell);
      if (!r) continue;
      c.detail << " " << w.cell << num(w.thr) << "=" << num(r->result.ed_fraction);
      c.expect(std::abs(r->result.ed_fraction - w.target) <= 0.05, std::string(w.cell) + " " + num(w.thr));
    }
    const auto* wifi = find_row(inh_rows, "wifi", -62);
    if (wifi) {
      c.detail << " wifi_cell=" << num(wifi->result.cell_fraction);
      c.expect(std::abs(wifi->result.cell_fraction - 0.87) <= 0.05, "Wi-Fi cell fraction");
    }
  });

  criterion(4, "diffusion coverage: -62 dBm 32/26% within 7 pp, -72 dBm monotone", 30.0, [&](Check& c) {
    const auto spec = config::to_coverage(config::load_file(kPresets + "/coverage_diffusion.json"));
    diff_rows = cli::coverage_rows(spec);
    const auto* w62 = find_row(diff_rows, "wifi", -62);
    const auto* l62 = find_row(diff_rows, "lte", -62);
    const auto* w72 = find_row(diff_rows, "wifi", -72);
    const auto* l72 = find_row(diff_rows, "lte", -72);
    c.expect(w62 && l62 && w72 && l72, "all four rows present");
    if (!(w62 && l62 && w72 && l72)) return;
    c.detail << " wifi_cell=" << num(w62->result.cell_fraction) << " wifi-62=" << num(w62->result.ed_fraction)
             << " lte-62=" << num(l62->result.ed_fraction) << " wifi-72=" << num(w72->result.ed_fraction)
             << " lte-72=" << num(l72->result.ed_fraction);
    c.expect(std::abs(w62->result.cell_fraction - 0.62) <= 0.05, "calibrated Wi-Fi cell fraction near 62%");
    c.expect(std::abs(w62->result.ed_fraction - 0.32) <= 0.07, "wifi -62");
    c.expect(std::abs(l62->result.ed_fraction - 0.26) <= 0.07, "lte -62");
    c.expect(w72->result.ed_fraction >= w62->result.ed_fraction, "wifi monotone in threshold");
    c.expect(l72->result.ed_fraction >= l62->result.ed_fraction, "lte monotone in threshold");
  });

  criterion(5, "uplink ED failure 55/74/42/33% as 1 - ed_fraction", 1.0, [&](Check& c) {
    const struct {
      const std::vector<cli::CoverageRow>* rows;
      const char* cell;
      double thr;
      double target;
      double tol;
    } want[] = {{&inh_rows, "lte", -62, 0.55, 0.05},
                {&diff_rows, "lte", -62, 0.74, 0.07},
                {&inh_rows, "wifi", -72, 0.42, 0.05},
                {&diff_rows, "wifi", -72, 0.33, 0.07}};
    for (const auto& w : want) {
      const auto* r = find_row(*w.rows, w.cell, w.thr);
      c.expect(r != nullptr, "coverage rows from criteria 3 and 4");
      if (!r) continue;
      c.detail << " " << num(r->uplink_failure);
      c.expect(r->uplink_failure == 1.0 - r->result.ed_fraction, "exact identity");
      c.expect(uplink_ed_failure(r->result) == r->uplink_failure, "uplink_ed_failure agrees");
      c.expect(std::abs(r->uplink_failure - w.target) <= w.tol, "target " + num(w.target));
    }
  });

  criterion(6, "collision preset: ACK-window collisions > 0, exactly 0 with +15 dB ACK gain", 5.0, [](Check& c) {
    auto cfg = config::load_file(kPresets + "/figure3_collision.json");
    const sim::Scenario base = config::to_scenario(cfg);
    const auto m = sim::run(base);
    sim::Scenario boosted = base;
    bool found = false;
    for (auto& l : boosted.links) {
      if ((l.a == "enb" && l.b == "sta") || (l.a == "sta" && l.b == "enb")) {
        *l.gain_db += 15.0;
        found = true;
      }
    }
    c.expect(found, "preset has an sta-enb link");
    const auto m15 = sim::run(boosted);
    c.detail << " base=" << m.ack_window_collisions << " boosted=" << m15.ack_window_collisions;
    c.expect(m.ack_window_collisions > 0, "collisions without boost");
    c.expect(m15.ack_window_collisions == 0, "none with +15 dB");
  });

  criterion(7, "coexistence preset over 10 seeds: adaptive ED doubles Wi-Fi, fair and efficient", 120.0, [](Check& c) {
    const auto cfg = config::load_file(kPresets + "/figure4_coexistence.json");
    const auto batches = cli::simulate(cfg, 10, true);
    c.expect(batches.size() == 2 && batches[0].runs.size() >= 10, "10 seeds per configuration");
    if (batches.size() != 2) return;
    const auto& off = batches[0];
    const auto& on = batches[1];
    auto median = [](const std::vector<double>& v) { return v.empty() ? 0.0 : sim::summarize(v, 50.0); };
    const double w0 = median(off.pooled(sim::Tech::wifi));
    const double w1 = median(on.pooled(sim::Tech::wifi));
    const double l0 = median(off.pooled(sim::Tech::lte));
    const double l1 = median(on.pooled(sim::Tech::lte));
    const std::vector<double> f0{w0, l0}, f1{w1, l1};
    const double j0 = sim::jain_index(f0);
    const double j1 = sim::jain_index(f1);
    c.detail << " wifi " << num(w0) << "->" << num(w1) << " lte " << num(l0) << "->" << num(l1) << " jain "
             << num(j0) << "->" << num(j1);
    c.expect(w0 > 0.0 && w1 >= 2.0 * w0, "Wi-Fi median at least doubles");
    c.expect(l1 >= 0.4 * l0, "LTE median drops by no more than 60%");
    c.expect(w1 + l1 > w0 + l0, "sum of medians rises");
    c.expect(j1 > j0, "Jain index rises");
  });

  criterion(8, "property suites (beacon round-trip and fuzz, DCF/LBT fuzz, selection, adaptation)", 0.0,
            [](Check& c) {
              for (const char* bin : {TEST_RELAY, TEST_MAC_WIFI, TEST_MAC_LTE, TEST_COORDINATION}) {
                const std::string name = std::filesystem::path(bin).filename().string();
                const std::string cmd = std::string("\"") + bin + "\" --test-case=\"property*\" 2>&1";
                std::string log;
                FILE* p = popen(cmd.c_str(), "r");
                c.expect(p != nullptr, name + " launched");
                if (!p) continue;
                char buf[512];
                while (std::fgets(buf, sizeof buf, p)) log += buf;
                const int rc = pclose(p);
                int run = 0, passed = 0;
                const auto at = log.find("test cases:");
                if (at != std::string::npos) std::sscanf(log.c_str() + at, "test cases: %d | %d passed", &run, &passed);
                c.detail << " " << name << "=" << passed << "/" << run;
                c.expect(rc == 0 && run > 0 && passed == run, name);
              }
            });

  criterion(9, "reproducibility: repeated commands give byte-identical files", 0.0, [](Check& c) {
    const auto dir = std::filesystem::temp_directory_path() / "coexist_acceptance";
    std::filesystem::create_directories(dir);
    const std::vector<std::vector<std::string>> commands{
        {"coverage", "--config", kPresets + "/coverage_inh.json", "--set", "coverage.samples=20000"},
        {"edprob", "--rssi", "-52,-60,-55", "--threshold", "-62", "--mc", "50000", "--seed", "4"},
        {"simulate", "--config", kPresets + "/figure4_coexistence.json", "--runs", "2", "--compare-adaptive",
         "--set", "simulation.duration_s=2", "--trace", (dir / "trace").string()},
        {"beacon", "encode", "--id", "cell-1", "--channel", "36", "--utilization", "0.3"},
        {"sweep", "--config", kPresets + "/figure3_collision.json", "--param", "links.2.gain_db", "--values",
         "-95,-85", "--runs", "2", "--set", "simulation.duration_s=1"},
    };
    int k = 0;
    for (const auto& cmd : commands) {
      std::vector<std::string> files[2];
      for (int rep = 0; rep < 2; ++rep) {
        const std::string out = (dir / ("out" + std::to_string(k) + "_" + std::to_string(rep))).string();
        const int rc = cli_to_file(cmd, out);
        c.expect(rc == cli::kOk, cmd[0] + " exit code");
        files[rep].push_back(slurp(out));
        if (cmd[0] == "coverage") files[rep].push_back(slurp(out + ".cdf.csv"));
        if (cmd[0] == "simulate") files[rep].push_back(slurp((dir / "trace").string()));
      }
      c.expect(!files[0].front().empty(), cmd[0] + " produced output");
      c.expect(files[0] == files[1], cmd[0] + " byte-identical");
      ++k;
    }
    std::filesystem::remove_all(dir);
  });

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
