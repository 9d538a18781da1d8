#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "coexist/sim/scenario.hpp"

namespace coexist::sim {

struct NodeMetrics {
  std::string name;
  Tech tech = Tech::wifi;
  Role role = Role::base;
  std::vector<double> throughputs_mbps;  // clients: one entry per completed file (full buffer: one per run)
  double delivered_bits = 0.0;
  int collisions = 0;       // frames this node sent that were lost under interference
  int retransmissions = 0;
  int drops = 0;
  double airtime = 0.0;     // fraction of the run this node was transmitting
  double ed_threshold_dbm = 0.0;  // at the end of the run
  int channel = 0;
};

struct Metrics {
  std::vector<NodeMetrics> nodes;
  int collision_count = 0;
  int ack_window_collisions = 0;
  int retransmissions = 0;
  double airtime_wifi = 0.0;
  double airtime_lte = 0.0;
  double airtime_idle = 0.0;
  double airtime_overlap = 0.0;
  double duration_s = 0.0;
  std::uint64_t politeness_checks = 0;
  std::uint64_t events = 0;

  /// Pooled file throughputs of all clients of one technology.
  std::vector<double> client_throughputs(Tech tech) const;
};

/// Receives one CSV line per MAC state-machine step and transmission.
class TraceSink {
 public:
  explicit TraceSink(std::ostream& out);
  void header();
  void record(Time t, std::string_view node, Tech tech, std::string_view event, std::string_view from,
              std::string_view to, std::string_view actions);

 private:
  std::ostream& out_;
};

/// Runs one scenario to completion. Generated clients are realized from the
/// scenario seed. Throws InternalError if an engine invariant breaks.
Metrics run(const Scenario& scenario, TraceSink* trace = nullptr);

/// Percentile with linear interpolation between order statistics (p in [0, 100]).
double summarize(std::span<const double> values, double percentile);

/// (sum x)^2 / (n * sum x^2); 1 for an all-zero input.
double jain_index(std::span<const double> values);

}  // namespace coexist::sim
