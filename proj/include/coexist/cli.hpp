#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coexist/config.hpp"
#include "coexist/sim/simulator.hpp"

namespace coexist::cli {

/// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kRuntimeError = 3;

/// Fixed 6-significant-digit float formatting used by every CSV writer.
std::string fmt(double v);

struct CoverageRow {
  PathModel model = PathModel::inh;
  std::string cell;  // "wifi" (-87.5 dBm floor) or "lte" (-100 dBm floor)
  double threshold_dbm = 0.0;
  CoverageResult result;
  double uplink_failure = 0.0;
};

std::vector<CoverageRow> coverage_rows(const config::CoverageSpec& spec);
std::string coverage_csv(const std::vector<CoverageRow>& rows);
std::string coverage_cdf_csv(const config::CoverageSpec& spec);

struct EdProb {
  std::vector<double> factors;
  double closed_form = 0.0;
  std::optional<double> monte_carlo;
};

/// Closed form plus an optional Monte Carlo estimate over `mc_samples` trials.
EdProb edprob(const std::vector<double>& mean_rssi_dbm, double threshold_dbm, std::size_t mc_samples,
              std::uint64_t seed);
std::string edprob_csv(const std::vector<double>& mean_rssi_dbm, const EdProb& r);

struct SimBatch {
  std::string label;            // adaptive_off / adaptive_on
  std::vector<std::uint64_t> seeds;
  std::vector<sim::Metrics> runs;

  std::vector<double> pooled(sim::Tech tech) const;
};

/// Runs `runs` consecutive seeds starting at simulation.seed; with `compare`
/// the batch is repeated with adaptive ED off and on. Runs execute on up to
/// `threads` workers; results are ordered by seed.
std::vector<SimBatch> simulate(const config::Json& cfg, int runs, bool compare, unsigned threads = 0,
                               std::ostream* trace = nullptr);
std::string simulate_csv(const std::vector<SimBatch>& batches);

/// Entry point shared by the executable and the tests. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coexist::cli
