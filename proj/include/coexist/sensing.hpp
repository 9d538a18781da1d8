#pragma once

#include <limits>
#include <span>
#include <vector>

#include "coexist/propagation.hpp"
#include "coexist/random.hpp"

namespace coexist {

/// Sentinel threshold meaning "no ED threshold": everything is detected.
inline constexpr double kNoThreshold = -std::numeric_limits<double>::infinity();

/// Decode floors of the two cell types.
inline constexpr double kWifiMinSensitivityDbm = -87.5;
inline constexpr double kLteMinSensitivityDbm = -100.0;

struct EdConfig {
  double threshold_dbm = -62.0;
  double min_sensitivity_dbm = kWifiMinSensitivityDbm;
};

struct CoverageResult {
  double cell_fraction = 0.0;  // fraction of the building inside the cell
  double ed_fraction = 0.0;    // fraction of the cell at or above the ED threshold
  std::size_t samples = 0;
};

struct CoverageOptions {
  bool shadowing = true;
  bool fast_fading = false;
  double multipath_margin_db = 0.0;  // subtracted from every sample
};

bool detect(double rssi_dbm, double threshold_dbm);

/// Closed-form probability that every link clears the threshold under
/// independent unit-mean exponential (Rayleigh power) fading.
double ed_success_prob(std::span<const double> mean_rssi_dbm, double threshold_dbm);

/// Per-link factors of ed_success_prob, same order as the input.
std::vector<double> ed_success_factors(std::span<const double> mean_rssi_dbm, double threshold_dbm);

CoverageResult fractional_ed_coverage(const Building& building, const Position& base, double tx_power_dbm,
                                      const PropagationModel& model, const EdConfig& ed,
                                      std::size_t n_samples, Rng& rng, const CoverageOptions& options = {});

double uplink_ed_failure(const CoverageResult& coverage);

/// Uniform-over-building RSSI samples from `base`, sorted ascending.
std::vector<double> sample_rssi(const Building& building, const Position& base, double tx_power_dbm,
                                const PropagationModel& model, std::size_t n_samples, Rng& rng,
                                const CoverageOptions& options = {});

struct CdfPoint {
  double rssi_dbm;
  double fraction;  // P{RSSI <= rssi_dbm}
};

/// Empirical CDF of sorted samples on a regular dBm grid [lo, hi].
std::vector<CdfPoint> empirical_cdf(std::span<const double> sorted_samples, double lo_dbm, double hi_dbm,
                                    double step_db);

}  // namespace coexist
