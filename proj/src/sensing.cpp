#include "coexist/sensing.hpp"

#include <algorithm>
#include <cmath>

#include "coexist/errors.hpp"
#include "coexist/units.hpp"

namespace coexist {

bool detect(double rssi_dbm, double threshold_dbm) { return rssi_dbm >= threshold_dbm; }

std::vector<double> ed_success_factors(std::span<const double> mean_rssi_dbm, double threshold_dbm) {
  if (mean_rssi_dbm.empty()) throw InvalidArgument("ed_success_prob needs at least one link");
  std::vector<double> factors;
  factors.reserve(mean_rssi_dbm.size());
  for (double r : mean_rssi_dbm) {
    if (!std::isfinite(r)) throw InvalidArgument("mean RSSI must be finite");
    // P{fade > 10^((T - r)/10)} for a unit-mean exponential fade.
    factors.push_back(std::exp(-db_to_linear(threshold_dbm - r)));
  }
  return factors;
}

double ed_success_prob(std::span<const double> mean_rssi_dbm, double threshold_dbm) {
  double p = 1.0;
  for (double f : ed_success_factors(mean_rssi_dbm, threshold_dbm)) p *= f;
  return p;
}

namespace {

double sample_point_rssi(const Building& building, const Position& base, double tx_power_dbm,
                         const PropagationModel& model, Rng& rng, const CoverageOptions& options) {
  const Position p{rng.uniform(0.0, building.width), rng.uniform(0.0, building.length)};
  const LinkDraw link = draw_link(model, distance(base, p), rng, options.shadowing);
  double r = tx_power_dbm + link.mean_gain_db() - options.multipath_margin_db;
  if (options.fast_fading) r += linear_to_db(sample_fast_fade(rng));
  return r;
}

void check_coverage_inputs(const Building& building, const Position& base, std::size_t n_samples,
                           const PropagationModel& model) {
  if (n_samples < 1000) throw InvalidArgument("coverage needs at least 1000 samples");
  if (!building.contains(base)) throw InvalidArgument("base station outside the building");
  model.validate();
}

}  // namespace

CoverageResult fractional_ed_coverage(const Building& building, const Position& base, double tx_power_dbm,
                                      const PropagationModel& model, const EdConfig& ed,
                                      std::size_t n_samples, Rng& rng, const CoverageOptions& options) {
  check_coverage_inputs(building, base, n_samples, model);
  std::size_t in_cell = 0;
  std::size_t above = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double r = sample_point_rssi(building, base, tx_power_dbm, model, rng, options);
    if (r >= ed.min_sensitivity_dbm) {
      ++in_cell;
      if (detect(r, ed.threshold_dbm)) ++above;
    }
  }
  if (in_cell == 0) throw InvalidArgument("degenerate cell: no sample reaches the minimum sensitivity");
  CoverageResult result;
  result.samples = n_samples;
  result.cell_fraction = static_cast<double>(in_cell) / static_cast<double>(n_samples);
  result.ed_fraction = static_cast<double>(above) / static_cast<double>(in_cell);
  return result;
}

double uplink_ed_failure(const CoverageResult& coverage) {
  if (!(coverage.ed_fraction >= 0.0 && coverage.ed_fraction <= 1.0)) {
    throw InvalidArgument("ed_fraction outside [0, 1]");
  }
  return 1.0 - coverage.ed_fraction;
}

std::vector<double> sample_rssi(const Building& building, const Position& base, double tx_power_dbm,
                                const PropagationModel& model, std::size_t n_samples, Rng& rng,
                                const CoverageOptions& options) {
  check_coverage_inputs(building, base, n_samples, model);
  std::vector<double> out(n_samples);
  for (auto& r : out) r = sample_point_rssi(building, base, tx_power_dbm, model, rng, options);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CdfPoint> empirical_cdf(std::span<const double> sorted_samples, double lo_dbm, double hi_dbm,
                                    double step_db) {
  if (sorted_samples.empty() || !(step_db > 0.0) || !(hi_dbm >= lo_dbm)) {
    throw InvalidArgument("bad CDF grid");
  }
  std::vector<CdfPoint> cdf;
  const auto n_steps = static_cast<int>(std::floor((hi_dbm - lo_dbm) / step_db + 1e-9));
  for (int i = 0; i <= n_steps; ++i) {
    const double x = lo_dbm + i * step_db;
    const auto it = std::upper_bound(sorted_samples.begin(), sorted_samples.end(), x);
    cdf.push_back({x, static_cast<double>(it - sorted_samples.begin()) /
                          static_cast<double>(sorted_samples.size())});
  }
  return cdf;
}

}  // namespace coexist
