#pragma once

#include "coexist/random.hpp"

namespace coexist {

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;
};

double distance(const Position& a, const Position& b);

/// Rectangular floor plan with its origin at (0, 0).
struct Building {
  double width = 50.0;    // meters, x extent
  double length = 120.0;  // meters, y extent

  bool contains(const Position& p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= length;
  }
};

enum class PathModel { inh, diffusion };

/// LOS probability profile of the indoor-hotspot model: certain LOS up to
/// `certain_m`, exponential decay with scale `decay_m`, then a flat `plateau`
/// from `plateau_start_m` onward.
struct LosProfile {
  double certain_m = 18.0;
  double decay_m = 27.0;
  double plateau_start_m = 37.0;
  double plateau = 0.5;
};

struct PropagationModel {
  PathModel variant = PathModel::inh;
  double carrier_ghz = 5.0;
  double shadow_sigma_los_db = 3.0;
  double shadow_sigma_nlos_db = 4.0;
  // Diffusion law, calibrated so the reference building's Wi-Fi cell covers ~62%.
  double diffusion_ref_gain_db = -54.0;
  double diffusion_length_m = 5.5;
  LosProfile los;

  void validate() const;
};

struct LinkBudget {
  double tx_power_dbm = 0.0;
  double path_gain_db = 0.0;
  double shadow_db = 0.0;
  double fast_fade = 1.0;  // linear power factor, unit mean
};

/// Large-scale state of one link: deterministic gain plus the shadowing draw.
struct LinkDraw {
  bool los = true;
  double path_gain_db = 0.0;
  double shadow_db = 0.0;

  double mean_gain_db() const { return path_gain_db + shadow_db; }
};

double path_gain_inh(double d_m, double fc_ghz, bool los);
double los_probability_inh(double d_m, const LosProfile& profile = {});
double path_gain_diffusion(double d_m, const PropagationModel& model);

double sample_shadow(double sigma_db, Rng& rng);
double sample_fast_fade(Rng& rng);

double rssi(double tx_power_dbm, const LinkBudget& link, bool include_fast_fade);

/// Draws LOS state (InH only) and shadowing for a link of length `d_m`.
LinkDraw draw_link(const PropagationModel& model, double d_m, Rng& rng, bool shadowing = true);

}  // namespace coexist
