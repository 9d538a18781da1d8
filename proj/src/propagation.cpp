#include "coexist/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coexist/errors.hpp"

namespace coexist {

namespace {

double checked_distance(double d_m) {
  if (!std::isfinite(d_m) || d_m <= 0.0) {
    throw InvalidArgument("distance must be finite and positive");
  }
  return d_m < 1.0 ? 1.0 : d_m;
}

}  // namespace

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void PropagationModel::validate() const {
  if (!(carrier_ghz > 0.0)) throw InvalidArgument("carrier frequency must be positive");
  if (!(shadow_sigma_los_db >= 0.0) || !(shadow_sigma_nlos_db >= 0.0)) {
    throw InvalidArgument("shadowing sigma must be non-negative");
  }
  if (!(diffusion_length_m > 0.0)) throw InvalidArgument("diffusion length must be positive");
  if (!std::isfinite(diffusion_ref_gain_db)) throw InvalidArgument("diffusion reference gain must be finite");
  if (!(los.decay_m > 0.0) || !(los.plateau >= 0.0 && los.plateau <= 1.0)) {
    throw InvalidArgument("LOS profile out of range");
  }
}

double path_gain_inh(double d_m, double fc_ghz, bool los) {
  const double d = checked_distance(d_m);
  const double freq_term = 20.0 * std::log10(fc_ghz);
  const double pl = los ? 16.9 * std::log10(d) + 32.8 + freq_term
                        : 43.3 * std::log10(d) + 11.5 + freq_term;
  return -pl;
}

double los_probability_inh(double d_m, const LosProfile& profile) {
  if (!(d_m >= 0.0)) throw InvalidArgument("distance must be non-negative");
  if (d_m <= profile.certain_m) return 1.0;
  if (d_m < profile.plateau_start_m) return std::exp(-(d_m - profile.certain_m) / profile.decay_m);
  return profile.plateau;
}

double path_gain_diffusion(double d_m, const PropagationModel& model) {
  const double d = checked_distance(d_m);
  return model.diffusion_ref_gain_db - 10.0 * std::log10(d) -
         (10.0 / std::numbers::ln10) * (d / model.diffusion_length_m);
}

double sample_shadow(double sigma_db, Rng& rng) {
  if (!(sigma_db >= 0.0)) throw InvalidArgument("shadowing sigma must be non-negative");
  if (sigma_db == 0.0) return 0.0;
  return sigma_db * rng.normal();
}

double sample_fast_fade(Rng& rng) { return rng.exponential(1.0); }

double rssi(double tx_power_dbm, const LinkBudget& link, bool include_fast_fade) {
  double r = tx_power_dbm + link.path_gain_db + link.shadow_db;
  if (include_fast_fade) r += 10.0 * std::log10(link.fast_fade);
  return r;
}

LinkDraw draw_link(const PropagationModel& model, double d_m, Rng& rng, bool shadowing) {
  LinkDraw draw;
  if (model.variant == PathModel::inh) {
    const double d = std::max(d_m, 1e-9);
    const double p_los = los_probability_inh(d, model.los);
    // Always consume the LOS draw so stream positions don't depend on distance.
    draw.los = rng.uniform() < p_los;
    draw.path_gain_db = path_gain_inh(d, model.carrier_ghz, draw.los);
  } else {
    draw.los = false;
    draw.path_gain_db = path_gain_diffusion(std::max(d_m, 1e-9), model);
  }
  const double sigma = draw.los ? model.shadow_sigma_los_db : model.shadow_sigma_nlos_db;
  const double z = rng.normal();
  draw.shadow_db = shadowing ? sigma * z : 0.0;
  return draw;
}

}  // namespace coexist
