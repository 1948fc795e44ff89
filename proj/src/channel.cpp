#include "sasnet/channel.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sasnet/rng.hpp"

namespace sasnet {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

const char* link_class_name(LinkClass c) {
  switch (c) {
    case LinkClass::AbsToLue: return "abs_lue";
    case LinkClass::SatToAbs: return "sat_abs";
    case LinkClass::CbsToAbs: return "cbs_abs";
    case LinkClass::SatToHue: return "sat_hue";
    case LinkClass::CbsToHue: return "cbs_hue";
  }
  return "?";
}

double abs_lue_large_scale(const Position3D& d_u, const Position3D& d_ml, double xi0) {
  const double dist_sq = distance_sq(d_u, d_ml);
  if (dist_sq <= 0.0) throw std::domain_error("abs_lue_large_scale: coincident positions");
  return xi0 / dist_sq;
}

double mmw_large_scale_db(double d_m, const MmwParams& p, double d0_m, double psi_db) {
  if (d_m <= 0.0) throw std::domain_error("mmw_large_scale_db: distance must be positive");
  return p.omega_db + p.zeta * 10.0 * std::log10(d_m / d0_m) + psi_db;
}

double rician_small_scale(double rician_k, double xi_draw) {
  return std::sqrt(rician_k / (1.0 + rician_k)) + std::sqrt(1.0 / (1.0 + rician_k)) * xi_draw;
}

double composite_mmw_gain(double d_m, const MmwParams& p, double d0_m, double psi_db, double beta) {
  if (d_m <= 0.0) throw std::domain_error("composite_mmw_gain: distance must be positive");
  const double amplitude =
      std::pow(d0_m / d_m, p.zeta / 2.0) * std::pow(10.0, -(p.omega_db + psi_db) / 20.0) * beta;
  return amplitude * amplitude;
}

Ce2rResult ce2r_pathloss_db(double d_m, double h_c_m, double h_mh_m, double lambda_m) {
  if (d_m <= 0.0 || h_c_m <= 0.0 || h_mh_m <= 0.0 || lambda_m <= 0.0)
    throw std::domain_error("ce2r_pathloss_db: distance and heights must be positive");
  const double direct = lambda_m / (4.0 * kPi * d_m);
  const double two_ray = 2.0 * std::sin(2.0 * kPi * h_c_m * h_mh_m / (lambda_m * d_m));
  const double gain = direct * direct * two_ray * two_ray;
  if (gain <= 0.0) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  return {-10.0 * std::log10(gain), false};
}

double sinr(double p_w, double gain, double interference_w, double noise_w) {
  return p_w * gain / (interference_w + noise_w);
}

double shannon_rate(double bandwidth_hz, double sinr_value) {
  if (bandwidth_hz <= 0.0) throw std::domain_error("shannon_rate: bandwidth must be positive");
  return bandwidth_hz * std::log2(1.0 + sinr_value);
}

ChannelModel::ChannelModel(const Scenario& s) : scenario_(&s), slots_(s.slot_count()) {
  const RadioParams& r = s.radio();
  if (r.apply_antenna_gains)
    antenna_factor_ = std::pow(10.0, (r.antenna_gain_tx_dbi + r.antenna_gain_rx_dbi) / 10.0);

  const double lambda = kSpeedOfLight / r.carrier_hz;
  const int U = s.abs_count(), C = s.cbs_count(), Ml = s.lue_count(), Mh = s.hue_count();

  // Backhaul geometry is held at the initial deployment; the transmission
  // distances are treated as constant within the studied horizon.
  Rng rng(s.seed, "channel");
  sat_abs_.resize(size_t(U) * slots_);
  for (int u = 0; u < U; ++u)
    for (int n = 0; n < slots_; ++n) {
      const double d = distance(s.satellite, s.abs_initial[u]);
      const double psi = rng.normal(0.0, r.sat_abs.delta_db);
      const double beta = rician_small_scale(r.sat_abs.rician_k, rng.normal());
      sat_abs_[idx_un(u, n)] =
          composite_mmw_gain(d, r.sat_abs, r.d0_m, psi, beta) * r.smallscale_scale_mmw * antenna_factor_;
    }

  cbs_abs_.resize(size_t(C) * U * slots_);
  for (int c = 0; c < C; ++c)
    for (int u = 0; u < U; ++u)
      for (int n = 0; n < slots_; ++n) {
        const double d = distance(s.cbs[c], s.abs_initial[u]);
        const double psi = rng.normal(0.0, r.cbs_abs.delta_db);
        const double beta = rician_small_scale(r.cbs_abs.rician_k, rng.normal());
        cbs_abs_[idx_cun(c, u, n)] =
            composite_mmw_gain(d, r.cbs_abs, r.d0_m, psi, beta) * r.smallscale_scale_mmw * antenna_factor_;
      }

  sat_hue_.resize(size_t(Mh) * slots_);
  for (int mh = 0; mh < Mh; ++mh)
    for (int n = 0; n < slots_; ++n) {
      const double d = distance(s.satellite, s.hue_pos(mh, n));
      const double psi = rng.normal(0.0, r.sat_hue.delta_db);
      const double beta = rician_small_scale(r.sat_hue.rician_k, rng.normal());
      sat_hue_[idx_mn(mh, n)] =
          composite_mmw_gain(d, r.sat_hue, r.d0_m, psi, beta) * r.smallscale_scale_mmw * antenna_factor_;
    }

  cbs_hue_.resize(size_t(C) * Mh * slots_);
  cbs_hue_null_.assign(size_t(C) * Mh * slots_, 0);
  for (int c = 0; c < C; ++c)
    for (int mh = 0; mh < Mh; ++mh)
      for (int n = 0; n < slots_; ++n) {
        const double d = distance(s.cbs[c], s.hue_pos(mh, n));
        const Ce2rResult pl = ce2r_pathloss_db(d, r.cbs_height_m, r.hue_height_m, lambda);
        const double beta = rician_small_scale(r.rician_k_cbs_hue, rng.normal());
        double g;
        if (pl.flagged_null) {
          cbs_hue_null_[idx_cmn(c, mh, n)] = 1;
          g = r.ce2r_floor_gain;
        } else {
          g = std::max(std::pow(10.0, -pl.loss_db / 10.0) * beta * beta, r.ce2r_floor_gain);
        }
        cbs_hue_[idx_cmn(c, mh, n)] = g * antenna_factor_;
      }

  // CBS-to-LUE path, used only as an interference term at the LUEs.
  cbs_lue_.resize(size_t(C) * Ml * slots_);
  for (int c = 0; c < C; ++c)
    for (int ml = 0; ml < Ml; ++ml)
      for (int n = 0; n < slots_; ++n) {
        const double d = distance(s.cbs[c], s.lue_pos(ml, n));
        const Ce2rResult pl = ce2r_pathloss_db(d, r.cbs_height_m, r.hue_height_m, lambda);
        const double beta = rician_small_scale(r.rician_k_cbs_hue, rng.normal());
        double g = pl.flagged_null ? r.ce2r_floor_gain
                                   : std::max(std::pow(10.0, -pl.loss_db / 10.0) * beta * beta,
                                              r.ce2r_floor_gain);
        cbs_lue_[c * Ml * slots_ + ml * slots_ + n] = g * antenna_factor_;
      }
}

double ChannelModel::bandwidth(LinkClass c) const {
  const RadioParams& r = scenario_->radio();
  switch (c) {
    case LinkClass::AbsToLue: return r.bandwidth_abs_hz;
    case LinkClass::SatToAbs:
    case LinkClass::SatToHue: return r.bandwidth_sat_hz;
    case LinkClass::CbsToAbs:
    case LinkClass::CbsToHue: return r.bandwidth_cbs_hz;
  }
  return 0.0;
}

double ChannelModel::noise_w(LinkClass c) const {
  return noise_power(scenario_->radio(), bandwidth(c));
}

double ChannelModel::gain_abs_at(const Position3D& abs_pos, const Position3D& rx) const {
  const RadioParams& r = scenario_->radio();
  return abs_lue_large_scale(abs_pos, rx, r.xi0) * r.smallscale_scale_abs_lue * antenna_factor_;
}

double ChannelModel::abs_lue_reference_gain() const {
  const RadioParams& r = scenario_->radio();
  return r.xi0 * r.smallscale_scale_abs_lue * antenna_factor_;
}

std::string dump_gain_table(const ChannelModel& ch) {
  const Scenario& s = ch.scenario();
  std::ostringstream out;
  out << "tx_id,rx_id,class,slot,gain\n";
  char buf[64];
  auto row = [&](const std::string& tx, const std::string& rx, LinkClass c, int n, double g) {
    std::snprintf(buf, sizeof(buf), "%.9e", g);
    out << tx << "," << rx << "," << link_class_name(c) << "," << n << "," << buf << "\n";
  };
  for (int n = 0; n < s.slot_count(); ++n) {
    for (int u = 0; u < s.abs_count(); ++u)
      row("sat", "abs" + std::to_string(u), LinkClass::SatToAbs, n, ch.gain_sat_abs(u, n));
    for (int c = 0; c < s.cbs_count(); ++c)
      for (int u = 0; u < s.abs_count(); ++u)
        row("cbs" + std::to_string(c), "abs" + std::to_string(u), LinkClass::CbsToAbs, n,
            ch.gain_cbs_abs(c, u, n));
    for (int mh = 0; mh < s.hue_count(); ++mh)
      row("sat", "hue" + std::to_string(mh), LinkClass::SatToHue, n, ch.gain_sat_hue(mh, n));
    for (int c = 0; c < s.cbs_count(); ++c)
      for (int mh = 0; mh < s.hue_count(); ++mh)
        row("cbs" + std::to_string(c), "hue" + std::to_string(mh), LinkClass::CbsToHue, n,
            ch.gain_cbs_hue(c, mh, n));
    for (int u = 0; u < s.abs_count(); ++u)
      for (int ml = 0; ml < s.lue_count(); ++ml)
        row("abs" + std::to_string(u), "lue" + std::to_string(ml), LinkClass::AbsToLue, n,
            ch.gain_abs_at(s.abs_initial[u], s.lue_pos(ml, n)));
  }
  return out.str();
}

}  // namespace sasnet
