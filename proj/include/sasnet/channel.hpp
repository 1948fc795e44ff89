#pragma once

#include <string>
#include <vector>

#include "sasnet/geometry.hpp"
#include "sasnet/scenario.hpp"

namespace sasnet {

enum class LinkClass { AbsToLue, SatToAbs, CbsToAbs, SatToHue, CbsToHue };

const char* link_class_name(LinkClass c);

/// One evaluated link at one slot. `gain` is a dimensionless power gain.
struct LinkState {
  Position3D tx;
  Position3D rx;
  double gain = 0.0;
  double interference_w = 0.0;
  double sinr = 0.0;
  double rate_bps = 0.0;
};

/// Large-scale power gain of the UAV access link: xi0 / squared 3D distance.
/// Throws std::domain_error for coincident positions.
double abs_lue_large_scale(const Position3D& d_u, const Position3D& d_ml, double xi0);

/// Log-distance mmW path loss in dB at distance d with shadowing draw psi.
double mmw_large_scale_db(double d_m, const MmwParams& p, double d0_m, double psi_db);

/// Rician amplitude coefficient for factor K and scatter draw Xi.
double rician_small_scale(double rician_k, double xi_draw);

/// Composite mmW power gain (amplitude squared), deterministic given draws.
double composite_mmw_gain(double d_m, const MmwParams& p, double d0_m, double psi_db, double beta);

/// Curved-earth two-ray path loss in dB. A destructive null reports
/// flagged=true with +infinity dB instead of failing.
struct Ce2rResult {
  double loss_db = 0.0;
  bool flagged_null = false;
};
Ce2rResult ce2r_pathloss_db(double d_m, double h_c_m, double h_mh_m, double lambda_m);

double sinr(double p_w, double gain, double interference_w, double noise_w);

double shannon_rate(double bandwidth_hz, double sinr_value);

/// Precomputed per-scenario channel realization. Gains of links with static
/// geometry (satellite/CBS transmitters) are drawn once per (link, slot) from
/// the scenario seed and shared read-only; UAV-side gains depend on the
/// current deployment and are evaluated on demand.
class ChannelModel {
 public:
  explicit ChannelModel(const Scenario& s);

  const Scenario& scenario() const { return *scenario_; }

  double bandwidth(LinkClass c) const;
  double noise_w(LinkClass c) const;

  // Static-geometry power gains (deterministic after construction).
  double gain_sat_abs(int u, int n) const { return sat_abs_[idx_un(u, n)]; }
  double gain_cbs_abs(int c, int u, int n) const { return cbs_abs_[idx_cun(c, u, n)]; }
  double gain_sat_hue(int mh, int n) const { return sat_hue_[idx_mn(mh, n)]; }
  double gain_cbs_hue(int c, int mh, int n) const { return cbs_hue_[idx_cmn(c, mh, n)]; }
  bool cbs_hue_null(int c, int mh, int n) const { return cbs_hue_null_[idx_cmn(c, mh, n)]; }
  double gain_cbs_lue(int c, int ml, int n) const { return cbs_lue_[c * scenario_->lue_count() * slots_ + ml * slots_ + n]; }

  // Deployment-dependent gains of the UAV transmitter (expected small-scale
  // power; the access-link optimization needs a deterministic distance law).
  double gain_abs_at(const Position3D& abs_pos, const Position3D& rx) const;

  double abs_lue_reference_gain() const;  // g0 of the access link

 private:
  int idx_un(int u, int n) const { return u * slots_ + n; }
  int idx_mn(int m, int n) const { return m * slots_ + n; }
  int idx_cun(int c, int u, int n) const { return (c * scenario_->abs_count() + u) * slots_ + n; }
  int idx_cmn(int c, int m, int n) const { return (c * scenario_->hue_count() + m) * slots_ + n; }

  const Scenario* scenario_;
  int slots_;
  double antenna_factor_ = 1.0;
  std::vector<double> sat_abs_;
  std::vector<double> cbs_abs_;
  std::vector<double> sat_hue_;
  std::vector<double> cbs_hue_;
  std::vector<char> cbs_hue_null_;
  std::vector<double> cbs_lue_;
};

/// Gain matrix dump for debugging: tx_id,rx_id,class,slot,gain
std::string dump_gain_table(const ChannelModel& ch);

}  // namespace sasnet
