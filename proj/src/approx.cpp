#include "sasnet/approx.hpp"

#include <cmath>
#include <stdexcept>

namespace sasnet {

namespace {
constexpr double kLog2E = 1.4426950408889634074;  // log2(e)

double check_dist_sq(const Position3D& a, const Position3D& b, const char* what) {
  const double d = distance_sq(a, b);
  if (d <= 0.0) throw std::domain_error(std::string(what) + ": coincident positions");
  return d;
}
}  // namespace

double rate_exact(double p_w, const Position3D& d_u, const Position3D& d_ml,
                  double interference_w, double noise_w, double bandwidth_hz, double g0) {
  const double dist_sq = check_dist_sq(d_u, d_ml, "rate_exact");
  const double a = interference_w + noise_w;
  return bandwidth_hz * std::log2(1.0 + p_w * g0 / (a * dist_sq));
}

double rate_lower_bound(double p_w, const Position3D& d_u, const Position3D& d_ml,
                        const Position3D& d_local, double interference_w, double noise_w,
                        double bandwidth_hz, double g0) {
  check_dist_sq(d_u, d_ml, "rate_lower_bound");
  const double dloc = check_dist_sq(d_local, d_ml, "rate_lower_bound");
  const double d = distance_sq(d_u, d_ml);
  const double a = interference_w + noise_w;
  const double pg = p_w * g0;
  const double at_local = std::log2(1.0 + pg / (a * dloc));
  const double correction = pg * (d - dloc) * kLog2E / (dloc * (pg + a * dloc));
  return bandwidth_hz * (at_local - correction);
}

double rate_lower_bound_slope(double p_w, const Position3D& d_ml, const Position3D& d_local,
                              double interference_w, double noise_w, double bandwidth_hz,
                              double g0) {
  const double dloc = check_dist_sq(d_local, d_ml, "rate_lower_bound_slope");
  const double a = interference_w + noise_w;
  const double pg = p_w * g0;
  return -bandwidth_hz * pg * kLog2E / (dloc * (pg + a * dloc));
}

double rate_lower_bound_dp(double p_w, const Position3D& d_u, const Position3D& d_ml,
                           const Position3D& d_local, double interference_w, double noise_w,
                           double bandwidth_hz, double g0) {
  check_dist_sq(d_u, d_ml, "rate_lower_bound_dp");
  const double dloc = check_dist_sq(d_local, d_ml, "rate_lower_bound_dp");
  const double d = distance_sq(d_u, d_ml);
  const double a = interference_w + noise_w;
  const double pg = p_w * g0;
  const double denom = pg + a * dloc;
  const double from_log = bandwidth_hz * g0 * kLog2E / denom;
  const double from_correction = bandwidth_hz * (d - dloc) * kLog2E * g0 * a / (denom * denom);
  return from_log - from_correction;
}

double distance_linearization(const Position3D& d_i, const Position3D& d_j,
                              const Position3D& d_i_local, const Position3D& d_j_local) {
  const double dx0 = d_i_local.x - d_j_local.x;
  const double dy0 = d_i_local.y - d_j_local.y;
  const double dz0 = d_i_local.z - d_j_local.z;
  const double norm0_sq = dx0 * dx0 + dy0 * dy0 + dz0 * dz0;
  const double dot = dx0 * (d_i.x - d_j.x) + dy0 * (d_i.y - d_j.y) + dz0 * (d_i.z - d_j.z);
  return -norm0_sq + 2.0 * dot;
}

}  // namespace sasnet
