#pragma once

#include "sasnet/geometry.hpp"

namespace sasnet {

/// First-order lower bound of the access-link rate, expanded in the squared
/// ABS-LUE distance about the local deployment point. Equals the exact rate
/// at d_u == d_local and never exceeds it elsewhere.
double rate_lower_bound(double p_w, const Position3D& d_u, const Position3D& d_ml,
                        const Position3D& d_local, double interference_w, double noise_w,
                        double bandwidth_hz, double g0);

/// Exact access-link rate through the same parametrization (for oracles).
double rate_exact(double p_w, const Position3D& d_u, const Position3D& d_ml,
                  double interference_w, double noise_w, double bandwidth_hz, double g0);

/// Slope of the lower bound with respect to the squared distance (constant in
/// d_u), and its partial derivative with respect to p at fixed d_u.
double rate_lower_bound_slope(double p_w, const Position3D& d_ml, const Position3D& d_local,
                              double interference_w, double noise_w, double bandwidth_hz, double g0);
double rate_lower_bound_dp(double p_w, const Position3D& d_u, const Position3D& d_ml,
                           const Position3D& d_local, double interference_w, double noise_w,
                           double bandwidth_hz, double g0);

/// First-order lower bound of the squared pairwise distance about the local
/// deployment points: -|delta0|^2 + 2 delta0 . (d_i - d_j).
double distance_linearization(const Position3D& d_i, const Position3D& d_j,
                              const Position3D& d_i_local, const Position3D& d_j_local);

}  // namespace sasnet
