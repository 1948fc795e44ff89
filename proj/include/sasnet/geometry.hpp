#pragma once

#include <cmath>

namespace sasnet {

/// 3D position in meters; z is altitude above the sea surface.
struct Position3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Position3D&, const Position3D&) = default;
};

inline double distance_sq(const Position3D& a, const Position3D& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

inline double distance(const Position3D& a, const Position3D& b) {
  return std::sqrt(distance_sq(a, b));
}

}  // namespace sasnet
