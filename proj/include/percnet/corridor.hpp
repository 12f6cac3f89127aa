#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "percnet/geometry.hpp"

namespace percnet {

// Corridor width formula: sqrt(2)*c*kappa*ln(sqrt(n)/(sqrt(2)c)).
inline double corridor_width(double n, double c, double kappa) {
  return std::sqrt(2.0) * c * kappa * std::log(std::sqrt(n) / (std::sqrt(2.0) * c));
}

// Rectangular routing corridor for one s-d pair. Local frame: `origin` is the
// corner at local (0,0), `axis` the unit vector along the length, perp(axis)
// across the width. Local x in [0, length], local y in [0, width].
struct Corridor {
  std::size_t source_idx = 0;
  std::size_t dest_idx = 0;
  Vec2 source;
  Vec2 dest;
  Vec2 origin;
  Vec2 axis;       // unit, along length
  double length = 0.0;
  double width = 0.0;
  double phi = 0.0;  // measured endpoint-distance coefficient, filled by routing

  Vec2 to_local(const Vec2& p) const {
    const Vec2 rel = p - origin;
    return {dot(rel, axis), dot(rel, perp(axis))};
  }
  Vec2 to_world(const Vec2& local) const {
    return origin + axis * local.x + perp(axis) * local.y;
  }
  bool contains(const Vec2& p, double eps = 0.0) const {
    const Vec2 l = to_local(p);
    return l.x >= -eps && l.x <= length + eps && l.y >= -eps && l.y <= width + eps;
  }
};

// Builds the routing corridor for a pair: axis parallel to the s-d segment,
// length 2*sqrt(n) centered on the disk center's projection (so the corridor
// covers the region lengthwise), shifted laterally toward the disk center
// while keeping both endpoints strictly interior.
inline Corridor build_corridor(const Vec2& s, const Vec2& d, double n, double c,
                               double kappa) {
  if (s == d) throw std::invalid_argument("build_corridor: s and d coincide");
  if (!(c > 0) || !(kappa > 0) || !(n > 0))
    throw std::invalid_argument("build_corridor: constants must be positive");
  Corridor cor;
  cor.source = s;
  cor.dest = d;
  cor.axis = normalized(d - s);
  cor.length = 2.0 * std::sqrt(n);
  cor.width = corridor_width(n, c, kappa);
  if (!(cor.width > 0))
    throw std::invalid_argument("build_corridor: corridor width nonpositive (n too small for c)");

  const Vec2 v = perp(cor.axis);
  // Lateral placement: s and d lie on the same line, offset margin from one
  // long edge; the wide side faces the disk center ("as high as possible"
  // overlap with the network region).
  double side = dot(Vec2{0, 0} - s, v);
  const double sign = side < 0.0 ? -1.0 : 1.0;
  const double margin = std::min(c, cor.width / 4.0);

  // Lengthwise: center on the projection of the disk center, then shift if
  // needed so both endpoints keep a margin from the short edges.
  const double t_s = 0.0;
  const double t_d = dot(d - s, cor.axis);
  const double t_center = dot(Vec2{0, 0} - s, cor.axis);
  double lo = t_center - std::sqrt(n);
  const double span = std::max(t_s, t_d) - std::min(t_s, t_d);
  const double slack = std::max(0.0, (cor.length - span) / 2.0);
  const double lmargin = std::min({c, cor.length / 4.0, slack});
  lo = std::min(lo, std::min(t_s, t_d) - lmargin);
  lo = std::max(lo, std::max(t_s, t_d) + lmargin - cor.length);

  // origin = world point of local (0,0): at axis coordinate lo (relative to s)
  // and lateral offset -margin on the chosen side.
  if (sign > 0) {
    cor.origin = s + cor.axis * lo + v * (-margin);
  } else {
    // Flip the frame so local +y still points into the corridor.
    cor.axis = cor.axis * -1.0;
    const Vec2 v2 = perp(cor.axis);
    const double lo2 = -(lo + cor.length);  // same interval in flipped axis coords
    cor.origin = s + cor.axis * lo2 + v2 * (-margin);
  }
  return cor;
}

}  // namespace percnet
