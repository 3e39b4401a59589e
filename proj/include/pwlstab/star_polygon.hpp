#pragma once

// Polygons that are star-shaped about the origin, handled through their
// radial function r(angle). The boundary is stored as "radial pieces": edges
// seen from the origin over an angular interval inside [0, 2 pi]. Union and
// containment then reduce to comparisons of 1D functions of the angle.

#include "pwlstab/core_maps.hpp"

#include <vector>

namespace pwlstab {

/// Absolute geometric tolerance on unit-scale coordinates.
inline constexpr double kGeomEps = 1e-9;
/// Angular pieces narrower than this are dropped.
inline constexpr double kAngleEps = 1e-12;

/// Boundary edge p0 -> p1 visible from the origin for angles in [a0, a1],
/// 0 <= a0 < a1 <= 2 pi, a1 - a0 < pi.
struct RadialPiece {
  double a0 = 0.0;
  double a1 = 0.0;
  Vec2 p0 = Vec2::Zero();
  Vec2 p1 = Vec2::Zero();

  /// Point of the edge at `angle`; exact at the endpoints.
  Vec2 point_at(double angle) const;
  double radius_at(double angle) const { return point_at(angle).norm(); }
  double area() const { return 0.5 * (p0.x() * p1.y() - p0.y() * p1.x()); }
};

/// (cos a, sin a), exact at multiples of pi/2.
Vec2 direction_at(double angle);
/// atan2 mapped into [0, 2 pi).
double full_turn_angle(const Vec2& v);

class StarPolygon {
 public:
  /// The degenerate polygon {0}.
  StarPolygon() = default;

  /// Counter-clockwise boundary, star-shaped about the origin. The origin may
  /// appear as a vertex (it is then on the boundary). Throws GeometryError if
  /// some edge turns clockwise around the origin or edges overlap in angle.
  explicit StarPolygon(const std::vector<Vec2>& ccw_vertices);

  /// Builds from sorted, angularly disjoint pieces; merges collinear runs.
  static StarPolygon from_pieces(std::vector<RadialPiece> pieces);

  /// Filled triangle (0,0), (s,0), (0,s).
  static StarPolygon unit_triangle(double scale = 1.0);

  /// Canonical boundary: counter-clockwise, starting with the origin when it
  /// lies on the boundary, duplicates and collinear vertices removed.
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<RadialPiece>& pieces() const { return pieces_; }

  bool empty() const { return pieces_.empty(); }
  double area() const;
  /// Largest one-sided limit of the radial function at `angle` (0 off support).
  double radial(double angle) const;
  /// Whether the origin is an interior point.
  bool surrounds_origin() const;

  StarPolygon scaled(double s) const;
  /// Image under an invertible linear map.
  StarPolygon transformed(const Mat2& m) const;

 private:
  std::vector<RadialPiece> pieces_;
  std::vector<Vec2> vertices_;
};

/// Pieces of the image of `pieces` under an invertible `m`, sorted and split
/// at angle 0.
std::vector<RadialPiece> map_pieces(const std::vector<RadialPiece>& pieces,
                                    const Mat2& m);

/// Radial maximum of two piece layers. Within `tie_tol` the first layer wins.
std::vector<RadialPiece> radial_envelope(const std::vector<RadialPiece>& a,
                                         const std::vector<RadialPiece>& b,
                                         double tie_tol = kGeomEps);

/// Star region with radial function max(r_a, r_b).
StarPolygon union_star(const StarPolygon& a, const StarPolygon& b,
                       double tie_tol = kGeomEps);

/// Largest value of r_inner - r_outer over the support of `inner`.
double containment_excess(const StarPolygon& outer, const StarPolygon& inner);

inline bool polygon_contains(const StarPolygon& outer, const StarPolygon& inner,
                             double tol = kGeomEps) {
  return containment_excess(outer, inner) <= tol;
}

/// Smallest radial gap between the segment from (s,0) to (0,s) and the
/// polygon over the first quadrant; negative when they overlap.
double gamma_clearance(const StarPolygon& p, double scale = 1.0);

/// Vertex lists agree pointwise within `tol`.
bool same_vertices(const StarPolygon& a, const StarPolygon& b,
                   double tol = kGeomEps);

}  // namespace pwlstab
