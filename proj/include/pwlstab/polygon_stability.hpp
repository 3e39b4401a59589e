#pragma once

// Asymptotic stability of the origin for the 2D normal form with
// delta_L > 0 > delta_R and tau_L < 2 sqrt(delta_L), decided by iterating the
// triangle Delta_0 = conv{(0,0), (1,0), (0,1)}:
//
//   Delta_n = g^n(Delta_0),  Omega_m = Delta_0 u ... u Delta_m,
//
// the origin is asymptotically stable iff g(Omega_m) is inside Omega_m for
// some m and g^k(Omega_m) misses the segment Gamma from (1,0) to (0,1) for
// some k.

#include "pwlstab/core_maps.hpp"
#include "pwlstab/sphere_dynamics.hpp"
#include "pwlstab/star_polygon.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pwlstab {

struct StarRegion {
  StarPolygon boundary;
  int generation = 0;
};

/// g(P): P is split along x = 0, each half mapped by its own matrix, and the
/// two images merged as a radial envelope. Throws GeometryError
/// (DegenerateImage) for a singular piece matrix.
StarPolygon image_polygon(const NormalForm2D& params, const StarPolygon& p);

StarRegion union_star(const StarRegion& region, const StarPolygon& p);

/// r_P <= r_region + tol at every angle of P's support.
bool region_contains(const StarRegion& region, const StarPolygon& p,
                     double tol = kGeomEps);

/// The polygon stays at least `clearance` (radially) away from the segment
/// from (scale, 0) to (0, scale), endpoints included.
bool separated_from_gamma(const StarPolygon& p, double clearance = kGeomEps,
                          double scale = 1.0);
inline bool separated_from_gamma(const StarRegion& r, double clearance = kGeomEps,
                                 double scale = 1.0) {
  return separated_from_gamma(r.boundary, clearance, scale);
}

/// [Delta_0, ..., Delta_n].
std::vector<StarPolygon> delta_sequence(const NormalForm2D& params, int n);
/// [Omega_0, ..., Omega_n].
std::vector<StarPolygon> omega_sequence(const NormalForm2D& params, int n);

enum class Ga92Status { Stable, NotDecided, InstabilityWitness };

const char* to_string(Ga92Status s);

struct Ga92Options {
  int witness_period = 6;
  /// Delta_0 and Gamma are scaled together; tolerances scale with them.
  double scale = 1.0;
  double containment_tol = kGeomEps;
  /// Radial clearance from Gamma required for a Stable certificate.
  double gamma_clearance = 10 * kGeomEps;
};

struct Ga92Verdict {
  Ga92Status status = Ga92Status::NotDecided;
  /// Stable: the certificate (m, k). NotDecided: the limits searched, with
  /// m set to the first invariant Omega_m if only the k search failed.
  int m = 0;
  int k = 0;
  bool invariant_found = false;
  std::optional<PeriodicOrbit> witness;
  StarRegion omega_final;
  /// containment_excess(Omega_m, g(Omega_m)) for m = 1, 2, ...
  std::vector<double> containment_residuals;
  /// gamma_clearance(g^k(Omega_m)) for k = 1, 2, ... at the invariant m.
  std::vector<double> gamma_clearances;
};

/// Throws RegimeError unless delta_L > 0 > delta_R and tau_L < 2 sqrt(delta_L).
Ga92Verdict ga92(const NormalForm2D& params, int m_max, int k_max,
                 const Ga92Options& opt = {});

/// CSV with header `generation,vertex_index,x,y`.
void write_polygons_csv(std::ostream& out, std::span<const StarPolygon> polys);
void write_polygons_csv(const std::string& path, std::span<const StarPolygon> polys);

}  // namespace pwlstab
