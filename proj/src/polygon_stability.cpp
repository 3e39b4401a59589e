#include "pwlstab/polygon_stability.hpp"

#include "pwlstab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <ostream>

namespace pwlstab {

StarPolygon image_polygon(const NormalForm2D& params, const StarPolygon& p) {
  std::vector<RadialPiece> right;
  std::vector<RadialPiece> left;
  constexpr double kDown = 3.0 * kHalfPi;
  for (const auto& piece : p.pieces()) {
    double cuts[4];
    int n = 0;
    cuts[n++] = piece.a0;
    if (piece.a0 < kHalfPi && kHalfPi < piece.a1) cuts[n++] = kHalfPi;
    if (piece.a0 < kDown && kDown < piece.a1) cuts[n++] = kDown;
    cuts[n++] = piece.a1;
    for (int i = 0; i + 1 < n; ++i) {
      const RadialPiece sub{cuts[i], cuts[i + 1], piece.point_at(cuts[i]),
                            piece.point_at(cuts[i + 1])};
      const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
      (mid < kHalfPi || mid > kDown ? right : left).push_back(sub);
    }
  }
  const auto r = map_pieces(right, params.right());
  const auto l = map_pieces(left, params.left());
  return StarPolygon::from_pieces(radial_envelope(r, l));
}

StarRegion union_star(const StarRegion& region, const StarPolygon& p) {
  return {union_star(region.boundary, p), region.generation + 1};
}

bool region_contains(const StarRegion& region, const StarPolygon& p, double tol) {
  return polygon_contains(region.boundary, p, tol);
}

bool separated_from_gamma(const StarPolygon& p, double clearance, double scale) {
  return gamma_clearance(p, scale) > clearance;
}

std::vector<StarPolygon> delta_sequence(const NormalForm2D& params, int n) {
  if (n < 0) throw std::invalid_argument("delta_sequence: n >= 0");
  std::vector<StarPolygon> out;
  out.reserve(n + 1);
  out.push_back(StarPolygon::unit_triangle());
  for (int i = 1; i <= n; ++i) out.push_back(image_polygon(params, out.back()));
  return out;
}

std::vector<StarPolygon> omega_sequence(const NormalForm2D& params, int n) {
  const auto deltas = delta_sequence(params, n);
  std::vector<StarPolygon> out;
  out.reserve(deltas.size());
  out.push_back(deltas.front());
  for (int i = 1; i <= n; ++i) out.push_back(union_star(out.back(), deltas[i]));
  return out;
}

const char* to_string(Ga92Status s) {
  switch (s) {
    case Ga92Status::Stable:
      return "Stable";
    case Ga92Status::NotDecided:
      return "NotDecided";
    case Ga92Status::InstabilityWitness:
      return "InstabilityWitness";
  }
  return "?";
}

Ga92Verdict ga92(const NormalForm2D& params, int m_max, int k_max,
                 const Ga92Options& opt) {
  require_non_invertible(params, "ga92");
  if (!(params.tau_L < 2.0 * std::sqrt(params.delta_L))) {
    throw RegimeError("ga92: requires tau_L < 2 sqrt(delta_L)");
  }
  if (m_max < 1 || k_max < 1) {
    throw std::invalid_argument("ga92: m_max and k_max must be >= 1");
  }
  if (!(opt.scale > 0.0)) throw std::invalid_argument("ga92: scale > 0");

  Ga92Verdict v;
  const StarPolygon delta0 = StarPolygon::unit_triangle(opt.scale);
  v.omega_final = {delta0, 0};

  if (opt.witness_period >= 1) {
    const auto orbits = periodic_orbits_G(params, opt.witness_period);
    const auto worst = std::max_element(
        orbits.begin(), orbits.end(),
        [](const auto& a, const auto& b) { return a.lambda_value < b.lambda_value; });
    if (worst != orbits.end() && worst->lambda_value > 0.0) {
      v.status = Ga92Status::InstabilityWitness;
      v.witness = *worst;
      return v;
    }
  }

  const double tol = opt.containment_tol * opt.scale;
  const double clearance = opt.gamma_clearance * opt.scale;
  StarPolygon delta = delta0;
  StarPolygon omega = delta0;
  for (int m = 1; m <= m_max; ++m) {
    delta = image_polygon(params, delta);
    omega = union_star(omega, delta, tol);
    v.omega_final = {omega, m};
    StarPolygon image = image_polygon(params, omega);
    const double excess = containment_excess(omega, image);
    v.containment_residuals.push_back(excess);
    if (excess > tol) continue;

    v.invariant_found = true;
    v.m = m;
    for (int k = 1; k <= k_max; ++k) {
      const double c = gamma_clearance(image, opt.scale);
      v.gamma_clearances.push_back(c);
      if (c > clearance) {
        v.status = Ga92Status::Stable;
        v.k = k;
        return v;
      }
      image = image_polygon(params, image);
    }
    v.status = Ga92Status::NotDecided;
    v.k = k_max;
    return v;
  }
  v.status = Ga92Status::NotDecided;
  v.m = m_max;
  v.k = k_max;
  return v;
}

void write_polygons_csv(std::ostream& out, std::span<const StarPolygon> polys) {
  out << "generation,vertex_index,x,y\n";
  for (std::size_t g = 0; g < polys.size(); ++g) {
    const auto& vs = polys[g].vertices();
    for (std::size_t i = 0; i < vs.size(); ++i) {
      out << fmt::format("{},{},{},{}\n", g, i, vs[i].x(), vs[i].y());
    }
  }
}

void write_polygons_csv(const std::string& path, std::span<const StarPolygon> polys) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path, "cannot open for writing");
  write_polygons_csv(f, polys);
  f.flush();
  if (!f) throw IoError(path, "write failed");
}

}  // namespace pwlstab
