#include "pwlstab/star_polygon.hpp"

#include "pwlstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pwlstab {

namespace {

inline double cross(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// One edge p0 -> p1 (counter-clockwise about the origin) as one or two
/// pieces, split where it crosses the positive x-axis.
void append_edge(const Vec2& p0, const Vec2& p1, std::vector<RadialPiece>& out) {
  const double a0 = full_turn_angle(p0);
  double a1 = full_turn_angle(p1);
  if (a1 <= a0) a1 += kTwoPi;
  if (a1 <= kTwoPi) {
    if (a1 - a0 > kAngleEps) out.push_back({a0, a1, p0, p1});
    return;
  }
  const RadialPiece whole{a0, a1, p0, p1};
  const Vec2 cut = whole.point_at(kTwoPi);
  if (kTwoPi - a0 > kAngleEps) out.push_back({a0, kTwoPi, p0, cut});
  if (a1 - kTwoPi > kAngleEps) out.push_back({0.0, a1 - kTwoPi, cut, p1});
}

void sort_pieces(std::vector<RadialPiece>& pieces) {
  std::sort(pieces.begin(), pieces.end(),
            [](const RadialPiece& a, const RadialPiece& b) { return a.a0 < b.a0; });
}

double distance_to_line(const Vec2& q, const Vec2& c0, const Vec2& c1) {
  const Vec2 d = c1 - c0;
  const double len = d.norm();
  return len > 0.0 ? std::abs(cross(q - c0, d)) / len : (q - c0).norm();
}

/// Walks a piece layer over the merged breakpoints; `pos` only moves forward.
struct LayerCursor {
  const std::vector<RadialPiece>& pieces;
  std::size_t pos = 0;

  const RadialPiece* covering(double b0) {
    while (pos < pieces.size() && pieces[pos].a1 <= b0) ++pos;
    if (pos < pieces.size() && pieces[pos].a0 <= b0) return &pieces[pos];
    return nullptr;
  }
  std::size_t index() const { return pos; }
};

std::vector<double> breakpoints(const std::vector<RadialPiece>& a,
                                const std::vector<RadialPiece>& b) {
  std::vector<double> bp;
  bp.reserve(2 * (a.size() + b.size()));
  for (const auto& p : a) {
    bp.push_back(p.a0);
    bp.push_back(p.a1);
  }
  for (const auto& p : b) {
    bp.push_back(p.a0);
    bp.push_back(p.a1);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

}  // namespace

// ---------------------------------------------------------------------------

Vec2 direction_at(double angle) {
  if (angle == 0.0 || angle == kTwoPi) return {1.0, 0.0};
  if (angle == kHalfPi) return {0.0, 1.0};
  if (angle == kPi) return {-1.0, 0.0};
  if (angle == 3.0 * kHalfPi) return {0.0, -1.0};
  return {std::cos(angle), std::sin(angle)};
}

double full_turn_angle(const Vec2& v) {
  double a = std::atan2(v.y(), v.x());
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a == 0.0 ? 0.0 : a;
}

Vec2 RadialPiece::point_at(double angle) const {
  if (angle == a0) return p0;
  if (angle == a1) return p1;
  const Vec2 u = direction_at(angle);
  const double r = cross(p0, p1) / cross(u, p1 - p0);
  return r * u;
}

// ---------------------------------------------------------------------------

StarPolygon::StarPolygon(const std::vector<Vec2>& v) {
  const std::size_t n = v.size();
  std::vector<RadialPiece> pieces;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    const double na = a.norm();
    const double nb = b.norm();
    if (na <= kGeomEps || nb <= kGeomEps) continue;
    const double s = cross(a, b) / (na * nb);
    if (s < -1e-12) {
      throw GeometryError("StarPolygon: edge " + std::to_string(i) +
                          " turns clockwise about the origin");
    }
    if (s <= 1e-12) continue;  // radial edge, or through the origin
    append_edge(a, b, pieces);
  }
  sort_pieces(pieces);
  for (std::size_t k = 1; k < pieces.size(); ++k) {
    if (pieces[k].a0 < pieces[k - 1].a1 - kAngleEps) {
      throw GeometryError("StarPolygon: boundary is not star-shaped about the origin");
    }
  }
  *this = from_pieces(std::move(pieces));
}

StarPolygon StarPolygon::from_pieces(std::vector<RadialPiece> in) {
  StarPolygon out;

  // Merge contiguous collinear runs.
  std::vector<RadialPiece>& ps = out.pieces_;
  std::vector<Vec2> interior;
  for (const auto& p : in) {
    if (p.a1 - p.a0 <= kAngleEps) continue;
    if (!ps.empty()) {
      RadialPiece& cur = ps.back();
      const bool contiguous = std::abs(p.a0 - cur.a1) <= kAngleEps &&
                              (p.p0 - cur.p1).norm() <= kGeomEps;
      if (contiguous && p.a1 - cur.a0 < kPi - 1e-9) {
        const double tol = 1e-10 * std::max({1.0, cur.p0.norm(), p.p1.norm()});
        bool straight = distance_to_line(cur.p1, cur.p0, p.p1) <= tol;
        for (const auto& q : interior) {
          straight = straight && distance_to_line(q, cur.p0, p.p1) <= tol;
        }
        if (straight) {
          interior.push_back(cur.p1);
          cur.a1 = p.a1;
          cur.p1 = p.p1;
          continue;
        }
      }
    }
    interior.clear();
    ps.push_back(p);
  }
  if (ps.empty()) return out;

  // Boundary vertices, with the origin wherever the angular support has a gap.
  const std::size_t n = ps.size();
  std::vector<bool> gap_before(n);
  std::size_t start = 0;
  bool any_gap = false;
  for (std::size_t k = 0; k < n; ++k) {
    const double gap = k == 0 ? ps[0].a0 + (kTwoPi - ps[n - 1].a1)
                              : ps[k].a0 - ps[k - 1].a1;
    gap_before[k] = gap > kAngleEps;
    if (gap_before[k] && !any_gap) {
      any_gap = true;
      start = k;
    }
  }
  std::vector<Vec2> verts;
  const auto push = [&](const Vec2& q) {
    if (verts.empty() || (verts.back() - q).norm() > kGeomEps) verts.push_back(q);
  };
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = (start + j) % n;
    if (gap_before[k]) push(Vec2::Zero());
    push(ps[k].p0);
    push(ps[k].p1);
  }
  if (verts.size() > 1 && (verts.back() - verts.front()).norm() <= kGeomEps) {
    verts.pop_back();
  }

  // Drop vertices where the boundary continues straight on.
  bool changed = verts.size() > 3;
  while (changed && verts.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < verts.size() && verts.size() > 3; ++i) {
      const Vec2& prev = verts[(i + verts.size() - 1) % verts.size()];
      const Vec2& cur = verts[i];
      const Vec2& next = verts[(i + 1) % verts.size()];
      if (cur.norm() <= kGeomEps) continue;
      const Vec2 e0 = cur - prev;
      const Vec2 e1 = next - cur;
      const double l = e0.norm() * e1.norm();
      if (l > 0.0 && std::abs(cross(e0, e1)) <= 1e-10 * l && e0.dot(e1) > 0.0) {
        verts.erase(verts.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  out.vertices_ = std::move(verts);
  return out;
}

StarPolygon StarPolygon::unit_triangle(double scale) {
  return StarPolygon({Vec2(0.0, 0.0), Vec2(scale, 0.0), Vec2(0.0, scale)});
}

double StarPolygon::area() const {
  double a = 0.0;
  for (const auto& p : pieces_) a += p.area();
  return a;
}

double StarPolygon::radial(double angle) const {
  angle = std::fmod(angle, kTwoPi);
  if (angle < 0.0) angle += kTwoPi;
  double r = 0.0;
  for (const auto& p : pieces_) {
    if (angle >= p.a0 - kAngleEps && angle <= p.a1 + kAngleEps) {
      r = std::max(r, p.radius_at(std::clamp(angle, p.a0, p.a1)));
    }
    if (angle <= kAngleEps && p.a1 >= kTwoPi - kAngleEps) {
      r = std::max(r, p.p1.norm());
    }
  }
  return r;
}

bool StarPolygon::surrounds_origin() const {
  if (pieces_.empty()) return false;
  if (pieces_.front().a0 > kAngleEps || pieces_.back().a1 < kTwoPi - kAngleEps) {
    return false;
  }
  for (std::size_t k = 1; k < pieces_.size(); ++k) {
    if (pieces_[k].a0 - pieces_[k - 1].a1 > kAngleEps) return false;
  }
  return true;
}

StarPolygon StarPolygon::scaled(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("StarPolygon::scaled: s > 0");
  StarPolygon out = *this;
  for (auto& p : out.pieces_) {
    p.p0 *= s;
    p.p1 *= s;
  }
  for (auto& v : out.vertices_) v *= s;
  return out;
}

StarPolygon StarPolygon::transformed(const Mat2& m) const {
  return from_pieces(map_pieces(pieces_, m));
}

// ---------------------------------------------------------------------------

std::vector<RadialPiece> map_pieces(const std::vector<RadialPiece>& pieces,
                                    const Mat2& m) {
  const double det = m.determinant();
  if (!(std::abs(det) > 1e-14 * std::max(1.0, m.squaredNorm()))) {
    if (!pieces.empty()) {
      throw GeometryError("degenerate image: matrix is singular (det = " +
                          std::to_string(det) + ")");
    }
    return {};
  }
  std::vector<RadialPiece> out;
  out.reserve(pieces.size() + 2);
  for (const auto& p : pieces) {
    Vec2 q0 = m * p.p0;
    Vec2 q1 = m * p.p1;
    if (det < 0.0) std::swap(q0, q1);
    append_edge(q0, q1, out);
  }
  sort_pieces(out);
  return out;
}

std::vector<RadialPiece> radial_envelope(const std::vector<RadialPiece>& a,
                                         const std::vector<RadialPiece>& b,
                                         double tie_tol) {
  const auto bp = breakpoints(a, b);
  LayerCursor ca{a};
  LayerCursor cb{b};

  std::vector<RadialPiece> out;
  int last_layer = -1;
  std::size_t last_index = 0;
  const auto emit = [&](const RadialPiece& src, int layer, std::size_t index,
                        double s0, double s1) {
    if (!(s1 > s0)) return;
    if (!out.empty() && last_layer == layer && last_index == index &&
        out.back().a1 == s0) {
      out.back().a1 = s1;
      out.back().p1 = src.point_at(s1);
      return;
    }
    out.push_back({s0, s1, src.point_at(s0), src.point_at(s1)});
    last_layer = layer;
    last_index = index;
  };

  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double b0 = bp[k];
    const double b1 = bp[k + 1];
    const RadialPiece* pa = ca.covering(b0);
    const RadialPiece* pb = cb.covering(b0);
    if (pa && pa->a1 < b1) pa = nullptr;
    if (pb && pb->a1 < b1) pb = nullptr;
    if (!pa && !pb) continue;
    if (!pb) {
      emit(*pa, 0, ca.index(), b0, b1);
      continue;
    }
    if (!pa) {
      emit(*pb, 1, cb.index(), b0, b1);
      continue;
    }
    const auto diff = [&](double t) { return pa->radius_at(t) - pb->radius_at(t); };
    const double dl = diff(b0);
    const double dr = diff(b1);
    if (dl >= -tie_tol && dr >= -tie_tol) {
      emit(*pa, 0, ca.index(), b0, b1);
    } else if (dl <= tie_tol && dr <= tie_tol) {
      emit(*pb, 1, cb.index(), b0, b1);
    } else {
      // The two edges cross once inside (b0, b1).
      double lo = b0;
      double hi = b1;
      const bool a_left = dl > 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((diff(mid) > 0.0) == a_left) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double cut = 0.5 * (lo + hi);
      if (a_left) {
        emit(*pa, 0, ca.index(), b0, cut);
        emit(*pb, 1, cb.index(), cut, b1);
      } else {
        emit(*pb, 1, cb.index(), b0, cut);
        emit(*pa, 0, ca.index(), cut, b1);
      }
    }
  }
  return out;
}

StarPolygon union_star(const StarPolygon& a, const StarPolygon& b, double tie_tol) {
  return StarPolygon::from_pieces(radial_envelope(a.pieces(), b.pieces(), tie_tol));
}

double containment_excess(const StarPolygon& outer, const StarPolygon& inner) {
  const auto& po = outer.pieces();
  const auto& pi = inner.pieces();
  const auto bp = breakpoints(po, pi);
  LayerCursor co{po};
  LayerCursor ci{pi};
  double excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double b0 = bp[k];
    const double b1 = bp[k + 1];
    const RadialPiece* p_in = ci.covering(b0);
    const RadialPiece* p_out = co.covering(b0);
    if (p_in && p_in->a1 < b1) p_in = nullptr;
    if (p_out && p_out->a1 < b1) p_out = nullptr;
    if (!p_in) continue;
    // Slivers below kAngleEps come from rounding gaps between adjacent pieces.
    const bool sliver = !p_out && b1 - b0 <= kAngleEps;
    const double mid = 0.5 * (b0 + b1);
    for (double t : {b0, mid, b1}) {
      const double r_out = p_out ? p_out->radius_at(t) : (sliver ? outer.radial(t) : 0.0);
      excess = std::max(excess, p_in->radius_at(t) - r_out);
    }
  }
  return excess;
}

double gamma_clearance(const StarPolygon& p, double scale) {
  const RadialPiece gamma{0.0, kHalfPi, Vec2(scale, 0.0), Vec2(0.0, scale)};
  const std::vector<RadialPiece> g{gamma};
  const auto& pp = p.pieces();
  auto bp = breakpoints(g, pp);
  LayerCursor cp{pp};
  double clearance = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < bp.size() && bp[k] < kHalfPi; ++k) {
    const double b0 = bp[k];
    const double b1 = bp[k + 1];
    const RadialPiece* q = cp.covering(b0);
    if (q && q->a1 < b1) q = nullptr;
    const double mid = 0.5 * (b0 + b1);
    for (double t : {b0, mid, b1}) {
      clearance = std::min(clearance, gamma.radius_at(t) - (q ? q->radius_at(t) : 0.0));
    }
  }
  // (s, 0) is also approached from just below angle 2 pi.
  for (const auto& q : pp) {
    if (q.a1 >= kTwoPi - kAngleEps) clearance = std::min(clearance, scale - q.p1.norm());
  }
  return clearance;
}

bool same_vertices(const StarPolygon& a, const StarPolygon& b, double tol) {
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  if (va.size() != vb.size()) return false;
  for (std::size_t i = 0; i < va.size(); ++i) {
    if ((va[i] - vb[i]).norm() > tol) return false;
  }
  return true;
}

}  // namespace pwlstab
