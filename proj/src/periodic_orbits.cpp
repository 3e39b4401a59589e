#include "pwlstab/sphere_dynamics.hpp"

#include <algorithm>
#include <array>

namespace pwlstab {

namespace {

struct Iterate {
  double theta;
  double log_dilation_sum;
};

Iterate iterate(const NormalForm2D& p, double theta, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto st = circle_step(p, theta);
    s += std::log(st.dilation);
    theta = st.theta;
  }
  return {theta, s};
}

/// Solutions of G(theta) = target in [0, pi), one per monotone branch.
/// G(z) = target needs A_J z to be a positive multiple of the target
/// direction, with z on the half-plane where A_J applies.
void preimages(const NormalForm2D& p, double target, std::vector<double>& out) {
  const Vec2 w = unit_at(target);
  const Mat2 pieces[2] = {p.right(), p.left()};
  for (int j = 0; j < 2; ++j) {
    const Vec2 z = pieces[j].inverse() * w;
    if (z.y() < 0.0) continue;
    const bool right = j == 0;
    if (right ? z.x() < 0.0 : z.x() > 0.0) continue;
    const double theta = half_turn_angle(z);
    if (z.y() == 0.0 && z.x() < 0.0) continue;  // theta = pi is excluded
    if (right ? theta <= kHalfPi : theta >= kHalfPi) out.push_back(theta);
  }
}

double circle_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, kPi - d);
}

Mat2 itinerary_product(const NormalForm2D& p, const std::vector<double>& angles) {
  Mat2 m = Mat2::Identity();
  for (double t : angles) m = (t <= kHalfPi ? p.right() : p.left()) * m;
  return m;
}

void cross_validate(const NormalForm2D& p, PeriodicOrbit& orb) {
  const Mat2 m = itinerary_product(p, orb.angles);
  // c I with c > 0: every direction is an eigenvector (continuum of orbits).
  const double c = 0.5 * m.trace();
  if (c > 0.0 && (m - c * Mat2::Identity()).norm() <= 1e-12 * c) {
    orb.product_eigenvalue = c;
    orb.validated = std::abs(std::log(c) / orb.period - orb.lambda_value) < 1e-8;
    return;
  }
  for (const auto& e : eig2(m)) {
    if (!e.is_real() || !e.angle || e.value.real() <= 0.0) continue;
    if (circle_distance(*e.angle, orb.angles.front()) > 1e-6) continue;
    orb.product_eigenvalue = e.value.real();
    orb.validated =
        std::abs(std::log(orb.product_eigenvalue) / orb.period - orb.lambda_value) <
        1e-8;
    if (orb.validated) return;
  }
}

}  // namespace

std::vector<double> monotone_breakpoints(const NormalForm2D& p, int period) {
  require_non_invertible(p, "monotone_breakpoints");
  std::vector<double> all;
  std::vector<double> level{kHalfPi};
  for (int j = 0; j < period; ++j) {
    all.insert(all.end(), level.begin(), level.end());
    if (j + 1 == period) break;
    std::vector<double> next;
    for (double t : level) preimages(p, t, next);
    level = std::move(next);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end(),
                        [](double a, double b) { return b - a < kBisectionTol; }),
            all.end());
  return all;
}

std::vector<PeriodicOrbit> periodic_orbits_G(const NormalForm2D& p, int p_max) {
  require_non_invertible(p, "periodic_orbits_G");
  if (p_max < 1) throw std::invalid_argument("periodic_orbits_G: p_max >= 1");

  constexpr int kSamplesPerCell = 16;
  std::vector<PeriodicOrbit> found;

  for (int period = 1; period <= p_max; ++period) {
    std::vector<double> cuts{0.0};
    for (double b : monotone_breakpoints(p, period)) {
      if (b > cuts.back()) cuts.push_back(b);
    }
    if (cuts.back() < kPi) cuts.push_back(kPi);

    const auto h = [&](double t) { return iterate(p, t, period).theta - t; };

    std::vector<double> roots;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = cuts[c];
      const double b = cuts[c + 1];
      double x0 = a;
      double h0 = h(a);
      if (h0 == 0.0) roots.push_back(a);
      for (int s = 1; s <= kSamplesPerCell; ++s) {
        // The right end of [0, pi) is open.
        const double x1 = s == kSamplesPerCell && b == kPi
                              ? std::nextafter(kPi, 0.0)
                              : a + (b - a) * s / kSamplesPerCell;
        const double h1 = h(x1);
        if (h1 == 0.0) {
          roots.push_back(x1);
        } else if (h0 != 0.0 && (h0 < 0.0) != (h1 < 0.0)) {
          double lo = x0;
          double hi = x1;
          double hlo = h0;
          while (hi - lo > kBisectionTol) {
            const double mid = 0.5 * (lo + hi);
            const double hm = h(mid);
            if (hm == 0.0) {
              lo = hi = mid;
              break;
            }
            if ((hm < 0.0) == (hlo < 0.0)) {
              lo = mid;
              hlo = hm;
            } else {
              hi = mid;
            }
          }
          roots.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        h0 = h1;
      }
    }

    for (double root : roots) {
      if (std::abs(h(root)) > 1e-7) continue;  // sign change without a root
      bool lower = false;
      for (int q = 1; q < period && !lower; ++q) {
        if (period % q == 0 &&
            circle_distance(iterate(p, root, q).theta, root) < 1e-8) {
          lower = true;
        }
      }
      if (lower) continue;

      PeriodicOrbit orb;
      orb.period = period;
      double t = root;
      double sum = 0.0;
      for (int i = 0; i < period; ++i) {
        orb.angles.push_back(t);
        const auto st = circle_step(p, t);
        sum += std::log(st.dilation);
        t = st.theta;
      }
      orb.lambda_value = sum / period;
      std::rotate(orb.angles.begin(),
                  std::min_element(orb.angles.begin(), orb.angles.end()),
                  orb.angles.end());

      const bool duplicate = std::any_of(found.begin(), found.end(), [&](const auto& o) {
        return o.period == period &&
               circle_distance(o.angles.front(), orb.angles.front()) < 1e-8;
      });
      if (duplicate) continue;
      cross_validate(p, orb);
      found.push_back(std::move(orb));
    }
  }

  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return a.period != b.period ? a.period < b.period
                                : a.angles.front() < b.angles.front();
  });
  return found;
}

}  // namespace pwlstab
