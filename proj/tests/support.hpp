#pragma once

#include "pwlstab/core_maps.hpp"
#include "pwlstab/star_polygon.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testing {

using pwlstab::NormalForm2D;

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// Random parameters with delta_L > 0 > delta_R.
inline NormalForm2D random_regime(std::mt19937_64& g) {
  return {uniform(g, -3.0, 3.5), uniform(g, 0.05, 2.0), uniform(g, -3.0, 3.0),
          uniform(g, -2.0, -0.05)};
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

/// Star polygon around the origin: n vertices at sorted random angles with
/// radii in [0.3, 1.3], consecutive angular gaps below 0.9 pi.
inline pwlstab::StarPolygon random_star(std::mt19937_64& g, int n) {
  using pwlstab::kPi;
  for (;;) {
    std::vector<double> a(n);
    for (auto& x : a) x = uniform(g, 0.0, 2 * kPi);
    std::sort(a.begin(), a.end());
    bool ok = true;
    std::vector<pwlstab::Vec2> v;
    for (int i = 0; i < n; ++i) {
      const double next = i + 1 < n ? a[i + 1] : a[0] + 2 * kPi;
      ok = ok && next - a[i] < 0.9 * kPi;
      const double r = uniform(g, 0.3, 1.3);
      v.emplace_back(r * std::cos(a[i]), r * std::sin(a[i]));
    }
    if (ok) return pwlstab::StarPolygon(v);
  }
}

}  // namespace testing
