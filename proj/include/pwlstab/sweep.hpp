#pragma once

// Parameter-plane sweeps over (tau_L, tau_R) at fixed (delta_L, delta_R).
// Cells are independent; every random draw is seeded from the cell index, so
// results do not depend on the number of threads. The serial:: versions are
// the reference the parallel kernels are tested against.

#include "pwlstab/core_maps.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pwlstab {

struct GridSpec {
  double tau_L_min = 0.0;
  double tau_L_max = 3.5;
  double tau_R_min = -2.0;
  double tau_R_max = 1.0;
  int nx = 128;
  int ny = 64;
  double delta_L = 1.4;
  double delta_R = -1.2;

  void validate() const;
  /// Grid nodes include both ends of each range.
  double tau_L(int i) const;
  double tau_R(int j) const;
  NormalForm2D cell(int i, int j) const {
    return {tau_L(i), delta_L, tau_R(j), delta_R};
  }
  std::size_t cells() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * nx + i;
  }
};

enum class SweepMode { Measure, Asymptotic };

const char* to_string(SweepMode m);

/// Asymptotic-mode cell values besides the smallest stable m.
inline constexpr int kNotStable = -1;
inline constexpr int kOutOfRegime = -2;

struct GridResult {
  GridSpec spec;
  SweepMode mode = SweepMode::Measure;
  int m_max = 0;
  /// Row-major from (tau_L_min, tau_R_min). Measure: converged fraction.
  /// Asymptotic: smallest stable m, kNotStable or kOutOfRegime.
  std::vector<double> value;
  /// Measure only: fraction of samples neither converged nor diverged.
  std::vector<double> undecided;
  int samples_per_cell = 0;

  double at(int i, int j) const { return value[spec.index(i, j)]; }
};

/// Seed used for cell (i, j).
std::uint64_t cell_seed(std::uint64_t base_seed, int i, int j);

/// threads <= 0 uses the OpenMP default.
GridResult sweep_measure(const GridSpec& spec, int samples_per_cell,
                         int orbit_budget, std::uint64_t base_seed,
                         int threads = 0);
GridResult sweep_asymptotic(const GridSpec& spec, int m_max, int k_max,
                            int threads = 0);

namespace serial {
GridResult sweep_measure(const GridSpec& spec, int samples_per_cell,
                         int orbit_budget, std::uint64_t base_seed);
GridResult sweep_asymptotic(const GridSpec& spec, int m_max, int k_max);
}  // namespace serial

/// Header `tau_L,tau_R,value` (plus `,undecided` in Measure mode).
void write_grid_csv(const GridResult& result, std::ostream& out);
void write_grid_csv(const GridResult& result, const std::string& path);

/// Binary P5, 8-bit, top row = tau_R_max. Measure: round(255 * fraction).
/// Asymptotic: m = 1 -> 255 falling linearly to round(255 / m_max) at m_max;
/// kNotStable and kOutOfRegime -> 0.
void write_grid_pgm(const GridResult& result, std::ostream& out);
void write_grid_pgm(const GridResult& result, const std::string& path);

}  // namespace pwlstab
