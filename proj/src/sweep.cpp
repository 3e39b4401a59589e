#include "pwlstab/sweep.hpp"

#include "pwlstab/errors.hpp"
#include "pwlstab/polygon_stability.hpp"
#include "pwlstab/rng.hpp"
#include "pwlstab/sphere_dynamics.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <cmath>
#include <fstream>
#include <ostream>

namespace pwlstab {

void GridSpec::validate() const {
  if (nx < 1 || ny < 1) throw std::invalid_argument("GridSpec: nx, ny >= 1");
  if (!(tau_L_min < tau_L_max) || !(tau_R_min < tau_R_max)) {
    throw std::invalid_argument("GridSpec: ranges must satisfy lo < hi");
  }
  if (!(delta_L > 0.0 && delta_R < 0.0)) {
    throw RegimeError("GridSpec: requires delta_L > 0 > delta_R");
  }
}

double GridSpec::tau_L(int i) const {
  return nx == 1 ? tau_L_min : tau_L_min + (tau_L_max - tau_L_min) * i / (nx - 1);
}

double GridSpec::tau_R(int j) const {
  return ny == 1 ? tau_R_min : tau_R_min + (tau_R_max - tau_R_min) * j / (ny - 1);
}

const char* to_string(SweepMode m) {
  return m == SweepMode::Measure ? "measure" : "asymptotic";
}

std::uint64_t cell_seed(std::uint64_t base_seed, int i, int j) {
  return rng::mix(base_seed, static_cast<std::uint64_t>(i),
                  static_cast<std::uint64_t>(j));
}

namespace {

GridResult make_result(const GridSpec& spec, SweepMode mode) {
  spec.validate();
  GridResult r;
  r.spec = spec;
  r.mode = mode;
  r.value.assign(spec.cells(), 0.0);
  if (mode == SweepMode::Measure) r.undecided.assign(spec.cells(), 0.0);
  return r;
}

void measure_cell(GridResult& r, int i, int j, const OrbitOptions& opt,
                  std::uint64_t base_seed) {
  const std::size_t idx = r.spec.index(i, j);
  try {
    const auto est = serial::rho_sampled(make_normal_form(r.spec.cell(i, j)),
                                         r.samples_per_cell, opt,
                                         cell_seed(base_seed, i, j));
    r.value[idx] = est.rho_hat;
    r.undecided[idx] = est.undecided_fraction;
  } catch (const std::exception&) {
    r.value[idx] = 0.0;
    r.undecided[idx] = 1.0;
  }
}

void asymptotic_cell(GridResult& r, int i, int j, int k_max) {
  const std::size_t idx = r.spec.index(i, j);
  const NormalForm2D p = r.spec.cell(i, j);
  if (!(p.tau_L < 2.0 * std::sqrt(p.delta_L))) {
    r.value[idx] = kOutOfRegime;
    return;
  }
  try {
    const auto v = ga92(p, r.m_max, k_max);
    r.value[idx] = v.status == Ga92Status::Stable ? v.m : kNotStable;
  } catch (const std::exception&) {
    r.value[idx] = kNotStable;
  }
}

OrbitOptions orbit_options(int budget) {
  OrbitOptions opt;
  opt.budget = budget;
  opt.validate();
  return opt;
}

int thread_count(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

}  // namespace

GridResult serial::sweep_measure(const GridSpec& spec, int samples_per_cell,
                                 int orbit_budget, std::uint64_t base_seed) {
  if (samples_per_cell < 1) throw std::invalid_argument("sweep: samples_per_cell >= 1");
  const OrbitOptions opt = orbit_options(orbit_budget);
  GridResult r = make_result(spec, SweepMode::Measure);
  r.samples_per_cell = samples_per_cell;
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) measure_cell(r, i, j, opt, base_seed);
  }
  return r;
}

GridResult sweep_measure(const GridSpec& spec, int samples_per_cell,
                         int orbit_budget, std::uint64_t base_seed, int threads) {
  if (samples_per_cell < 1) throw std::invalid_argument("sweep: samples_per_cell >= 1");
  const OrbitOptions opt = orbit_options(orbit_budget);
  GridResult r = make_result(spec, SweepMode::Measure);
  r.samples_per_cell = samples_per_cell;
  const long n = static_cast<long>(spec.cells());
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count(threads))
  for (long c = 0; c < n; ++c) {
    measure_cell(r, static_cast<int>(c % spec.nx), static_cast<int>(c / spec.nx), opt,
                 base_seed);
  }
  return r;
}

GridResult serial::sweep_asymptotic(const GridSpec& spec, int m_max, int k_max) {
  GridResult r = make_result(spec, SweepMode::Asymptotic);
  r.m_max = m_max;
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) asymptotic_cell(r, i, j, k_max);
  }
  return r;
}

GridResult sweep_asymptotic(const GridSpec& spec, int m_max, int k_max, int threads) {
  GridResult r = make_result(spec, SweepMode::Asymptotic);
  r.m_max = m_max;
  const long n = static_cast<long>(spec.cells());
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count(threads))
  for (long c = 0; c < n; ++c) {
    asymptotic_cell(r, static_cast<int>(c % spec.nx), static_cast<int>(c / spec.nx), k_max);
  }
  return r;
}

// ---------------------------------------------------------------------------

void write_grid_csv(const GridResult& r, std::ostream& out) {
  const bool measure = r.mode == SweepMode::Measure;
  out << (measure ? "tau_L,tau_R,value,undecided\n" : "tau_L,tau_R,value\n");
  for (int j = 0; j < r.spec.ny; ++j) {
    for (int i = 0; i < r.spec.nx; ++i) {
      const std::size_t idx = r.spec.index(i, j);
      if (measure) {
        out << fmt::format("{},{},{},{}\n", r.spec.tau_L(i), r.spec.tau_R(j),
                           r.value[idx], r.undecided[idx]);
      } else {
        out << fmt::format("{},{},{}\n", r.spec.tau_L(i), r.spec.tau_R(j),
                           static_cast<int>(r.value[idx]));
      }
    }
  }
}

namespace {

unsigned char pixel(const GridResult& r, double v) {
  if (r.mode == SweepMode::Measure) {
    return static_cast<unsigned char>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
  }
  const int m = static_cast<int>(v);
  if (m < 1 || r.m_max < 1) return 0;
  return static_cast<unsigned char>(
      std::lround(255.0 * (r.m_max - std::min(m, r.m_max) + 1) / r.m_max));
}

template <typename Write>
void with_file(const std::string& path, Write&& write) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path, "cannot open for writing");
  write(f);
  f.flush();
  if (!f) throw IoError(path, "write failed");
}

}  // namespace

void write_grid_pgm(const GridResult& r, std::ostream& out) {
  out << "P5\n" << r.spec.nx << ' ' << r.spec.ny << "\n255\n";
  std::vector<unsigned char> row(r.spec.nx);
  for (int j = r.spec.ny - 1; j >= 0; --j) {
    for (int i = 0; i < r.spec.nx; ++i) row[i] = pixel(r, r.at(i, j));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
}

void write_grid_csv(const GridResult& r, const std::string& path) {
  with_file(path, [&](std::ostream& f) { write_grid_csv(r, f); });
}

void write_grid_pgm(const GridResult& r, const std::string& path) {
  with_file(path, [&](std::ostream& f) { write_grid_pgm(r, f); });
}

}  // namespace pwlstab
