#include "pwlstab/errors.hpp"
#include "pwlstab/polygon_stability.hpp"
#include "pwlstab/sphere_dynamics.hpp"
#include "pwlstab/sweep.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace pwlstab;

namespace {

GridSpec small_grid() {
  GridSpec s;
  s.tau_L_min = 2.0;
  s.tau_L_max = 2.5;
  s.tau_R_min = -0.8;
  s.tau_R_max = -0.5;
  s.nx = 2;
  s.ny = 2;
  return s;
}

GridSpec coarse_plane(int nx, int ny) {
  GridSpec s;
  s.nx = nx;
  s.ny = ny;
  return s;
}

std::string csv(const GridResult& r) {
  std::ostringstream os;
  write_grid_csv(r, os);
  return os.str();
}

std::string pgm(const GridResult& r) {
  std::ostringstream os;
  write_grid_pgm(r, os);
  return os.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("grid geometry") {
  const GridSpec s = small_grid();
  CHECK(s.tau_L(0) == 2.0);
  CHECK(s.tau_L(1) == 2.5);
  CHECK(s.tau_R(1) == -0.5);
  CHECK(s.cells() == 4);
  CHECK(s.index(1, 1) == 3);
  CHECK(s.cell(1, 0) == NormalForm2D{2.5, 1.4, -0.8, -1.2});

  const GridSpec d;
  CHECK(d.tau_L(d.nx - 1) == doctest::Approx(3.5));
  CHECK(d.tau_R(d.ny - 1) == doctest::Approx(1.0));

  GridSpec bad = s;
  bad.nx = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.tau_L_max = bad.tau_L_min;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.delta_R = 0.5;
  CHECK_THROWS_AS(bad.validate(), RegimeError);
  CHECK_THROWS(sweep_measure(s, 0, 100, 1));
}

TEST_CASE("measure cells") {
  const GridSpec s = small_grid();
  const GridResult r = sweep_measure(s, 200, 10000, 1);
  CHECK(r.mode == SweepMode::Measure);
  CHECK(r.samples_per_cell == 200);
  REQUIRE(r.value.size() == 4);
  REQUIRE(r.undecided.size() == 4);
  // (2.5, -0.5): speckled, rho near the closed form.
  const double rho = rho_closed_form(s.cell(1, 1));
  const double sigma = std::sqrt(rho * (1 - rho) / 200);
  CHECK(std::abs(r.at(1, 1) - rho) <= 3 * sigma);
  // (2, -0.8): asymptotically stable.
  CHECK(r.at(0, 0) == 1.0);

  // A cell is exactly one rho_sampled call with its cell seed.
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      OrbitOptions orbit;
      orbit.budget = 10000;
      const auto e = serial::rho_sampled(make_normal_form(s.cell(i, j)), 200, orbit,
                                         cell_seed(1, i, j));
      CHECK(r.at(i, j) == e.rho_hat);
      CHECK(r.undecided[s.index(i, j)] == e.undecided_fraction);
    }
  }
  CHECK(cell_seed(1, 0, 1) != cell_seed(1, 1, 0));
}

TEST_CASE("asymptotic cells") {
  const GridSpec s = coarse_plane(12, 6);
  const GridResult r = sweep_asymptotic(s, 30, 60);
  CHECK(r.mode == SweepMode::Asymptotic);
  CHECK(r.m_max == 30);
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      const NormalForm2D p = s.cell(i, j);
      const double v = r.at(i, j);
      if (!(p.tau_L < 2 * std::sqrt(p.delta_L))) {
        CHECK(v == kOutOfRegime);
        continue;
      }
      const auto verdict = ga92(p, 30, 60);
      if (verdict.status == Ga92Status::Stable) {
        CHECK(v == verdict.m);
        CHECK(v >= 1);
        CHECK(v <= 30);
      } else {
        CHECK(v == kNotStable);
      }
    }
  }
}

TEST_CASE("parallel kernels match serial and ignore the thread count") {
  const GridSpec s = coarse_plane(8, 5);
  const GridResult ref = serial::sweep_measure(s, 50, 2000, 9);
  for (int t : {1, 2, 3, 0}) {
    const GridResult r = sweep_measure(s, 50, 2000, 9, t);
    CHECK(r.value == ref.value);
    CHECK(r.undecided == ref.undecided);
    CHECK(csv(r) == csv(ref));
  }
  const GridResult aref = serial::sweep_asymptotic(s, 20, 40);
  for (int t : {1, 3}) {
    const GridResult r = sweep_asymptotic(s, 20, 40, t);
    CHECK(r.value == aref.value);
    CHECK(pgm(r) == pgm(aref));
  }
}

TEST_CASE("CSV format") {
  const GridResult r = sweep_measure(small_grid(), 20, 1000, 3);
  const std::string s = csv(r);
  CHECK(s.rfind("tau_L,tau_R,value,undecided\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
  std::istringstream in(s);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line.rfind("2,-0.8,", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("2.5,-0.8,", 0) == 0);

  const GridResult a = sweep_asymptotic(small_grid(), 30, 60);
  const std::string sa = csv(a);
  CHECK(sa.rfind("tau_L,tau_R,value\n", 0) == 0);
  // tau_L = 2.5 > 2 sqrt(1.4) is outside the polygon test's regime.
  CHECK(sa.find("2.5,-0.8,-2\n") != std::string::npos);
  CHECK(sa.find("2,-0.8,2\n") != std::string::npos);
}

TEST_CASE("PGM format") {
  GridResult r;
  r.spec = small_grid();
  r.mode = SweepMode::Measure;
  r.value = {0.0, 1.0, 0.5, 0.25};
  r.undecided = {0, 0, 0, 0};
  const std::string s = pgm(r);
  const std::string header = "P5\n2 2\n255\n";
  REQUIRE(s.size() == header.size() + 4);
  CHECK(s.substr(0, header.size()) == header);
  // Top row is tau_R max, i.e. j = 1.
  const auto px = [&](std::size_t k) { return static_cast<unsigned char>(s[header.size() + k]); };
  CHECK(px(0) == 128);
  CHECK(px(1) == 64);
  CHECK(px(2) == 0);
  CHECK(px(3) == 255);

  r.mode = SweepMode::Asymptotic;
  r.m_max = 30;
  r.value = {1, 30, kNotStable, kOutOfRegime};
  const std::string sa = pgm(r);
  CHECK(static_cast<unsigned char>(sa[header.size() + 0]) == 0);
  CHECK(static_cast<unsigned char>(sa[header.size() + 1]) == 0);
  CHECK(static_cast<unsigned char>(sa[header.size() + 2]) == 255);
  CHECK(static_cast<unsigned char>(sa[header.size() + 3]) == 9);
}

TEST_CASE("file output is byte-identical across runs") {
  const auto dir = std::filesystem::temp_directory_path() / "pwlstab_test_sweep";
  std::filesystem::create_directories(dir);
  const GridSpec s = coarse_plane(6, 4);
  for (int run = 0; run < 2; ++run) {
    const GridResult r = sweep_measure(s, 40, 2000, 5, run + 1);
    write_grid_csv(r, (dir / ("m" + std::to_string(run) + ".csv")).string());
    write_grid_pgm(r, (dir / ("m" + std::to_string(run) + ".pgm")).string());
  }
  CHECK(slurp(dir / "m0.csv") == slurp(dir / "m1.csv"));
  CHECK(slurp(dir / "m0.pgm") == slurp(dir / "m1.pgm"));
  CHECK(!slurp(dir / "m0.csv").empty());
  std::filesystem::remove_all(dir);

  const GridResult r = sweep_measure(small_grid(), 5, 100, 1);
  CHECK_THROWS_AS(write_grid_csv(r, "/nonexistent/dir/g.csv"), IoError);
  CHECK_THROWS_AS(write_grid_pgm(r, "/nonexistent/dir/g.pgm"), IoError);
}
