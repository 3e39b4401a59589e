#include "pwlstab/core_maps.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

using namespace pwlstab;
using testing::uniform;

namespace {

PWLMap scalar_map(double b) {
  return PWLMap(b * Matrix::Identity(2, 2), b * Matrix::Identity(2, 2), Vector::Unit(2, 0));
}

}  // namespace

TEST_CASE("normal form matrices") {
  const PWLMap m = make_normal_form(2.5, 1.4, -0.5, -1.2);
  Matrix L(2, 2), R(2, 2);
  L << 2.5, 1, -1.4, 0;
  R << -0.5, 1, 1.2, 0;
  CHECK(m.left() == L);
  CHECK(m.right() == R);
  CHECK(m.normal() == Vector::Unit(2, 0));

  const PWLMap rot = make_normal_form(0, 1, 0, 1);
  Matrix Q(2, 2);
  Q << 0, 1, -1, 0;
  CHECK(rot.left() == Q);
  CHECK(rot.right() == Q);

  const PWLMap stable_map = make_normal_form(2, 1.4, -0.8, -1.2);
  Matrix R5(2, 2);
  R5 << -0.8, 1, 1.2, 0;
  CHECK(stable_map.right() == R5);

  const auto back = as_normal_form(stable_map);
  REQUIRE(back.has_value());
  CHECK(*back == NormalForm2D{2, 1.4, -0.8, -1.2});
}

TEST_CASE("PWLMap rejects discontinuous pieces") {
  Matrix L = Matrix::Identity(2, 2);
  Matrix R = Matrix::Identity(2, 2);
  R(0, 1) = 0.5;
  CHECK_THROWS_AS(PWLMap(L, R, Vector::Unit(2, 0)), std::invalid_argument);
  CHECK_THROWS_AS(PWLMap(L, L, Vector::Zero(2)), std::invalid_argument);
  CHECK_NOTHROW(PWLMap(L, L, Vector::Unit(2, 1)));
}

TEST_CASE("evaluation") {
  const PWLMap m = make_normal_form(2.5, 1.4, -0.5, -1.2);
  CHECK(m(Vector::Unit(2, 0)) == Vec2(-0.5, 1.2));
  CHECK(m(Vector::Zero(2)) == Vector::Zero(2));
  CHECK(m.left() * Vec2(0, 1) == Vec2(1, 0));
  CHECK(m.right() * Vec2(0, 1) == Vec2(1, 0));
  CHECK(m(Vector(Vec2(0, 1))) == Vec2(1, 0));

  const NormalForm2D p{2.5, 1.4, -0.5, -1.2};
  CHECK(p(Vec2(1, 0)) == Vec2(-0.5, 1.2));
  CHECK(p(Vec2(-1, 2)) == Vec2(-0.5, 1.4));
}

TEST_CASE("linear homogeneity and continuity on random cases") {
  std::mt19937_64 g(11);
  for (int i = 0; i < 10000; ++i) {
    const NormalForm2D p{uniform(g, -3, 3), uniform(g, -2, 2), uniform(g, -3, 3),
                         uniform(g, -2, 2)};
    const PWLMap m = make_normal_form(p);
    const Vector x = Vec2(uniform(g, -5, 5), uniform(g, -5, 5));
    const double a = uniform(g, 0, 10);
    const double err = (m(a * x) - a * m(x)).norm();
    REQUIRE(err <= 1e-12 * (1 + a * x.norm()));

    const Vec2 s(0.0, uniform(g, -5, 5));
    REQUIRE((p.left() * s - p.right() * s).norm() == 0.0);
  }
}

TEST_CASE("range of g is the upper half-plane in the non-invertible regime") {
  std::mt19937_64 g(12);
  for (int i = 0; i < 2000; ++i) {
    const NormalForm2D p = testing::random_regime(g);
    const Vec2 x(uniform(g, -3, 3), uniform(g, -3, 3));
    const Vec2 y = p(x);
    const double d = x.x() <= 0 ? p.delta_L : p.delta_R;
    REQUIRE(y.y() == -d * x.x());
    REQUIRE(y.y() >= 0.0);
  }
}

TEST_CASE("eig2 closed form") {
  Mat2 a;
  a << 2.5, 1, -1.4, 0;
  const auto e = eig2(a);
  CHECK(e[0].is_real());
  CHECK(e[0].value.real() == doctest::Approx(1.25 + std::sqrt(1.5625 - 1.4)).epsilon(1e-14));
  CHECK(e[1].value.real() == doctest::Approx(1.25 - std::sqrt(1.5625 - 1.4)).epsilon(1e-14));
  CHECK(e[0].value.real() == doctest::Approx(1.65311).epsilon(1e-5));
  CHECK(e[1].value.real() == doctest::Approx(0.84689).epsilon(1e-5));
  for (const auto& pr : e) {
    REQUIRE(pr.angle.has_value());
    CHECK(*pr.angle == doctest::Approx(std::atan(pr.value.real() - 2.5) + kPi).epsilon(1e-14));
    CHECK(pr.real_vector() == Vec2(1, pr.value.real() - 2.5));
  }

  Mat2 rot;
  rot << 0, 1, -1, 0;
  const auto r = eig2(rot);
  CHECK(r[0].value == std::complex<double>(0, 1));
  CHECK(r[1].value == std::complex<double>(0, -1));
  CHECK_FALSE(r[0].angle.has_value());
  CHECK_FALSE(r[1].angle.has_value());

  Mat2 right;
  right << -0.5, 1, 1.2, 0;
  const auto er = eig2(right);
  const double lp = -0.25 + std::sqrt(0.0625 + 1.2);
  CHECK(er[0].value.real() == doctest::Approx(lp).epsilon(1e-14));
  CHECK(er[0].value.real() == doctest::Approx(0.87361).epsilon(1e-5));
  REQUIRE(er[0].angle.has_value());
  CHECK(*er[0].angle == doctest::Approx(std::atan(lp + 0.5)).epsilon(1e-14));
  CHECK(*er[0].angle == doctest::Approx(0.94152).epsilon(1e-5));
  CHECK((right * er[0].real_vector() - lp * er[0].real_vector()).norm() < 1e-14);
  CHECK_FALSE(er[1].angle.has_value());
}

TEST_CASE("eig2 agrees with a general eigensolver and has small residuals") {
  std::mt19937_64 g(13);
  for (int i = 0; i < 2000; ++i) {
    Mat2 m;
    m << uniform(g, -3, 3), uniform(g, -3, 3), uniform(g, -3, 3), uniform(g, -3, 3);
    const auto e = eig2(m);
    Eigen::EigenSolver<Mat2> es(m);
    auto ref = es.eigenvalues();
    for (const auto& pr : e) {
      const double best = std::min(std::abs(pr.value - ref[0]), std::abs(pr.value - ref[1]));
      REQUIRE(best < 1e-10 * std::max(1.0, m.norm()));
      if (pr.is_real()) {
        const Vec2 v = pr.real_vector();
        REQUIRE((m * v - pr.value.real() * v).norm() <= 1e-10 * v.norm() * std::max(1.0, m.norm()));
      }
      REQUIRE(pr.angle.has_value() == (pr.is_real() && pr.value.real() > 0));
    }
  }
}

TEST_CASE("eig2 repeated root is flagged degenerate") {
  Mat2 m;
  m << 2.0, 1, -1.0, 0;  // tau^2 = 4 delta
  const auto e = eig2(m);
  CHECK(e[0].degenerate);
  CHECK(e[1].degenerate);
  CHECK(e[0].value == e[1].value);
  CHECK(e[0].value.real() == doctest::Approx(1.0));
  REQUIRE(e[0].angle.has_value());
  CHECK(*e[0].angle == doctest::Approx(std::atan(-1.0) + kPi));
}

TEST_CASE("half_turn_angle conventions") {
  CHECK(half_turn_angle(0.0, 1.0) == kHalfPi);
  CHECK(half_turn_angle(0.0, -1.0) == kHalfPi);
  CHECK(half_turn_angle(1.0, 0.0) == 0.0);
  CHECK(half_turn_angle(-1.0, 0.0) == 0.0);
  CHECK(half_turn_angle(-1.0, -0.0) == 0.0);
  CHECK(half_turn_angle(-1.0, 1.0) == doctest::Approx(0.75 * kPi));
  CHECK(half_turn_angle(1.0, -1.0) == doctest::Approx(0.75 * kPi));
}

TEST_CASE("orbit classification") {
  const Vector x0 = Vec2(0.3, -0.7);
  const auto c = orbit(scalar_map(0.5), x0);
  CHECK(c.status == OrbitStatus::ConvergedToOrigin);
  CHECK(c.log_norm_slope == doctest::Approx(std::log(0.5)).epsilon(1e-10));
  CHECK(c.final_norm < 1e-9 * x0.norm());

  const auto d = orbit(scalar_map(2.0), x0);
  CHECK(d.status == OrbitStatus::Diverged);
  CHECK(d.final_norm > 1e9 * x0.norm());
  CHECK(d.log_norm_slope == doctest::Approx(std::log(2.0)).epsilon(1e-10));

  const auto u = orbit(scalar_map(1.0), x0);
  CHECK(u.status == OrbitStatus::Undecided);
  CHECK(u.steps_used == 10000);

  // theta = 3.0 lies between theta^L_- and the preimage psi of it, a sector
  // whose orbits follow the expanding ray of A_L.
  const NormalForm2D p{2.5, 1.4, -0.5, -1.2};
  const auto v = orbit(p, Vec2(std::cos(3.0), std::sin(3.0)));
  CHECK(v.status == OrbitStatus::Diverged);
  const PWLMap m = make_normal_form(p);
  CHECK(orbit(m, Vector(Vec2(std::cos(3.0), std::sin(3.0)))).status == OrbitStatus::Diverged);

  CHECK(orbit(scalar_map(2.0), Vector::Zero(2)).status == OrbitStatus::ConvergedToOrigin);
}

TEST_CASE("orbit overflow counts as divergence") {
  OrbitOptions opt;
  opt.r_div = 1e300;
  opt.budget = 100000;
  const auto d = orbit(scalar_map(1e10), Vector(Vec2(1, 1)), opt);
  CHECK(d.status == OrbitStatus::Diverged);
}

TEST_CASE("orbit options are validated") {
  OrbitOptions bad;
  bad.budget = 0;
  CHECK_THROWS_AS(orbit(scalar_map(0.5), Vector(Vec2(1, 0)), bad), std::invalid_argument);
  bad = {};
  bad.r_conv = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.r_div = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("general dimension map") {
  Matrix L = 0.5 * Matrix::Identity(3, 3);
  Matrix R = L;
  Vector n = Vector::Unit(3, 2);
  R.col(2) *= 0.2;  // differs only along the normal
  const PWLMap m(L, R, n);
  CHECK(m.dim() == 3);
  const Vector x = (Vector(3) << 1, 1, 1).finished();
  CHECK(m(x).isApprox(Vector((Vector(3) << 0.5, 0.5, 0.1).finished())));
  CHECK(orbit(m, x).status == OrbitStatus::ConvergedToOrigin);
}

TEST_CASE("o(x) perturbations") {
  const PWLMap m = make_normal_form(2.5, 1.4, -0.5, -1.2);
  const auto same = perturbed_map(m, 0.0, 0.5);
  std::mt19937_64 g(14);
  for (int i = 0; i < 100; ++i) {
    const Vector x = Vec2(uniform(g, -2, 2), uniform(g, -2, 2));
    REQUIRE(same(x) == m(x));
  }
  CHECK_THROWS_AS(perturbed_map(m, 0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(perturbed_map(m, 0.1, -0.5), std::invalid_argument);

  const auto f = perturbed_map(m, 0.1, 0.5);
  const Vector x = Vec2(3, 4);
  CHECK((f(x) - m(x) - 0.1 * std::pow(5.0, 1.5) * Vector::Unit(2, 0)).norm() < 1e-12);

  const auto h = perturbed_map(scalar_map(0.5), 0.1, 0.5);
  const auto v = orbit_with(h, Vector(Vec2(0.01, 0)), OrbitOptions{});
  CHECK(v.status == OrbitStatus::ConvergedToOrigin);
}
