#pragma once

// Piecewise-linear continuous maps with one switching hyperplane, the 2D
// border-collision normal form, closed-form 2x2 eigenanalysis and orbit
// classification.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace pwlstab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHalfPi = kPi / 2;
inline constexpr double kTwoPi = 2 * kPi;

/// Relative tolerance for the continuity test on user-supplied matrices.
inline constexpr double kContinuityTol = 1e-12;

/// g(x) = A_left x when normal.x <= 0, A_right x otherwise.
///
/// The two matrices must agree on the switching plane normal.x = 0, i.e.
/// A_left - A_right = C normal^T for some C. The constructor checks this by
/// projecting the difference onto the plane.
class PWLMap {
 public:
  PWLMap(Matrix left, Matrix right, Vector normal,
         double continuity_tol = kContinuityTol);

  int dim() const { return static_cast<int>(normal_.size()); }
  const Matrix& left() const { return left_; }
  const Matrix& right() const { return right_; }
  const Vector& normal() const { return normal_; }

  bool on_left(const Vector& x) const { return normal_.dot(x) <= 0.0; }
  const Matrix& piece(const Vector& x) const {
    return on_left(x) ? left_ : right_;
  }

  Vector operator()(const Vector& x) const;

 private:
  Matrix left_;
  Matrix right_;
  Vector normal_;
};

/// Trace/determinant parameters of the 2D normal form
///   g(x, y) = [[tau_J, 1], [-delta_J, 0]] (x, y),  J = L for x <= 0, R for x >= 0.
struct NormalForm2D {
  double tau_L = 0.0;
  double delta_L = 0.0;
  double tau_R = 0.0;
  double delta_R = 0.0;

  Mat2 left() const {
    Mat2 m;
    m << tau_L, 1.0, -delta_L, 0.0;
    return m;
  }
  Mat2 right() const {
    Mat2 m;
    m << tau_R, 1.0, -delta_R, 0.0;
    return m;
  }
  /// delta_L > 0 > delta_R: the range of g is the closed upper half-plane.
  bool non_invertible() const { return delta_L > 0.0 && delta_R < 0.0; }
  /// tau_L < 2 sqrt(delta_L): A_L has complex eigenvalues.
  bool left_complex() const {
    return delta_L > 0.0 && tau_L < 2.0 * std::sqrt(delta_L);
  }

  Vec2 operator()(const Vec2& x) const {
    const double t = x.x() <= 0.0 ? tau_L : tau_R;
    const double d = x.x() <= 0.0 ? delta_L : delta_R;
    return {t * x.x() + x.y(), -d * x.x()};
  }

  friend bool operator==(const NormalForm2D&, const NormalForm2D&) = default;
};

PWLMap make_normal_form(double tau_L, double delta_L, double tau_R,
                        double delta_R);
PWLMap make_normal_form(const NormalForm2D& params);

/// Returns the normal form parameters if `map` is exactly a 2D companion pair
/// with normal (1, 0).
std::optional<NormalForm2D> as_normal_form(const PWLMap& map);

// ---------------------------------------------------------------------------
// Eigenanalysis

struct EigenPair2 {
  std::complex<double> value;
  std::array<std::complex<double>, 2> vector;
  /// Polar angle of the eigenvector in [0, pi); set only for real lambda > 0.
  std::optional<double> angle;
  bool degenerate = false;

  bool is_real() const { return value.imag() == 0.0; }
  Vec2 real_vector() const { return {vector[0].real(), vector[1].real()}; }
};

/// Both eigenpairs of M from its trace and determinant, larger real part
/// (or positive imaginary part) first. For a companion matrix the vectors are
/// (1, lambda - tau).
std::array<EigenPair2, 2> eig2(const Mat2& m);

/// Angle of (x, y) in [0, pi). Directions in the lower half-plane are
/// identified with their negatives; (0, y) gives pi/2.
double half_turn_angle(double x, double y);
inline double half_turn_angle(const Vec2& v) {
  return half_turn_angle(v.x(), v.y());
}

// ---------------------------------------------------------------------------
// Orbits

enum class OrbitStatus { ConvergedToOrigin, Diverged, Undecided };

const char* to_string(OrbitStatus s);

struct OrbitOptions {
  int budget = 10000;
  double r_conv = 1e-9;
  double r_div = 1e9;

  void validate() const;
};

struct OrbitVerdict {
  OrbitStatus status = OrbitStatus::Undecided;
  int steps_used = 0;
  double final_norm = 0.0;
  /// Least-squares slope of ln|x_n| against n over the computed iterates.
  double log_norm_slope = 0.0;
};

namespace detail {

struct SlopeAccumulator {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  void add(double x, double y) {
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double slope() const {
    const double den = n * sxx - sx * sx;
    return den > 0 ? (n * sxy - sx * sy) / den : 0.0;
  }
};

}  // namespace detail

/// Iterates any map x -> step(x) and classifies the orbit relative to |x0|.
template <typename Step, typename Vec>
OrbitVerdict orbit_with(Step&& step, Vec x, const OrbitOptions& opt) {
  opt.validate();
  OrbitVerdict v;
  const double n0 = x.norm();
  v.final_norm = n0;
  if (n0 == 0.0) {
    v.status = OrbitStatus::ConvergedToOrigin;
    return v;
  }
  const double lo = opt.r_conv * n0;
  const double hi = opt.r_div * n0;
  detail::SlopeAccumulator acc;
  acc.add(0.0, std::log(n0));
  for (int i = 1; i <= opt.budget; ++i) {
    x = step(x);
    const double r = x.norm();
    v.steps_used = i;
    v.final_norm = r;
    if (!std::isfinite(r) || r > hi) {
      v.status = OrbitStatus::Diverged;
      if (std::isfinite(r)) acc.add(i, std::log(r));
      v.log_norm_slope = acc.slope();
      return v;
    }
    if (r < lo) {
      v.status = OrbitStatus::ConvergedToOrigin;
      if (r > 0) acc.add(i, std::log(r));
      v.log_norm_slope = acc.slope();
      return v;
    }
    acc.add(i, std::log(r));
  }
  v.status = OrbitStatus::Undecided;
  v.log_norm_slope = acc.slope();
  return v;
}

OrbitVerdict orbit(const PWLMap& map, const Vector& x0,
                   const OrbitOptions& opt = {});
OrbitVerdict orbit(const NormalForm2D& params, const Vec2& x0,
                   const OrbitOptions& opt = {});

// ---------------------------------------------------------------------------
// o(x) perturbations

/// x -> g(x) + c |x|^(1 + gamma) u with a fixed unit vector u (e_1 by default).
class PerturbedMap {
 public:
  PerturbedMap(PWLMap map, double c, double gamma);
  PerturbedMap(PWLMap map, double c, double gamma, Vector direction);

  Vector operator()(const Vector& x) const;

  const PWLMap& base() const { return map_; }
  double c() const { return c_; }
  double gamma() const { return gamma_; }

 private:
  PWLMap map_;
  double c_;
  double gamma_;
  Vector u_;
};

PerturbedMap perturbed_map(const PWLMap& map, double c, double gamma);

}  // namespace pwlstab
