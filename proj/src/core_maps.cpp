#include "pwlstab/core_maps.hpp"

#include <algorithm>
#include <string>

namespace pwlstab {

PWLMap::PWLMap(Matrix left, Matrix right, Vector normal, double continuity_tol)
    : left_(std::move(left)), right_(std::move(right)), normal_(std::move(normal)) {
  const auto d = normal_.size();
  if (d < 1) throw std::invalid_argument("PWLMap: dimension must be positive");
  if (left_.rows() != d || left_.cols() != d || right_.rows() != d ||
      right_.cols() != d) {
    throw std::invalid_argument("PWLMap: matrices must be " +
                                std::to_string(d) + "x" + std::to_string(d));
  }
  if (!left_.allFinite() || !right_.allFinite() || !normal_.allFinite()) {
    throw std::invalid_argument("PWLMap: non-finite entries");
  }
  const double nn = normal_.squaredNorm();
  if (nn == 0.0) throw std::invalid_argument("PWLMap: normal must be nonzero");

  // (A_L - A_R) restricted to the plane normal.x = 0 must vanish.
  const Matrix proj = Matrix::Identity(d, d) - normal_ * normal_.transpose() / nn;
  const double residual = ((left_ - right_) * proj).norm();
  const double scale = std::max(1.0, left_.norm() + right_.norm());
  if (residual > continuity_tol * scale) {
    throw std::invalid_argument(
        "PWLMap: pieces disagree on the switching plane (residual " +
        std::to_string(residual) + ")");
  }
}

Vector PWLMap::operator()(const Vector& x) const { return piece(x) * x; }

PWLMap make_normal_form(double tau_L, double delta_L, double tau_R,
                        double delta_R) {
  return make_normal_form(NormalForm2D{tau_L, delta_L, tau_R, delta_R});
}

PWLMap make_normal_form(const NormalForm2D& p) {
  Matrix left = p.left();
  Matrix right = p.right();
  Vector normal(2);
  normal << 1.0, 0.0;
  return {std::move(left), std::move(right), std::move(normal), 0.0};
}

std::optional<NormalForm2D> as_normal_form(const PWLMap& map) {
  if (map.dim() != 2) return std::nullopt;
  const auto& l = map.left();
  const auto& r = map.right();
  const auto& n = map.normal();
  if (!(n(0) > 0.0 && n(1) == 0.0)) return std::nullopt;
  if (l(0, 1) != 1.0 || l(1, 1) != 0.0 || r(0, 1) != 1.0 || r(1, 1) != 0.0) {
    return std::nullopt;
  }
  return NormalForm2D{l(0, 0), -l(1, 0), r(0, 0), -r(1, 0)};
}

// ---------------------------------------------------------------------------

double half_turn_angle(double x, double y) {
  if (x == 0.0) return y == 0.0 ? 0.0 : kHalfPi;
  double a = std::atan2(y, x);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a == 0.0 ? 0.0 : a;  // folds -0.0
}

namespace {

std::array<std::complex<double>, 2> eigenvector(const Mat2& m,
                                                std::complex<double> lambda,
                                                int which) {
  using C = std::complex<double>;
  if (m(0, 1) != 0.0) return {C(m(0, 1)), lambda - m(0, 0)};
  if (m(1, 0) != 0.0) return {lambda - m(1, 1), C(m(1, 0))};
  // Diagonal: pick the matching axis; a scalar matrix gets e1 then e2.
  if (m(0, 0) == m(1, 1)) return which == 0 ? std::array{C(1), C(0)}
                                            : std::array{C(0), C(1)};
  return lambda.real() == m(0, 0) ? std::array{C(1), C(0)}
                                  : std::array{C(0), C(1)};
}

}  // namespace

std::array<EigenPair2, 2> eig2(const Mat2& m) {
  const double tau = m.trace();
  const double delta = m.determinant();
  double disc = tau * tau / 4.0 - delta;
  const bool degenerate =
      std::abs(disc) <= 1e-14 * (tau * tau / 4.0 + std::abs(delta));
  if (degenerate) disc = 0.0;

  std::array<EigenPair2, 2> out;
  if (disc >= 0.0) {
    // Avoid cancellation: compute the larger-magnitude root first.
    const double s = std::sqrt(disc);
    double hi = 0.0;
    double lo = 0.0;
    if (tau >= 0.0) {
      hi = tau / 2.0 + s;
      lo = hi != 0.0 ? delta / hi : tau / 2.0 - s;
    } else {
      lo = tau / 2.0 - s;
      hi = lo != 0.0 ? delta / lo : tau / 2.0 + s;
    }
    if (degenerate) hi = lo = tau / 2.0;
    const double values[2] = {hi, lo};
    for (int k = 0; k < 2; ++k) {
      auto& e = out[k];
      e.value = values[k];
      e.vector = eigenvector(m, values[k], k);
      e.degenerate = degenerate;
      if (values[k] > 0.0) e.angle = half_turn_angle(e.real_vector());
    }
  } else {
    const double im = std::sqrt(-disc);
    const std::complex<double> values[2] = {{tau / 2.0, im}, {tau / 2.0, -im}};
    for (int k = 0; k < 2; ++k) {
      out[k].value = values[k];
      out[k].vector = eigenvector(m, values[k], k);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(OrbitStatus s) {
  switch (s) {
    case OrbitStatus::ConvergedToOrigin:
      return "ConvergedToOrigin";
    case OrbitStatus::Diverged:
      return "Diverged";
    case OrbitStatus::Undecided:
      return "Undecided";
  }
  return "?";
}

void OrbitOptions::validate() const {
  if (budget < 1) throw std::invalid_argument("orbit: budget must be >= 1");
  if (!(r_conv > 0.0 && r_conv < 1.0 && r_div > 1.0)) {
    throw std::invalid_argument("orbit: need 0 < r_conv < 1 < r_div");
  }
}

OrbitVerdict orbit(const PWLMap& map, const Vector& x0, const OrbitOptions& opt) {
  if (x0.size() != map.dim()) {
    throw std::invalid_argument("orbit: x0 has wrong dimension");
  }
  if (map.dim() == 2) {
    const Mat2 left = map.left();
    const Mat2 right = map.right();
    const Vec2 n = map.normal();
    return orbit_with(
        [&](const Vec2& x) -> Vec2 {
          return n.dot(x) <= 0.0 ? Vec2(left * x) : Vec2(right * x);
        },
        Vec2(x0), opt);
  }
  return orbit_with([&](const Vector& x) { return map(x); }, x0, opt);
}

OrbitVerdict orbit(const NormalForm2D& params, const Vec2& x0,
                   const OrbitOptions& opt) {
  return orbit_with(params, x0, opt);
}

// ---------------------------------------------------------------------------

PerturbedMap::PerturbedMap(PWLMap map, double c, double gamma)
    : PerturbedMap(map, c, gamma, Vector::Unit(map.dim(), 0)) {}

PerturbedMap::PerturbedMap(PWLMap map, double c, double gamma, Vector direction)
    : map_(std::move(map)), c_(c), gamma_(gamma), u_(std::move(direction)) {
  if (!(gamma_ > 0.0)) {
    throw std::invalid_argument(
        "perturbed_map: gamma must be > 0 for the term to be o(|x|)");
  }
  if (u_.size() != map_.dim() || u_.norm() == 0.0) {
    throw std::invalid_argument("perturbed_map: bad direction");
  }
  u_.normalize();
}

Vector PerturbedMap::operator()(const Vector& x) const {
  Vector y = map_(x);
  if (c_ != 0.0) y += c_ * std::pow(x.norm(), 1.0 + gamma_) * u_;
  return y;
}

PerturbedMap perturbed_map(const PWLMap& map, double c, double gamma) {
  return {map, c, gamma};
}

}  // namespace pwlstab
