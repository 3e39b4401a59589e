#include "pwlstab/sphere_dynamics.hpp"

#include "pwlstab/rng.hpp"

#include <algorithm>
#include <string>

namespace pwlstab {

SphereMapEval sphere_eval(const PWLMap& map, const Vector& z) {
  if (z.size() != map.dim()) {
    throw std::invalid_argument("sphere_eval: z has wrong dimension");
  }
  if (std::abs(z.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("sphere_eval: z must be a unit vector");
  }
  Vector w = map(z);
  const double r = w.norm();
  if (!(r >= kZeroImageTol)) {
    throw ZeroImageError("sphere_eval: |g(z)| = " + std::to_string(r) +
                         " (a piece has eigenvalue 0 along z)");
  }
  return {r, w / r};
}

void require_non_invertible(const NormalForm2D& p, const char* who) {
  if (!p.non_invertible()) {
    throw RegimeError(std::string(who) +
                      ": requires delta_L > 0 and delta_R < 0");
  }
}

Vec2 unit_at(double theta) {
  if (theta == kHalfPi) return {0.0, 1.0};
  return {std::cos(theta), std::sin(theta)};
}

namespace {

inline CircleStep step_unchecked(const NormalForm2D& p, double theta) {
  const Vec2 z = unit_at(theta);
  const bool right = theta <= kHalfPi;
  const double t = right ? p.tau_R : p.tau_L;
  const double d = right ? p.delta_R : p.delta_L;
  const double x = t * z.x() + z.y();
  const double y = -d * z.x();
  return {half_turn_angle(x, y), std::hypot(x, y)};
}

}  // namespace

CircleStep circle_step(const NormalForm2D& p, double theta) {
  require_non_invertible(p, "circle_step");
  return step_unchecked(p, theta);
}

double circle_G(const NormalForm2D& p, double theta) {
  return circle_step(p, theta).theta;
}

double circle_D(const NormalForm2D& p, double theta) {
  return circle_step(p, theta).dilation;
}

// ---------------------------------------------------------------------------

namespace {

struct BatchMeans {
  long count;
  int batches;
  std::vector<double> sums;
  std::vector<long> sizes;

  explicit BatchMeans(long n)
      : count(n),
        batches(static_cast<int>(std::min<long>(100, n))),
        sums(batches, 0.0),
        sizes(batches, 0) {}

  void add(long k, double v) {
    const auto b = static_cast<int>((k * batches) / count);
    sums[b] += v;
    ++sizes[b];
  }

  MeasureEstimate finish(long burn_in) const {
    MeasureEstimate e;
    e.n_used = count;
    e.burn_in = burn_in;
    double total = 0.0;
    for (double s : sums) total += s;
    e.lambda_hat = total / static_cast<double>(count);
    if (batches >= 2) {
      double ss = 0.0;
      for (int b = 0; b < batches; ++b) {
        const double m = sums[b] / static_cast<double>(sizes[b]);
        ss += (m - e.lambda_hat) * (m - e.lambda_hat);
      }
      e.std_error = std::sqrt(ss / (batches - 1) / batches);
    }
    return e;
  }
};

template <typename Piece, typename V>
MeasureEstimate birkhoff_kernel(Piece&& piece, V z, long n, long burn_in) {
  BatchMeans acc(n - burn_in);
  for (long i = 0; i < n; ++i) {
    V w = piece(z) * z;
    const double r = w.norm();
    if (!(r >= kZeroImageTol)) {
      throw ZeroImageError("birkhoff_lambda: |g(z)| vanished at step " +
                           std::to_string(i));
    }
    if (i >= burn_in) acc.add(i - burn_in, std::log(r));
    z = w / r;
  }
  return acc.finish(burn_in);
}

}  // namespace

MeasureEstimate birkhoff_lambda(const PWLMap& map, const Vector& z0, long n,
                                long burn_in) {
  if (!(burn_in >= 0 && n > burn_in)) {
    throw std::invalid_argument("birkhoff_lambda: need n > burn_in >= 0");
  }
  if (z0.size() != map.dim() || std::abs(z0.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("birkhoff_lambda: z0 must be a unit vector");
  }
  if (map.dim() == 2) {
    const Mat2 left = map.left();
    const Mat2 right = map.right();
    const Vec2 normal = map.normal();
    return birkhoff_kernel(
        [&](const Vec2& z) -> const Mat2& {
          return normal.dot(z) <= 0.0 ? left : right;
        },
        Vec2(z0), n, burn_in);
  }
  return birkhoff_kernel([&](const Vector& z) -> const Matrix& { return map.piece(z); },
                         z0, n, burn_in);
}

// ---------------------------------------------------------------------------

const char* to_string(Side s) { return s == Side::Left ? "Left" : "Right"; }
const char* to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }
const char* to_string(LeftRegime r) {
  return r == LeftRegime::ComplexRotation ? "ComplexRotation" : "TwoFixedPoints";
}

std::vector<GFixedPoint> g_fixed_points(const NormalForm2D& p) {
  require_non_invertible(p, "g_fixed_points");
  std::vector<GFixedPoint> out;
  const auto scan = [&](const Mat2& m, Side side) {
    const auto pairs = eig2(m);
    for (int k = 0; k < 2; ++k) {
      const auto& e = pairs[k];
      if (!e.is_real() || e.degenerate || !e.angle) continue;
      const double theta = *e.angle;
      const bool matches =
          side == Side::Right ? theta <= kHalfPi : theta >= kHalfPi;
      if (!matches) continue;
      out.push_back({theta, e.value.real(), side,
                     k == 0 ? Branch::Plus : Branch::Minus});
    }
  };
  scan(p.right(), Side::Right);
  scan(p.left(), Side::Left);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.theta_star < b.theta_star;
  });
  return out;
}

std::vector<InvariantRay> invariant_rays(const NormalForm2D& p) {
  std::vector<InvariantRay> out;
  for (const auto& f : g_fixed_points(p)) {
    out.push_back({f.theta_star, f.multiplier, f.side, f.branch});
  }
  return out;
}

RegimeReport classify_regimes(const NormalForm2D& p) {
  require_non_invertible(p, "classify_regimes");
  RegimeReport r;

  const auto left = eig2(p.left());
  r.left_degenerate = left[0].degenerate;
  if (left[0].is_real() && !r.left_degenerate && left[1].value.real() > 0.0) {
    r.left_regime = LeftRegime::TwoFixedPoints;
    r.theta_L_plus = left[0].angle;
    r.theta_L_minus = left[1].angle;
  }

  const auto right = eig2(p.right());
  r.theta_R_plus = *right[0].angle;
  r.lambda_R_plus = right[0].value.real();
  r.right_attracting = p.tau_R > 0.0;

  r.theta_Lambda = step_unchecked(p, 0.0).theta;
  r.lambda_invariant =
      !(p.tau_R < 0.0 && r.left_regime == LeftRegime::TwoFixedPoints &&
        *r.theta_L_minus < r.theta_Lambda && r.theta_Lambda < *r.theta_L_plus);
  r.lambda_globally_attracting =
      !r.left_degenerate && p.tau_L < 2.0 * std::sqrt(p.delta_L);
  return r;
}

// ---------------------------------------------------------------------------

bool in_speckled_region(const NormalForm2D& p) {
  if (!p.non_invertible()) return false;
  const auto left = eig2(p.left());
  if (!left[0].is_real() || left[0].degenerate || !(left[1].value.real() > 0.0)) {
    return false;
  }
  const double lm = left[1].value.real();
  return p.tau_R > -p.delta_R / (lm - p.tau_L);
}

RhoClosedForm rho_closed_form_details(const NormalForm2D& p) {
  if (!in_speckled_region(p)) {
    throw RegimeError(
        "rho_closed_form: requires delta_L > 0 > delta_R, tau_L > 2 sqrt(delta_L) "
        "and tau_R > -delta_R / (lambda^L_- - tau_L)");
  }
  const auto left = eig2(p.left());
  const double lm = left[1].value.real();
  const double theta_lm = *left[1].angle;
  const double e = lm - p.tau_L;

  const double num = p.delta_L - p.delta_R + (p.tau_L - p.tau_R) * e;
  const double den = p.delta_L * p.tau_R + (1.0 - p.delta_R + p.tau_L * p.tau_R) * e;
  if (num == 0.0 && den == 0.0) {
    throw RegimeError("rho_closed_form: sector width undefined (0/0)");
  }
  // psi - theta^L_- lies in (3pi/2 - theta^L_-, 2pi - theta^L_-), an interval
  // inside (pi/2, 3pi/2) of width pi/2, so the branch of atan is fixed.
  const double width = std::atan(num / den) + kPi;
  const double psi = theta_lm + width;

  RhoClosedForm out;
  out.theta_L_minus = theta_lm;
  out.psi = psi;
  out.rho = 1.0 - width / kTwoPi;

  if (!(psi > 1.5 * kPi && psi < kTwoPi)) {
    throw RegimeError("rho_closed_form: psi = " + std::to_string(psi) +
                      " outside (3pi/2, 2pi)");
  }
  // psi is in the fourth quadrant, so the right piece applies.
  const Vec2 w = p.right() * Vec2(std::cos(psi), std::sin(psi));
  if (!(w.y() > 0.0)) {
    throw RegimeError("rho_closed_form: image of psi is not in the upper half-plane");
  }
  out.psi_residual = std::abs(std::atan2(w.y(), w.x()) - theta_lm);
  if (out.psi_residual > kAngleTol) {
    throw RegimeError("rho_closed_form: G(psi) != theta^L_- (residual " +
                      std::to_string(out.psi_residual) + ")");
  }
  return out;
}

double rho_closed_form(const NormalForm2D& p) {
  return rho_closed_form_details(p).rho;
}

// ---------------------------------------------------------------------------

double RhoEstimate::std_error() const {
  if (n_samples <= 0) return 0.0;
  return std::sqrt(rho_hat * (1.0 - rho_hat) / static_cast<double>(n_samples));
}

Vector sample_direction(int dim, std::uint64_t seed, std::uint64_t index) {
  rng::Stream s(rng::mix(seed, index));
  Vector z(dim);
  if (dim == 1) {
    z(0) = s.uniform() < 0.5 ? -1.0 : 1.0;
    return z;
  }
  if (dim == 2) {
    const double a = kTwoPi * s.uniform();
    z << std::cos(a), std::sin(a);
    return z;
  }
  double nn = 0.0;
  do {
    for (int i = 0; i < dim; i += 2) {
      const double r = std::sqrt(-2.0 * std::log(1.0 - s.uniform()));
      const double phi = kTwoPi * s.uniform();
      z(i) = r * std::cos(phi);
      if (i + 1 < dim) z(i + 1) = r * std::sin(phi);
    }
    nn = z.norm();
  } while (nn == 0.0);
  return z / nn;
}

namespace {

void check_rho_args(long n_samples) {
  if (n_samples < 1) throw std::invalid_argument("rho_sampled: n_samples >= 1");
}

RhoEstimate finish(long n, long conv, long undec) {
  RhoEstimate e;
  e.n_samples = n;
  e.converged = conv;
  e.undecided = undec;
  e.rho_hat = static_cast<double>(conv) / static_cast<double>(n);
  e.undecided_fraction = static_cast<double>(undec) / static_cast<double>(n);
  return e;
}

}  // namespace

RhoEstimate serial::rho_sampled(const PWLMap& map, long n_samples,
                                const OrbitOptions& opt, std::uint64_t seed) {
  check_rho_args(n_samples);
  opt.validate();
  long conv = 0;
  long undec = 0;
  for (long k = 0; k < n_samples; ++k) {
    const auto v = orbit(map, sample_direction(map.dim(), seed, k), opt);
    conv += v.status == OrbitStatus::ConvergedToOrigin;
    undec += v.status == OrbitStatus::Undecided;
  }
  return finish(n_samples, conv, undec);
}

RhoEstimate rho_sampled(const PWLMap& map, long n_samples,
                        const OrbitOptions& opt, std::uint64_t seed) {
  check_rho_args(n_samples);
  opt.validate();
  long conv = 0;
  long undec = 0;
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : conv, undec)
  for (long k = 0; k < n_samples; ++k) {
    const auto v = orbit(map, sample_direction(map.dim(), seed, k), opt);
    conv += v.status == OrbitStatus::ConvergedToOrigin;
    undec += v.status == OrbitStatus::Undecided;
  }
  return finish(n_samples, conv, undec);
}

RhoEstimate rho_sampled(const PWLMap& map, long n_samples, int orbit_budget,
                        std::uint64_t seed) {
  OrbitOptions opt;
  opt.budget = orbit_budget;
  return rho_sampled(map, n_samples, opt, seed);
}

// ---------------------------------------------------------------------------

double Histogram::mass() const {
  double m = 0.0;
  for (double d : density) m += d * bin_width();
  return m;
}

int Histogram::bin_of(double theta) const {
  const auto bins = static_cast<int>(counts.size());
  const auto b = static_cast<int>(std::floor((theta - lo) / bin_width()));
  return std::clamp(b, 0, bins - 1);
}

namespace {

void check_hist_args(long n, int bins, long burn_in) {
  if (n < 1 || bins < 1 || burn_in < 0) {
    throw std::invalid_argument("histogram: need n >= 1, bins >= 1, burn_in >= 0");
  }
}

void normalize_density(Histogram& h, long n) {
  h.density.resize(h.counts.size());
  const double scale = 1.0 / (static_cast<double>(n) * h.bin_width());
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    h.density[b] = static_cast<double>(h.counts[b]) * scale;
  }
}

}  // namespace

Histogram histogram_G(const NormalForm2D& p, double theta0, long n, int bins,
                      long burn_in) {
  require_non_invertible(p, "histogram_G");
  check_hist_args(n, bins, burn_in);
  Histogram h;
  h.counts.assign(bins, 0);
  double theta = theta0;
  for (long i = 0; i < burn_in + n; ++i) {
    if (i >= burn_in) ++h.counts[h.bin_of(theta)];
    theta = step_unchecked(p, theta).theta;
  }
  normalize_density(h, n);
  return h;
}

Histogram histogram_directions(const PWLMap& map, double theta0, long n,
                               int bins, long burn_in) {
  if (map.dim() != 2) throw std::invalid_argument("histogram_directions: 2D only");
  check_hist_args(n, bins, burn_in);
  // Track the actual unit vector; only the recorded angle is folded.
  Vector z = unit_at(theta0);
  Histogram h;
  h.counts.assign(bins, 0);
  for (long i = 0; i < burn_in + n; ++i) {
    if (i >= burn_in) ++h.counts[h.bin_of(half_turn_angle(z(0), z(1)))];
    z = sphere_eval(map, z).direction;
  }
  normalize_density(h, n);
  return h;
}

}  // namespace pwlstab
