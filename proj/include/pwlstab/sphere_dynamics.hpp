#pragma once

// Dynamics of g restricted to directions: the dilation D(z) = |g(z)| and the
// direction map G(z) = g(z) / |g(z)| on the unit sphere, their closed forms
// on the half-circle for the 2D normal form, Birkhoff averages of ln D,
// fixed and periodic points of G, and the measure-rho stability estimates.

#include "pwlstab/core_maps.hpp"
#include "pwlstab/errors.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace pwlstab {

inline constexpr double kZeroImageTol = 1e-14;
inline constexpr double kAngleTol = 1e-9;
inline constexpr double kBisectionTol = 1e-12;

struct SphereMapEval {
  double dilation = 0.0;
  Vector direction;
};

/// D(z) and G(z) for a unit vector z. Throws ZeroImageError when |g(z)|
/// vanishes (0 is an eigenvalue of a piece).
SphereMapEval sphere_eval(const PWLMap& map, const Vector& z);

/// Throws RegimeError unless delta_L > 0 > delta_R.
void require_non_invertible(const NormalForm2D& p, const char* who);

/// (cos theta, sin theta), returning exactly (0, 1) at theta = pi/2.
Vec2 unit_at(double theta);

struct CircleStep {
  double theta = 0.0;
  double dilation = 0.0;
};

/// One step of (G, D) on [0, pi). The right piece applies for theta <= pi/2.
/// Angles are taken from the image vector with a two-argument arctangent.
CircleStep circle_step(const NormalForm2D& p, double theta);

double circle_G(const NormalForm2D& p, double theta);
double circle_D(const NormalForm2D& p, double theta);

// ---------------------------------------------------------------------------
// Birkhoff averages

struct MeasureEstimate {
  double lambda_hat = 0.0;
  long n_used = 0;
  long burn_in = 0;
  /// Batch-means standard error (100 batches, fewer for short runs).
  double std_error = 0.0;

  friend bool operator==(const MeasureEstimate&, const MeasureEstimate&) = default;
};

inline constexpr long kDefaultBirkhoffIters = 1'000'000;
inline constexpr long kDefaultBurnIn = 1000;

/// Average of ln D(G^i z0) over burn_in <= i < n.
MeasureEstimate birkhoff_lambda(const PWLMap& map, const Vector& z0,
                                long n = kDefaultBirkhoffIters,
                                long burn_in = kDefaultBurnIn);

// ---------------------------------------------------------------------------
// Fixed points, invariant rays, regimes

enum class Side { Left, Right };
enum class Branch { Plus, Minus };

const char* to_string(Side s);
const char* to_string(Branch b);

struct GFixedPoint {
  double theta_star = 0.0;
  /// D(theta_star), the positive eigenvalue of the matching piece.
  double multiplier = 0.0;
  Side side = Side::Right;
  Branch branch = Branch::Plus;

  friend bool operator==(const GFixedPoint&, const GFixedPoint&) = default;
};

/// Fixed points of G on [0, pi): eigenvectors with positive eigenvalue whose
/// angle lies on the half-plane where their own matrix applies.
std::vector<GFixedPoint> g_fixed_points(const NormalForm2D& p);

/// The ray {r (cos a, sin a) : r >= 0} is mapped to itself, scaled by
/// `multiplier`.
struct InvariantRay {
  double angle = 0.0;
  double multiplier = 0.0;
  Side side = Side::Right;
  Branch branch = Branch::Plus;

  Vec2 direction() const { return unit_at(angle); }
};

std::vector<InvariantRay> invariant_rays(const NormalForm2D& p);

enum class LeftRegime {
  /// tau_L < 2 sqrt(delta_L): no fixed points of G in (pi/2, pi).
  ComplexRotation,
  /// tau_L > 2 sqrt(delta_L): theta^L_- < theta^L_+ in (pi/2, pi).
  TwoFixedPoints,
};

const char* to_string(LeftRegime r);

struct RegimeReport {
  LeftRegime left_regime = LeftRegime::ComplexRotation;
  std::optional<double> theta_L_minus;
  std::optional<double> theta_L_plus;
  double theta_R_plus = 0.0;
  double lambda_R_plus = 0.0;
  bool right_attracting = false;
  /// G(0); the sector [0, theta_Lambda] is the image of the first quadrant.
  double theta_Lambda = 0.0;
  bool lambda_invariant = true;
  bool lambda_globally_attracting = false;
  /// tau_L == 2 sqrt(delta_L) up to rounding; reported as ComplexRotation.
  bool left_degenerate = false;

  friend bool operator==(const RegimeReport&, const RegimeReport&) = default;
};

RegimeReport classify_regimes(const NormalForm2D& p);

// ---------------------------------------------------------------------------
// Measure-rho stability

/// tau_L > 2 sqrt(delta_L) and tau_R above -delta_R / (lambda^L_- - tau_L):
/// orbits either fall into the sector [0, theta_Lambda] or follow the ray
/// gamma^L_+.
bool in_speckled_region(const NormalForm2D& p);

struct RhoClosedForm {
  double rho = 0.0;
  /// Angle in (3 pi/2, 2 pi) with G(psi) = theta^L_-.
  double psi = 0.0;
  double theta_L_minus = 0.0;
  /// |G(psi) - theta^L_-| as computed.
  double psi_residual = 0.0;
};

/// rho = 1 - (psi - theta^L_-) / (2 pi). Throws RegimeError outside the
/// speckled region or if the branch of psi fails to verify.
RhoClosedForm rho_closed_form_details(const NormalForm2D& p);
double rho_closed_form(const NormalForm2D& p);

struct RhoEstimate {
  double rho_hat = 0.0;
  double undecided_fraction = 0.0;
  long n_samples = 0;
  long converged = 0;
  long undecided = 0;

  /// Binomial standard error of rho_hat.
  double std_error() const;

  friend bool operator==(const RhoEstimate&, const RhoEstimate&) = default;
};

/// Uniform direction on S^{d-1} for sample `index` of stream `seed`.
Vector sample_direction(int dim, std::uint64_t seed, std::uint64_t index);

/// Fraction of uniformly sampled unit directions whose orbit converges to
/// the origin. Parallel over samples; identical to serial::rho_sampled.
RhoEstimate rho_sampled(const PWLMap& map, long n_samples, int orbit_budget,
                        std::uint64_t seed);
RhoEstimate rho_sampled(const PWLMap& map, long n_samples,
                        const OrbitOptions& orbit, std::uint64_t seed);

namespace serial {
RhoEstimate rho_sampled(const PWLMap& map, long n_samples,
                        const OrbitOptions& orbit, std::uint64_t seed);
}  // namespace serial

// ---------------------------------------------------------------------------
// Empirical densities

struct Histogram {
  double lo = 0.0;
  double hi = kPi;
  std::vector<long> counts;
  /// counts / (total * bin_width); integrates to 1.
  std::vector<double> density;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double mass() const;
  int bin_of(double theta) const;
};

/// Histogram of G^i(theta0), burn_in <= i < burn_in + n, on [0, pi).
Histogram histogram_G(const NormalForm2D& p, double theta0, long n, int bins,
                      long burn_in = 0);
/// Same for any 2D map, with directions folded into [0, pi).
Histogram histogram_directions(const PWLMap& map, double theta0, long n,
                               int bins, long burn_in = 0);

// ---------------------------------------------------------------------------
// Periodic orbits

struct PeriodicOrbit {
  /// theta_0 .. theta_{p-1}, starting from the smallest angle.
  std::vector<double> angles;
  int period = 0;
  /// (1/p) sum ln D(theta_i): lambda of the uniform measure on the orbit.
  double lambda_value = 0.0;
  /// Positive eigenvalue of the matrix product along the itinerary.
  double product_eigenvalue = 0.0;
  /// The product's eigenvector matches theta_0 and ln(eigenvalue)/p matches
  /// lambda_value.
  bool validated = false;

  friend bool operator==(const PeriodicOrbit&, const PeriodicOrbit&) = default;
};

/// All periodic orbits of G with minimal period <= p_max, found by bisection
/// of G^p(theta) - theta on the cells where G^p is monotone.
std::vector<PeriodicOrbit> periodic_orbits_G(const NormalForm2D& p, int p_max);

/// Points of [0, pi) where G^j = pi/2 for some 0 <= j < p, sorted.
std::vector<double> monotone_breakpoints(const NormalForm2D& p, int period);

}  // namespace pwlstab
