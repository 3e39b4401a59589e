#pragma once

// Aggregated stability analysis of one normal-form parameter point, with a
// JSON form that round-trips exactly.

#include "pwlstab/core_maps.hpp"
#include "pwlstab/polygon_stability.hpp"
#include "pwlstab/sphere_dynamics.hpp"

#include <json.hpp>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pwlstab {

struct EigenData {
  std::complex<double> value;
  /// Eigenvector angle in [0, pi) for real positive eigenvalues.
  std::optional<double> angle;

  friend bool operator==(const EigenData&, const EigenData&) = default;
};

enum class RhoMethod { ClosedForm, Sampled };

struct RhoReport {
  double value = 0.0;
  RhoMethod method = RhoMethod::Sampled;
  long samples = 0;
  double std_error = 0.0;
  double undecided_fraction = 0.0;

  friend bool operator==(const RhoReport&, const RhoReport&) = default;
};

struct Ga92Summary {
  Ga92Status status = Ga92Status::NotDecided;
  int m = 0;
  int k = 0;
  std::optional<PeriodicOrbit> witness;

  friend bool operator==(const Ga92Summary&, const Ga92Summary&) = default;
};

enum class SummaryKind { ExponentiallyStable, MeasureRho, Unstable, Undecided };

const char* to_string(SummaryKind k);
const char* to_string(RhoMethod m);

struct StabilitySummary {
  SummaryKind kind = SummaryKind::Undecided;
  /// MeasureRho only.
  std::optional<double> rho;

  friend bool operator==(const StabilitySummary&, const StabilitySummary&) = default;
};

struct AnalysisReport {
  NormalForm2D parameters;
  std::array<EigenData, 2> eigen_left;
  std::array<EigenData, 2> eigen_right;
  std::vector<GFixedPoint> fixed_points;
  RegimeReport regime;
  double theta_Lambda = 0.0;
  RhoReport rho;
  /// Absent when the orbit hit the kernel of g.
  std::optional<MeasureEstimate> lambda;
  /// Present only for tau_L < 2 sqrt(delta_L).
  std::optional<Ga92Summary> ga92;
  StabilitySummary summary;

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

struct AnalyzeOptions {
  /// Start of the Birkhoff orbit; 0 lies in the invariant sector Lambda.
  double theta0 = 0.0;
  long lambda_iters = kDefaultBirkhoffIters;
  long lambda_burn_in = kDefaultBurnIn;
  long rho_samples = 10000;
  int orbit_budget = 10000;
  std::uint64_t seed = 1;
  int m_max = 30;
  int k_max = 60;
};

/// Ga92 Stable -> ExponentiallyStable; else undecided fraction >= 1/2 ->
/// Undecided; else rho > 0 -> MeasureRho(rho); else Unstable.
StabilitySummary summarize(const RhoReport& rho, const std::optional<Ga92Summary>& ga92);

/// Requires delta_L > 0 > delta_R (RegimeError otherwise). rho is the
/// closed form in the speckled region when lambda^L_+ > 1 and orbits in Lambda
/// contract; sampled otherwise.
AnalysisReport analyze(const NormalForm2D& params, const AnalyzeOptions& opt = {});

nlohmann::json to_json(const AnalysisReport& r);
AnalysisReport report_from_json(const nlohmann::json& j);

std::string format_text(const AnalysisReport& r);

}  // namespace pwlstab
