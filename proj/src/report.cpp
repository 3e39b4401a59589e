#include "pwlstab/report.hpp"

#include "pwlstab/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace pwlstab {

using nlohmann::json;

const char* to_string(SummaryKind k) {
  switch (k) {
    case SummaryKind::ExponentiallyStable:
      return "ExponentiallyStable";
    case SummaryKind::MeasureRho:
      return "MeasureRho";
    case SummaryKind::Unstable:
      return "Unstable";
    case SummaryKind::Undecided:
      return "Undecided";
  }
  return "?";
}

const char* to_string(RhoMethod m) {
  return m == RhoMethod::ClosedForm ? "closed_form" : "sampled";
}

StabilitySummary summarize(const RhoReport& rho, const std::optional<Ga92Summary>& ga92) {
  if (ga92 && ga92->status == Ga92Status::Stable) {
    return {SummaryKind::ExponentiallyStable, std::nullopt};
  }
  if (rho.method == RhoMethod::Sampled && rho.undecided_fraction >= 0.5) {
    return {SummaryKind::Undecided, std::nullopt};
  }
  if (rho.value > 0.0) return {SummaryKind::MeasureRho, rho.value};
  return {SummaryKind::Unstable, std::nullopt};
}

namespace {

std::array<EigenData, 2> eigen_data(const Mat2& m) {
  const auto pairs = eig2(m);
  return {EigenData{pairs[0].value, pairs[0].angle},
          EigenData{pairs[1].value, pairs[1].angle}};
}

}  // namespace

AnalysisReport analyze(const NormalForm2D& params, const AnalyzeOptions& opt) {
  require_non_invertible(params, "analyze");
  AnalysisReport r;
  r.parameters = params;
  r.eigen_left = eigen_data(params.left());
  r.eigen_right = eigen_data(params.right());
  r.fixed_points = g_fixed_points(params);
  r.regime = classify_regimes(params);
  r.theta_Lambda = r.regime.theta_Lambda;

  const PWLMap map = make_normal_form(params);
  try {
    const Vec2 z0 = unit_at(opt.theta0);
    r.lambda = birkhoff_lambda(map, Vector(z0), opt.lambda_iters, opt.lambda_burn_in);
  } catch (const ZeroImageError&) {
    r.lambda.reset();
  }

  // The sector formula gives the converging fraction only when the orbits it
  // counts as converging contract (lambda < 0 from theta = 0, inside Lambda)
  // and the ones it counts as diverging expand (lambda^L_+ > 1).
  bool closed_form = false;
  if (in_speckled_region(params) && r.regime.theta_L_plus) {
    const double lp = eig2(params.left())[0].value.real();
    double lam_in_sector = 0.0;
    if (opt.theta0 == 0.0 && r.lambda) {
      lam_in_sector = r.lambda->lambda_hat;
    } else {
      try {
        lam_in_sector = birkhoff_lambda(map, Vector(unit_at(0.0)), opt.lambda_iters,
                                        opt.lambda_burn_in)
                            .lambda_hat;
      } catch (const ZeroImageError&) {
        lam_in_sector = 0.0;
      }
    }
    closed_form = lp > 1.0 && lam_in_sector < 0.0;
  }
  if (closed_form) {
    r.rho.value = rho_closed_form(params);
    r.rho.method = RhoMethod::ClosedForm;
  } else {
    OrbitOptions orbit;
    orbit.budget = opt.orbit_budget;
    const auto est = serial::rho_sampled(map, opt.rho_samples, orbit, opt.seed);
    r.rho.value = est.rho_hat;
    r.rho.method = RhoMethod::Sampled;
    r.rho.samples = est.n_samples;
    r.rho.std_error = est.std_error();
    r.rho.undecided_fraction = est.undecided_fraction;
  }

  if (params.tau_L < 2.0 * std::sqrt(params.delta_L)) {
    const auto v = ga92(params, opt.m_max, opt.k_max);
    r.ga92 = Ga92Summary{v.status, v.m, v.k, v.witness};
  }
  r.summary = summarize(r.rho, r.ga92);
  return r;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

template <typename T, typename F>
json opt_to_json(const std::optional<T>& v, F&& f) {
  return v ? f(*v) : json(nullptr);
}

template <typename T, typename F>
std::optional<T> opt_from_json(const json& j, F&& f) {
  if (j.is_null()) return std::nullopt;
  return f(j);
}

json eigen_to_json(const EigenData& e) {
  return {{"re", e.value.real()},
          {"im", e.value.imag()},
          {"angle", opt_to_json(e.angle, [](double a) { return json(a); })}};
}

EigenData eigen_from_json(const json& j) {
  return {{j.at("re").get<double>(), j.at("im").get<double>()},
          opt_from_json<double>(j.at("angle"), [](const json& a) { return a.get<double>(); })};
}

json orbit_to_json(const PeriodicOrbit& o) {
  return {{"angles", o.angles},
          {"period", o.period},
          {"lambda_value", o.lambda_value},
          {"product_eigenvalue", o.product_eigenvalue},
          {"validated", o.validated}};
}

PeriodicOrbit orbit_from_json(const json& j) {
  PeriodicOrbit o;
  o.angles = j.at("angles").get<std::vector<double>>();
  o.period = j.at("period").get<int>();
  o.lambda_value = j.at("lambda_value").get<double>();
  o.product_eigenvalue = j.at("product_eigenvalue").get<double>();
  o.validated = j.at("validated").get<bool>();
  return o;
}

template <typename E, std::size_t N>
E enum_from(const std::string& s, const E (&values)[N]) {
  for (E v : values) {
    if (s == to_string(v)) return v;
  }
  throw std::invalid_argument("report_from_json: unknown enum value '" + s + "'");
}

constexpr Side kSides[] = {Side::Left, Side::Right};
constexpr Branch kBranches[] = {Branch::Plus, Branch::Minus};
constexpr LeftRegime kLeftRegimes[] = {LeftRegime::ComplexRotation, LeftRegime::TwoFixedPoints};
constexpr RhoMethod kRhoMethods[] = {RhoMethod::ClosedForm, RhoMethod::Sampled};
constexpr Ga92Status kGa92[] = {Ga92Status::Stable, Ga92Status::NotDecided,
                                Ga92Status::InstabilityWitness};
constexpr SummaryKind kSummary[] = {SummaryKind::ExponentiallyStable, SummaryKind::MeasureRho,
                                    SummaryKind::Unstable, SummaryKind::Undecided};

json optd(const std::optional<double>& v) {
  return opt_to_json(v, [](double x) { return json(x); });
}

std::optional<double> optd(const json& j) {
  return opt_from_json<double>(j, [](const json& x) { return x.get<double>(); });
}

}  // namespace

json to_json(const AnalysisReport& r) {
  json j;
  const auto& p = r.parameters;
  j["parameters"] = {{"tau_L", p.tau_L}, {"delta_L", p.delta_L},
                     {"tau_R", p.tau_R}, {"delta_R", p.delta_R}};
  j["eigen_left"] = {eigen_to_json(r.eigen_left[0]), eigen_to_json(r.eigen_left[1])};
  j["eigen_right"] = {eigen_to_json(r.eigen_right[0]), eigen_to_json(r.eigen_right[1])};
  j["fixed_points"] = json::array();
  for (const auto& f : r.fixed_points) {
    j["fixed_points"].push_back({{"theta_star", f.theta_star},
                                 {"multiplier", f.multiplier},
                                 {"side", to_string(f.side)},
                                 {"branch", to_string(f.branch)}});
  }
  const auto& g = r.regime;
  j["regime"] = {{"left_regime", to_string(g.left_regime)},
                 {"theta_L_minus", optd(g.theta_L_minus)},
                 {"theta_L_plus", optd(g.theta_L_plus)},
                 {"theta_R_plus", g.theta_R_plus},
                 {"lambda_R_plus", g.lambda_R_plus},
                 {"right_attracting", g.right_attracting},
                 {"theta_Lambda", g.theta_Lambda},
                 {"lambda_invariant", g.lambda_invariant},
                 {"lambda_globally_attracting", g.lambda_globally_attracting},
                 {"left_degenerate", g.left_degenerate}};
  j["theta_Lambda"] = r.theta_Lambda;
  j["rho"] = {{"value", r.rho.value},
              {"method", to_string(r.rho.method)},
              {"samples", r.rho.samples},
              {"std_error", r.rho.std_error},
              {"undecided_fraction", r.rho.undecided_fraction}};
  j["lambda"] = opt_to_json(r.lambda, [](const MeasureEstimate& e) {
    return json{{"lambda_hat", e.lambda_hat},
                {"n_used", e.n_used},
                {"burn_in", e.burn_in},
                {"std_error", e.std_error}};
  });
  j["ga92"] = opt_to_json(r.ga92, [](const Ga92Summary& s) {
    return json{{"status", to_string(s.status)},
                {"m", s.m},
                {"k", s.k},
                {"witness", opt_to_json(s.witness, orbit_to_json)}};
  });
  j["summary"] = {{"kind", to_string(r.summary.kind)}, {"rho", optd(r.summary.rho)}};
  return j;
}

AnalysisReport report_from_json(const json& j) {
  AnalysisReport r;
  const auto& p = j.at("parameters");
  r.parameters = {p.at("tau_L").get<double>(), p.at("delta_L").get<double>(),
                  p.at("tau_R").get<double>(), p.at("delta_R").get<double>()};
  for (int i = 0; i < 2; ++i) {
    r.eigen_left[i] = eigen_from_json(j.at("eigen_left").at(i));
    r.eigen_right[i] = eigen_from_json(j.at("eigen_right").at(i));
  }
  for (const auto& f : j.at("fixed_points")) {
    r.fixed_points.push_back({f.at("theta_star").get<double>(),
                              f.at("multiplier").get<double>(),
                              enum_from(f.at("side").get<std::string>(), kSides),
                              enum_from(f.at("branch").get<std::string>(), kBranches)});
  }
  const auto& g = j.at("regime");
  r.regime.left_regime = enum_from(g.at("left_regime").get<std::string>(), kLeftRegimes);
  r.regime.theta_L_minus = optd(g.at("theta_L_minus"));
  r.regime.theta_L_plus = optd(g.at("theta_L_plus"));
  r.regime.theta_R_plus = g.at("theta_R_plus").get<double>();
  r.regime.lambda_R_plus = g.at("lambda_R_plus").get<double>();
  r.regime.right_attracting = g.at("right_attracting").get<bool>();
  r.regime.theta_Lambda = g.at("theta_Lambda").get<double>();
  r.regime.lambda_invariant = g.at("lambda_invariant").get<bool>();
  r.regime.lambda_globally_attracting = g.at("lambda_globally_attracting").get<bool>();
  r.regime.left_degenerate = g.at("left_degenerate").get<bool>();
  r.theta_Lambda = j.at("theta_Lambda").get<double>();
  const auto& rho = j.at("rho");
  r.rho.value = rho.at("value").get<double>();
  r.rho.method = enum_from(rho.at("method").get<std::string>(), kRhoMethods);
  r.rho.samples = rho.at("samples").get<long>();
  r.rho.std_error = rho.at("std_error").get<double>();
  r.rho.undecided_fraction = rho.at("undecided_fraction").get<double>();
  r.lambda = opt_from_json<MeasureEstimate>(j.at("lambda"), [](const json& e) {
    return MeasureEstimate{e.at("lambda_hat").get<double>(), e.at("n_used").get<long>(),
                           e.at("burn_in").get<long>(), e.at("std_error").get<double>()};
  });
  r.ga92 = opt_from_json<Ga92Summary>(j.at("ga92"), [](const json& s) {
    return Ga92Summary{enum_from(s.at("status").get<std::string>(), kGa92),
                       s.at("m").get<int>(), s.at("k").get<int>(),
                       opt_from_json<PeriodicOrbit>(s.at("witness"), orbit_from_json)};
  });
  const auto& s = j.at("summary");
  r.summary.kind = enum_from(s.at("kind").get<std::string>(), kSummary);
  r.summary.rho = optd(s.at("rho"));
  return r;
}

// ---------------------------------------------------------------------------

namespace {

std::string eigen_text(const EigenData& e) {
  std::string s = e.value.imag() == 0.0
                      ? fmt::format("{:.6g}", e.value.real())
                      : fmt::format("{:.6g}{:+.6g}i", e.value.real(), e.value.imag());
  if (e.angle) s += fmt::format(" (angle {:.6g})", *e.angle);
  return s;
}

}  // namespace

std::string format_text(const AnalysisReport& r) {
  const auto& p = r.parameters;
  std::string s = fmt::format("parameters  tau_L={} delta_L={} tau_R={} delta_R={}\n",
                              p.tau_L, p.delta_L, p.tau_R, p.delta_R);
  s += fmt::format("eigen_left  {}, {}\n", eigen_text(r.eigen_left[0]), eigen_text(r.eigen_left[1]));
  s += fmt::format("eigen_right {}, {}\n", eigen_text(r.eigen_right[0]), eigen_text(r.eigen_right[1]));
  for (const auto& f : r.fixed_points) {
    s += fmt::format("fixed_point theta={:.9g} multiplier={:.6g} ({} {})\n", f.theta_star,
                     f.multiplier, to_string(f.side), to_string(f.branch));
  }
  s += fmt::format("left_regime {}{}\n", to_string(r.regime.left_regime),
                   r.regime.left_degenerate ? " (degenerate)" : "");
  s += fmt::format("theta_Lambda {:.9g}  invariant={} globally_attracting={}\n", r.theta_Lambda,
                   r.regime.lambda_invariant, r.regime.lambda_globally_attracting);
  if (r.rho.method == RhoMethod::ClosedForm) {
    s += fmt::format("rho {:.6f} (closed form)\n", r.rho.value);
  } else {
    s += fmt::format("rho {:.6f} +- {:.2g} (sampled, n={}, undecided={:.4g})\n", r.rho.value,
                     r.rho.std_error, r.rho.samples, r.rho.undecided_fraction);
  }
  if (r.lambda) {
    s += fmt::format("lambda {:.6f} +- {:.2g} (n={})\n", r.lambda->lambda_hat,
                     r.lambda->std_error, r.lambda->n_used);
  } else {
    s += "lambda n/a (orbit reached the kernel of g)\n";
  }
  if (r.ga92) {
    s += fmt::format("ga92 {} m={} k={}", to_string(r.ga92->status), r.ga92->m, r.ga92->k);
    if (r.ga92->witness) {
      s += fmt::format(" witness period={} lambda={:.6g}", r.ga92->witness->period,
                       r.ga92->witness->lambda_value);
    }
    s += '\n';
  }
  s += fmt::format("summary {}", to_string(r.summary.kind));
  if (r.summary.rho) s += fmt::format(" rho={:.6f}", *r.summary.rho);
  s += '\n';
  return s;
}

}  // namespace pwlstab
