// Acceptance checks: one PASS/FAIL line per criterion, tolerances fixed here.
// Exit status is 0 only if every criterion passes.

#include "pwlstab/cli.hpp"
#include "pwlstab/polygon_stability.hpp"
#include "pwlstab/report.hpp"
#include "pwlstab/sphere_dynamics.hpp"
#include "pwlstab/star_polygon.hpp"
#include "pwlstab/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace pwlstab;

namespace {

// Criterion 1
constexpr double kRhoTarget = 0.37;
constexpr double kRhoTol = 0.005;
constexpr double kRhoMcTol = 0.02;
constexpr long kRhoSamples = 10000;
constexpr double kRhoSeconds = 10.0;
// Criterion 2
constexpr double kLambdaStable = -0.16;
constexpr double kLambdaPeriod3 = -0.06;
constexpr double kLambdaTol = 0.01;
constexpr long kLambdaIters = 1000000;
constexpr double kLambdaSeconds = 5.0;
// Criterion 3
constexpr double kPeriod3Lambda = 0.03;
constexpr double kPeriod3Tol = 0.005;
constexpr int kMMax = 30;
constexpr int kKMax = 60;
constexpr double kGa92Seconds = 30.0;
// Criterion 4
constexpr int kSweepNx = 64;
constexpr int kSweepNy = 32;
constexpr int kSweepSamples = 200;
constexpr int kSweepBudget = 10000;
constexpr double kSweepSigmas = 3.0;
constexpr double kSweepSeconds = 600.0;
// Criterion 5
constexpr int kHomogeneityCases = 10000;
constexpr double kHomogeneityTol = 1e-12;
constexpr int kBijectionCases = 1000;
constexpr double kFactorTol = 1e-8;
constexpr int kFactorSteps = 200;
constexpr double kAreaTol = 1e-9;
constexpr int kHarnessPoints = 20;
constexpr double kHarnessC = 0.1;
constexpr double kHarnessGamma = 0.5;
constexpr double kHarnessX0 = 1e-3;

const NormalForm2D kSpeckled{2.5, 1.4, -0.5, -1.2};
const NormalForm2D kStable{2.0, 1.4, -0.8, -1.2};
const NormalForm2D kPeriod3{1.4, 1.4, -1.4, -1.2};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back((ok ? "ok   " : "FAIL ") + what);
  }
};

std::string num(double v) { return fmt::format("{}", v); }

struct CliRun {
  int code;
  std::map<std::string, std::string> fields;
  std::string raw;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> all{"pwlstab"};
  all.insert(all.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : all) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r{cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err), {}, out.str()};
  std::istringstream in(r.raw);
  std::string key, value;
  while (in >> key >> value) r.fields[key] = value;
  return r;
}

std::vector<std::string> param_flags(const NormalForm2D& p) {
  return {"--tl", num(p.tau_L), "--dl", num(p.delta_L), "--tr", num(p.tau_R), "--dr",
          num(p.delta_R)};
}

double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

NormalForm2D random_regime(std::mt19937_64& g) {
  return {uniform(g, -3.0, 3.5), uniform(g, 0.05, 2.0), uniform(g, -3.0, 3.0),
          uniform(g, -2.0, -0.05)};
}

// ---------------------------------------------------------------------------

Outcome criterion_rho() {
  Outcome o;
  const auto t0 = Clock::now();
  auto args = param_flags(kSpeckled);
  args.insert(args.begin(), "rho");
  args.insert(args.end(), {"--samples", std::to_string(kRhoSamples), "--seed", "1"});
  const CliRun r = run_cli(args);
  const double t = seconds_since(t0);
  o.require(r.code == 0, "rho exits 0");
  const double cf = std::stod(r.fields.count("closed_form") ? r.fields.at("closed_form") : "nan");
  const double mc = std::stod(r.fields.count("sampled") ? r.fields.at("sampled") : "nan");
  o.require(std::abs(cf - kRhoTarget) <= kRhoTol,
            fmt::format("closed form {:.6f} = {} +- {}", cf, kRhoTarget, kRhoTol));
  o.require(std::abs(mc - cf) <= kRhoMcTol,
            fmt::format("sampled {:.4f} ({} samples) within {} of closed form", mc, kRhoSamples,
                        kRhoMcTol));
  o.require(t < kRhoSeconds, fmt::format("runtime {:.3f} s < {} s", t, kRhoSeconds));
  return o;
}

Outcome criterion_lambda() {
  Outcome o;
  for (const auto& [p, target] : {std::pair{kStable, kLambdaStable}, std::pair{kPeriod3, kLambdaPeriod3}}) {
    const auto t0 = Clock::now();
    auto args = param_flags(p);
    args.insert(args.begin(), "lambda");
    args.insert(args.end(), {"--iters", std::to_string(kLambdaIters)});
    const CliRun r = run_cli(args);
    const double t = seconds_since(t0);
    const double lam = std::stod(r.fields.count("lambda_hat") ? r.fields.at("lambda_hat") : "nan");
    o.require(r.code == 0 && std::abs(lam - target) <= kLambdaTol,
              fmt::format("tau_L={} tau_R={}: lambda {:.5f} = {} +- {}", p.tau_L, p.tau_R, lam,
                          target, kLambdaTol));
    o.require(t < kLambdaSeconds, fmt::format("runtime {:.3f} s < {} s", t, kLambdaSeconds));
  }
  return o;
}

Outcome criterion_period3() {
  Outcome o;
  auto t0 = Clock::now();
  const auto orbits = periodic_orbits_G(kPeriod3, 3);
  bool found = false;
  for (const auto& orb : orbits) {
    if (orb.period == 3 && orb.validated &&
        std::abs(orb.lambda_value - kPeriod3Lambda) <= kPeriod3Tol) {
      found = true;
      o.notes.push_back(fmt::format("     period-3 orbit at theta = {:.5f}, lambda = {:.5f}",
                                    orb.angles[0], orb.lambda_value));
    }
  }
  o.require(found, fmt::format("period-3 orbit with lambda = {} +- {}", kPeriod3Lambda,
                               kPeriod3Tol));
  const auto w = ga92(kPeriod3, kMMax, kKMax);
  double t = seconds_since(t0);
  o.require(w.status == Ga92Status::InstabilityWitness,
            fmt::format("ga92 at (1.4, 1.4, -1.4, -1.2): {}", to_string(w.status)));
  o.require(t < kGa92Seconds, fmt::format("runtime {:.3f} s < {} s", t, kGa92Seconds));

  t0 = Clock::now();
  const auto s = ga92(kStable, kMMax, kKMax);
  t = seconds_since(t0);
  o.require(s.status == Ga92Status::Stable && s.m <= kMMax,
            fmt::format("ga92 at (2, 1.4, -0.8, -1.2): {} m={} k={}", to_string(s.status), s.m,
                        s.k));
  o.require(t < kGa92Seconds, fmt::format("runtime {:.3f} s < {} s", t, kGa92Seconds));
  return o;
}

Outcome criterion_sweep() {
  Outcome o;
  const auto t0 = Clock::now();
  GridSpec spec;
  spec.tau_L_min = 0.0;
  spec.tau_L_max = 3.5;
  spec.tau_R_min = -2.0;
  spec.tau_R_max = 1.0;
  spec.nx = kSweepNx;
  spec.ny = kSweepNy;
  spec.delta_L = 1.4;
  spec.delta_R = -1.2;
  const GridResult asym = sweep_asymptotic(spec, kMMax, kKMax);
  const GridResult meas = sweep_measure(spec, kSweepSamples, kSweepBudget, 1);

  const double boundary = 2.0 * std::sqrt(spec.delta_L);
  int stable = 0, inconsistent = 0, right_of_line = 0;
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      if (asym.at(i, j) < 1) continue;
      ++stable;
      const double r = meas.at(i, j);
      const double sigma = std::sqrt(r * (1 - r) / kSweepSamples);
      if (r < 1.0 - kSweepSigmas * sigma) ++inconsistent;
      if (spec.tau_L(i) >= boundary) ++right_of_line;
    }
  }
  o.require(stable > 0, fmt::format("{} ga92-stable cells", stable));
  o.require(inconsistent == 0,
            fmt::format("{} stable cells below measure 1 - {} sigma", inconsistent,
                        kSweepSigmas));
  o.require(right_of_line == 0,
            fmt::format("{} stable cells at tau_L >= 2 sqrt(1.4)", right_of_line));

  const auto nearest = [&](const NormalForm2D& p) {
    const int i = static_cast<int>(std::lround((p.tau_L - spec.tau_L_min) /
                                               (spec.tau_L_max - spec.tau_L_min) * (spec.nx - 1)));
    const int j = static_cast<int>(std::lround((p.tau_R - spec.tau_R_min) /
                                               (spec.tau_R_max - spec.tau_R_min) * (spec.ny - 1)));
    return std::pair{i, j};
  };
  const auto [i5, j5] = nearest(kStable);
  const auto [i6, j6] = nearest(kPeriod3);
  o.require(asym.at(i5, j5) >= 1 && meas.at(i5, j5) == 1.0,
            "cell nearest (2, -0.8) is stable with measure 1");
  // Measure-1 stable without asymptotic stability (period-3 obstruction).
  o.require(asym.at(i6, j6) < 1 && meas.at(i6, j6) == 1.0,
            "cell nearest (1.4, -1.4) is not ga92-stable but has measure 1");

  // Speckled cells where the closed form applies: the true fraction lies
  // between converged and converged + undecided (slow contraction near
  // lambda = 0 leaves trapped orbits undecided within the budget).
  int checked = 0, off = 0;
  AnalyzeOptions aopt;
  aopt.lambda_iters = 100000;
  aopt.rho_samples = 1;
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      const NormalForm2D p = spec.cell(i, j);
      if (!in_speckled_region(p)) continue;
      const AnalysisReport rep = analyze(p, aopt);
      if (rep.rho.method != RhoMethod::ClosedForm) continue;
      ++checked;
      const double rho = rep.rho.value;
      const double sigma = std::sqrt(rho * (1 - rho) / kSweepSamples);
      const double lo = meas.at(i, j);
      const double hi = lo + meas.undecided[spec.index(i, j)];
      if (lo > rho + 4 * sigma || hi < rho - 4 * sigma) ++off;
    }
  }
  o.require(checked > 0 && off == 0,
            fmt::format("speckled cells: {} of {} outside 4 sigma of closed-form rho", off,
                        checked));
  const double t = seconds_since(t0);
  o.require(t < kSweepSeconds, fmt::format("runtime {:.3f} s < {} s", t, kSweepSeconds));
  return o;
}

// ---------------------------------------------------------------------------
// Property suites

bool prop_homogeneity() {
  std::mt19937_64 g(101);
  for (int i = 0; i < kHomogeneityCases; ++i) {
    const NormalForm2D p{uniform(g, -3, 3), uniform(g, -2, 2), uniform(g, -3, 3),
                         uniform(g, -2, 2)};
    const PWLMap m = make_normal_form(p);
    const Vector x = Vec2(uniform(g, -5, 5), uniform(g, -5, 5));
    const double a = uniform(g, 0, 10);
    const Vector ax = m(a * x);
    if ((ax - a * m(x)).norm() > kHomogeneityTol * std::max(1.0, ax.norm())) return false;
    // Continuity across x = 0.
    const double y = uniform(g, -5, 5);
    const double h = 1e-9;
    const Vector l = m(Vector(Vec2(-h, y)));
    const Vector r = m(Vector(Vec2(h, y)));
    const double lip = 2 * h * (std::abs(p.tau_L) + std::abs(p.tau_R) + std::abs(p.delta_L) +
                                std::abs(p.delta_R));
    if ((l - r).norm() > lip + kHomogeneityTol * std::max(1.0, std::abs(y))) return false;
  }
  return true;
}

bool prop_bijection() {
  std::mt19937_64 g(102);
  const int n = 20000;
  for (int i = 0; i < kBijectionCases; ++i) {
    const NormalForm2D p = random_regime(g);
    const auto fps = g_fixed_points(p);
    // Admissible positive eigenpairs.
    int eig_count = 0;
    for (int side = 0; side < 2; ++side) {
      for (const auto& e : eig2(side == 0 ? p.left() : p.right())) {
        if (!e.is_real() || !e.angle || e.value.real() <= 0 || e.degenerate) continue;
        const bool ok = side == 0 ? *e.angle >= kHalfPi : *e.angle <= kHalfPi;
        if (ok) ++eig_count;
      }
    }
    if (eig_count != static_cast<int>(fps.size())) return false;
    // Roots of G(theta) - theta from a dense scan.
    int roots = 0;
    auto h = [&](double t) { return circle_G(p, t) - t; };
    double a = 0.0, ha = h(a);
    for (int k = 1; k <= n; ++k) {
      const double b = kPi * k / n * (1 - 1e-13);
      const double hb = h(b);
      if ((ha < 0) != (hb < 0)) {
        double lo = a, hi = b;
        for (int it = 0; it < 100; ++it) {
          const double mid = 0.5 * (lo + hi);
          ((h(mid) < 0) == (ha < 0) ? lo : hi) = mid;
        }
        const double r = 0.5 * (lo + hi);
        if (std::abs(h(r)) < 1e-9) {
          ++roots;
          const bool matched = std::any_of(fps.begin(), fps.end(), [&](const GFixedPoint& f) {
            return std::abs(f.theta_star - r) < 1e-8;
          });
          if (!matched) return false;
        }
      }
      a = b;
      ha = hb;
    }
    if (roots != static_cast<int>(fps.size())) return false;
  }
  return true;
}

bool prop_factorization() {
  std::mt19937_64 g(103);
  for (int i = 0; i < 1000; ++i) {
    const NormalForm2D p = random_regime(g);
    const PWLMap m = make_normal_form(p);
    const double a = uniform(g, 0, kTwoPi);
    Vector x = Vec2(std::cos(a), std::sin(a));
    double log_sum = 0.0;
    for (int n = 1; n <= kFactorSteps; ++n) {
      log_sum += std::log(sphere_eval(m, x / x.norm()).dilation);
      x = m(x);
      if (std::abs(std::exp(log_sum - std::log(x.norm())) - 1.0) > kFactorTol) return false;
    }
  }
  return true;
}

bool prop_monotone() {
  std::mt19937_64 g(104);
  for (int i = 0; i < 300; ++i) {
    const NormalForm2D p = random_regime(g);
    if (circle_G(p, kHalfPi) != 0.0) return false;
    const int n = 4000;
    double prev = circle_G(p, 0.0);
    for (int k = 1; k < n; ++k) {
      const double cur = circle_G(p, kHalfPi * k / n);
      if (!(cur < prev)) return false;
      prev = cur;
    }
    prev = circle_G(p, kHalfPi * (1 + 1.0 / n));
    for (int k = 2; k < n; ++k) {
      const double cur = circle_G(p, kHalfPi * (1 + static_cast<double>(k) / n));
      if (!(cur > prev)) return false;
      prev = cur;
    }
  }
  return true;
}

bool prop_area_law() {
  std::mt19937_64 g(105);
  for (int i = 0; i < 500; ++i) {
    const NormalForm2D p = random_regime(g);
    const bool right = i % 2 == 0;
    const int nv = 2 + i % 6;
    std::vector<double> a(nv);
    for (auto& t : a) t = uniform(g, -kHalfPi + 0.05, kHalfPi - 0.05);
    std::sort(a.begin(), a.end());
    std::vector<Vec2> v{Vec2::Zero()};
    for (double t : a) {
      const double r = uniform(g, 0.3, 1.3);
      v.emplace_back(r * std::cos(t), r * std::sin(t));
    }
    StarPolygon half(v);
    if (!right) half = half.transformed(-Mat2::Identity());
    const double det = right ? -p.delta_R : p.delta_L;
    const double want = det * half.area();
    if (std::abs(image_polygon(p, half).area() - want) > kAreaTol * want) return false;
  }
  return true;
}

bool prop_absorption() {
  std::mt19937_64 g(106);
  int seen = 0;
  for (int tries = 0; tries < 400 && seen < 30; ++tries) {
    const NormalForm2D p{uniform(g, -1.0, 2.3), uniform(g, 0.2, 1.5), uniform(g, -2.0, 1.0),
                         uniform(g, -1.5, -0.1)};
    if (!(p.tau_L < 2 * std::sqrt(p.delta_L))) continue;
    const auto omega = omega_sequence(p, 25);
    int first = -1;
    for (int m = 1; m <= 25 && first < 0; ++m) {
      if (polygon_contains(omega[m], image_polygon(p, omega[m]))) first = m;
    }
    if (first < 0) continue;
    ++seen;
    for (int m = first + 1; m <= 25; ++m) {
      if (!polygon_contains(omega[first], omega[m], 1e-8)) return false;
    }
  }
  return seen >= 10;
}

bool prop_harness() {
  std::mt19937_64 g(107);
  int found = 0;
  OrbitOptions opt;
  opt.budget = 20000;
  for (int tries = 0; found < kHarnessPoints && tries < 4000; ++tries) {
    const NormalForm2D p{uniform(g, -1.0, 2.0), uniform(g, 0.2, 1.5), uniform(g, -2.0, 1.0),
                         uniform(g, -1.5, -0.1)};
    if (!(p.tau_L < 2 * std::sqrt(p.delta_L))) continue;
    if (ga92(p, kMMax, kKMax).status != Ga92Status::Stable) continue;
    ++found;
    const PerturbedMap f = perturbed_map(make_normal_form(p), kHarnessC, kHarnessGamma);
    for (int s = 0; s < 64; ++s) {
      const double t = kTwoPi * (s + 0.5) / 64;
      const Vector x0 = kHarnessX0 * Vector(Vec2(std::cos(t), std::sin(t)));
      const auto v = orbit_with([&](const Vector& x) { return f(x); }, x0, opt);
      if (v.status != OrbitStatus::ConvergedToOrigin) return false;
    }
  }
  return found == kHarnessPoints;
}

Outcome criterion_properties() {
  Outcome o;
  const std::pair<const char*, std::function<bool()>> props[] = {
      {"homogeneity and continuity (1e4 cases, 1e-12)", prop_homogeneity},
      {"fixed points <-> positive eigenpairs (1e3 cases)", prop_bijection},
      {"g^n norm factorization (n <= 200, 1e-8)", prop_factorization},
      {"G monotone on each half, G(pi/2) = 0", prop_monotone},
      {"polygon area law (1e-9)", prop_area_law},
      {"Omega_m absorbed after first containment", prop_absorption},
      {"perturbed orbits converge at 20 ga92-stable points", prop_harness},
  };
  for (const auto& [name, fn] : props) o.require(fn(), name);
  return o;
}

// ---------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

Outcome criterion_determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "pwlstab_acceptance";
  std::filesystem::create_directories(dir);
  const auto path = [&](const std::string& name) { return (dir / name).string(); };
  for (const std::string mode : {"measure", "asymptotic"}) {
    std::vector<std::string> names;
    for (const std::string threads : {"1", "3", "1"}) {
      const std::string tag = mode + "_" + threads + "_" + std::to_string(names.size());
      names.push_back(tag);
      run_cli({"sweep", "--mode", mode, "--nx", "24", "--ny", "12", "--samples", "100",
               "--seed", "7", "--threads", threads, "--out", path(tag + ".csv"), "--pgm",
               path(tag + ".pgm")});
    }
    bool same = true;
    for (const auto& n : names) {
      same = same && slurp(path(n + ".csv")) == slurp(path(names[0] + ".csv")) &&
             slurp(path(n + ".pgm")) == slurp(path(names[0] + ".pgm"));
    }
    o.require(same && !slurp(path(names[0] + ".csv")).empty(),
              mode + " sweep CSV/PGM identical across reruns and 1 vs 3 threads");
  }
  auto hist = param_flags(kSpeckled);
  hist.insert(hist.begin(), "hist");
  std::vector<std::string> h1 = hist, h2 = hist;
  h1.insert(h1.end(), {"--iters", "100000", "--out", path("h1.csv")});
  h2.insert(h2.end(), {"--iters", "100000", "--out", path("h2.csv")});
  run_cli(h1);
  run_cli(h2);
  o.require(slurp(path("h1.csv")) == slurp(path("h2.csv")), "hist CSV identical across runs");
  auto poly = param_flags(kStable);
  poly.insert(poly.begin(), "polygons");
  std::vector<std::string> p1 = poly, p2 = poly;
  p1.insert(p1.end(), {"--n", "6", "--out", path("p1.csv")});
  p2.insert(p2.end(), {"--n", "6", "--out", path("p2.csv")});
  run_cli(p1);
  run_cli(p2);
  o.require(slurp(path("p1.csv")) == slurp(path("p2.csv")), "polygon CSV identical across runs");
  auto rho = param_flags(kSpeckled);
  rho.insert(rho.begin(), "rho");
  rho.insert(rho.end(), {"--samples", "2000", "--seed", "5"});
  o.require(run_cli(rho).raw == run_cli(rho).raw, "rho output identical across runs");
  std::filesystem::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"rho reproduction", criterion_rho},
      {"lambda reproduction", criterion_lambda},
      {"period-3 obstruction and ga92 verdicts", criterion_period3},
      {"desk-scale sweep consistency", criterion_sweep},
      {"property suites", criterion_properties},
      {"determinism", criterion_determinism},
  };
  bool all = true;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    all = all && o.pass;
    std::cout << fmt::format("criterion {} {}: {} ({:.2f} s)\n", n, o.pass ? "PASS" : "FAIL",
                             name, seconds_since(t0));
    for (const auto& note : o.notes) std::cout << "    " << note << '\n';
  }
  std::cout << (all ? "ALL CRITERIA PASS\n" : "SOME CRITERIA FAIL\n");
  return all ? 0 : 1;
}
