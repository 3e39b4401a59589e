#include "pwlstab/cli.hpp"

#include "pwlstab/errors.hpp"
#include "pwlstab/polygon_stability.hpp"
#include "pwlstab/report.hpp"
#include "pwlstab/sphere_dynamics.hpp"
#include "pwlstab/sweep.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pwlstab::cli {

namespace {

void add_params(CLI::App* sub, NormalForm2D& p) {
  sub->add_option("--tl", p.tau_L, "trace of the left matrix")->required();
  sub->add_option("--dl", p.delta_L, "determinant of the left matrix")->required();
  sub->add_option("--tr", p.tau_R, "trace of the right matrix")->required();
  sub->add_option("--dr", p.delta_R, "determinant of the right matrix")->required();
}

template <typename Write>
void to_file(const std::string& path, Write&& write) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path, "cannot open for writing");
  write(f);
  f.flush();
  if (!f) throw IoError(path, "write failed");
}

struct Args {
  NormalForm2D p;
  bool json = false;
  double theta0 = 0.0;
  long iters = kDefaultBirkhoffIters;
  long burn_in = kDefaultBurnIn;
  int bins = 100;
  std::string out;
  std::string pgm;
  long samples = 10000;
  std::uint64_t seed = 1;
  int budget = 10000;
  int m_max = 30;
  int k_max = 0;
  int n = 10;
  std::string kind = "delta";
  std::string mode;
  GridSpec grid;
  int threads = 0;

  int k_limit() const { return k_max > 0 ? k_max : 2 * m_max; }
};

void run_analyze(const Args& a, std::ostream& out) {
  AnalyzeOptions opt;
  opt.theta0 = a.theta0;
  opt.rho_samples = a.samples;
  opt.seed = a.seed;
  opt.m_max = a.m_max;
  opt.k_max = a.k_limit();
  const AnalysisReport r = analyze(a.p, opt);
  if (a.json) {
    out << to_json(r).dump(2) << '\n';
  } else {
    out << format_text(r);
  }
}

void run_lambda(const Args& a, std::ostream& out) {
  const auto e = birkhoff_lambda(make_normal_form(a.p), Vector(unit_at(a.theta0)), a.iters,
                                 a.burn_in);
  out << fmt::format("lambda_hat {}\nstd_error {}\nn_used {}\nburn_in {}\n", e.lambda_hat,
                     e.std_error, e.n_used, e.burn_in);
}

void run_hist(const Args& a, std::ostream& out) {
  const Histogram h = histogram_G(a.p, a.theta0, a.iters, a.bins, a.burn_in);
  to_file(a.out, [&](std::ostream& f) {
    f << "bin,theta_lo,theta_hi,count,density\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      f << fmt::format("{},{},{},{},{}\n", i, h.lo + i * h.bin_width(),
                       h.lo + (i + 1) * h.bin_width(), h.counts[i], h.density[i]);
    }
  });
  out << fmt::format("wrote {} bins to {}\n", h.counts.size(), a.out);
}

void run_rho(const Args& a, std::ostream& out) {
  if (in_speckled_region(a.p)) {
    out << fmt::format("closed_form {}\n", rho_closed_form(a.p));
  } else {
    out << "closed_form n/a\n";
  }
  const auto e = rho_sampled(make_normal_form(a.p), a.samples, a.budget, a.seed);
  out << fmt::format("sampled {}\nstd_error {}\nundecided {}\nsamples {}\n", e.rho_hat,
                     e.std_error(), e.undecided_fraction, e.n_samples);
}

void run_ga92(const Args& a, std::ostream& out) {
  const auto v = ga92(a.p, a.m_max, a.k_limit());
  out << fmt::format("status {}\nm {}\nk {}\n", to_string(v.status), v.m, v.k);
  if (v.witness) {
    out << fmt::format("witness_period {}\nwitness_lambda {}\n", v.witness->period,
                       v.witness->lambda_value);
  }
}

void run_polygons(const Args& a, std::ostream& out) {
  if (a.kind != "delta" && a.kind != "omega") {
    throw std::invalid_argument("polygons: --kind must be delta or omega");
  }
  const auto polys = a.kind == "delta" ? delta_sequence(a.p, a.n) : omega_sequence(a.p, a.n);
  write_polygons_csv(a.out, polys);
  out << fmt::format("wrote {} polygons to {}\n", polys.size(), a.out);
}

void run_sweep(const Args& a, std::ostream& out) {
  GridResult r;
  if (a.mode == "measure") {
    r = sweep_measure(a.grid, static_cast<int>(a.samples), a.budget, a.seed, a.threads);
  } else if (a.mode == "asymptotic") {
    r = sweep_asymptotic(a.grid, a.m_max, a.k_limit(), a.threads);
  } else {
    throw std::invalid_argument("sweep: --mode must be measure or asymptotic");
  }
  write_grid_csv(r, a.out);
  if (!a.pgm.empty()) write_grid_pgm(r, a.pgm);
  out << fmt::format("wrote {} cells to {}\n", r.value.size(), a.out);
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stability analysis of piecewise-linear continuous maps", "pwlstab"};
  app.require_subcommand(1);
  Args a;
  std::function<void(const Args&, std::ostream&)> run;

  auto* analyze_cmd = app.add_subcommand("analyze", "full report for one parameter point");
  add_params(analyze_cmd, a.p);
  analyze_cmd->add_flag("--json", a.json, "emit JSON");
  analyze_cmd->add_option("--samples", a.samples, "samples when rho is estimated");
  analyze_cmd->add_option("--seed", a.seed);
  analyze_cmd->add_option("--m-max", a.m_max);
  analyze_cmd->add_option("--k-max", a.k_max, "default 2 * m-max");
  analyze_cmd->callback([&] { run = run_analyze; });

  auto* lambda_cmd = app.add_subcommand("lambda", "Birkhoff average of ln D");
  add_params(lambda_cmd, a.p);
  lambda_cmd->add_option("--theta0", a.theta0, "initial angle");
  lambda_cmd->add_option("--iters", a.iters, "total iterates");
  lambda_cmd->add_option("--burnin", a.burn_in, "discarded iterates");
  lambda_cmd->callback([&] { run = run_lambda; });

  auto* hist_cmd = app.add_subcommand("hist", "histogram of G-orbit angles");
  add_params(hist_cmd, a.p);
  hist_cmd->add_option("--theta0", a.theta0);
  hist_cmd->add_option("--iters", a.iters);
  hist_cmd->add_option("--burnin", a.burn_in);
  hist_cmd->add_option("--bins", a.bins);
  hist_cmd->add_option("--out", a.out, "CSV path")->required();
  hist_cmd->callback([&] { run = run_hist; });

  auto* rho_cmd = app.add_subcommand("rho", "measure-rho stability");
  add_params(rho_cmd, a.p);
  rho_cmd->add_option("--samples", a.samples);
  rho_cmd->add_option("--seed", a.seed);
  rho_cmd->add_option("--budget", a.budget, "orbit steps per sample");
  rho_cmd->callback([&] { run = run_rho; });

  auto* ga92_cmd = app.add_subcommand("ga92", "polygon-iteration asymptotic stability test");
  add_params(ga92_cmd, a.p);
  ga92_cmd->add_option("--m-max", a.m_max);
  ga92_cmd->add_option("--k-max", a.k_max, "default 2 * m-max");
  ga92_cmd->callback([&] { run = run_ga92; });

  auto* poly_cmd = app.add_subcommand("polygons", "dump Delta_n or Omega_n vertices");
  add_params(poly_cmd, a.p);
  poly_cmd->add_option("--n", a.n, "last generation");
  poly_cmd->add_option("--kind", a.kind, "delta or omega");
  poly_cmd->add_option("--out", a.out, "CSV path")->required();
  poly_cmd->callback([&] { run = run_polygons; });

  auto* sweep_cmd = app.add_subcommand("sweep", "(tau_L, tau_R) parameter-plane sweep");
  sweep_cmd->add_option("--mode", a.mode, "measure or asymptotic")->required();
  sweep_cmd->add_option("--tl-min", a.grid.tau_L_min);
  sweep_cmd->add_option("--tl-max", a.grid.tau_L_max);
  sweep_cmd->add_option("--tr-min", a.grid.tau_R_min);
  sweep_cmd->add_option("--tr-max", a.grid.tau_R_max);
  sweep_cmd->add_option("--nx", a.grid.nx);
  sweep_cmd->add_option("--ny", a.grid.ny);
  sweep_cmd->add_option("--dl", a.grid.delta_L);
  sweep_cmd->add_option("--dr", a.grid.delta_R);
  sweep_cmd->add_option("--out", a.out, "CSV path")->required();
  sweep_cmd->add_option("--pgm", a.pgm, "PGM path");
  sweep_cmd->add_option("--samples", a.samples, "samples per cell (measure)");
  sweep_cmd->add_option("--seed", a.seed);
  sweep_cmd->add_option("--budget", a.budget, "orbit steps per sample");
  sweep_cmd->add_option("--m-max", a.m_max);
  sweep_cmd->add_option("--k-max", a.k_max, "default 2 * m-max");
  sweep_cmd->add_option("--threads", a.threads, "0 = OpenMP default");
  sweep_cmd->callback([&] { run = run_sweep; });

  a.samples = 10000;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  if (sweep_cmd->parsed() && sweep_cmd->count("--samples") == 0) a.samples = 200;

  try {
    run(a, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const RegimeError& e) {
    err << "regime error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ZeroImageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace pwlstab::cli
