#include "pwlstab/cli.hpp"
#include "pwlstab/errors.hpp"
#include "pwlstab/report.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace pwlstab;

namespace {

const NormalForm2D kSpeckled{2.5, 1.4, -0.5, -1.2};
const NormalForm2D kStable{2.0, 1.4, -0.8, -1.2};
const NormalForm2D kPeriod3{1.4, 1.4, -1.4, -1.2};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "pwlstab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> params(const NormalForm2D& p) {
  const auto s = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  return {"--tl", s(p.tau_L), "--dl", s(p.delta_L), "--tr", s(p.tau_R), "--dr", s(p.delta_R)};
}

std::vector<std::string> cmd(const std::string& sub, const NormalForm2D& p,
                             std::vector<std::string> extra = {}) {
  std::vector<std::string> a{sub};
  for (auto& s : params(p)) a.push_back(s);
  for (auto& s : extra) a.push_back(s);
  return a;
}

AnalyzeOptions quick() {
  AnalyzeOptions o;
  o.lambda_iters = 100000;
  o.rho_samples = 2000;
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("summary rule") {
  RhoReport rho{0.4, RhoMethod::Sampled, 100, 0.05, 0.0};
  Ga92Summary stable{Ga92Status::Stable, 2, 2, std::nullopt};
  Ga92Summary nd{Ga92Status::NotDecided, 30, 60, std::nullopt};
  CHECK(summarize(rho, stable).kind == SummaryKind::ExponentiallyStable);
  CHECK(summarize(rho, nd).kind == SummaryKind::MeasureRho);
  CHECK(summarize(rho, nd).rho == 0.4);
  CHECK(summarize(rho, std::nullopt).kind == SummaryKind::MeasureRho);
  RhoReport zero{0.0, RhoMethod::Sampled, 100, 0.0, 0.0};
  CHECK(summarize(zero, nd).kind == SummaryKind::Unstable);
  CHECK_FALSE(summarize(zero, nd).rho);
  RhoReport stuck{0.1, RhoMethod::Sampled, 100, 0.03, 0.6};
  CHECK(summarize(stuck, nd).kind == SummaryKind::Undecided);
  CHECK(summarize(stuck, stable).kind == SummaryKind::ExponentiallyStable);
}

TEST_CASE("analyze reports") {
  const AnalysisReport r1 = analyze(kSpeckled, quick());
  CHECK(r1.rho.method == RhoMethod::ClosedForm);
  CHECK(std::abs(r1.rho.value - 0.37) <= 0.005);
  CHECK(r1.rho.value == rho_closed_form(kSpeckled));
  CHECK_FALSE(r1.ga92);
  CHECK(r1.summary.kind == SummaryKind::MeasureRho);
  CHECK(r1.summary.rho == r1.rho.value);
  CHECK(r1.fixed_points.size() == 3);
  REQUIRE(r1.lambda);
  CHECK(r1.lambda->lambda_hat < 0.0);
  CHECK(r1.eigen_left[0].value.real() == doctest::Approx(1.25 + std::sqrt(1.25 * 1.25 - 1.4)));

  const AnalysisReport r5 = analyze(kStable, quick());
  REQUIRE(r5.ga92);
  CHECK(r5.ga92->status == Ga92Status::Stable);
  CHECK(r5.ga92->m == 2);
  CHECK(r5.summary.kind == SummaryKind::ExponentiallyStable);
  CHECK(r5.rho.value == 1.0);
  REQUIRE(r5.lambda);
  CHECK(r5.lambda->lambda_hat == doctest::Approx(-0.16).epsilon(0.1));

  const AnalysisReport r6 = analyze(kPeriod3, quick());
  REQUIRE(r6.ga92);
  CHECK(r6.ga92->status == Ga92Status::InstabilityWitness);
  REQUIRE(r6.ga92->witness);
  CHECK(r6.ga92->witness->period == 3);
  CHECK(r6.summary.kind != SummaryKind::ExponentiallyStable);

  CHECK_THROWS_AS(analyze(NormalForm2D{1, 1, 1, 1}), RegimeError);
  CHECK(analyze(kPeriod3, quick()) == r6);
}

TEST_CASE("JSON round trip") {
  for (const NormalForm2D& p : {kSpeckled, kStable, kPeriod3, NormalForm2D{0.0, 1.4, 0.0, -1.2}}) {
    const AnalysisReport r = analyze(p, quick());
    CHECK(report_from_json(to_json(r)) == r);
    const std::string text = to_json(r).dump();
    CHECK(report_from_json(nlohmann::json::parse(text)) == r);
    CHECK(to_json(report_from_json(nlohmann::json::parse(text))).dump() == text);
  }
  const auto j = to_json(analyze(kSpeckled, quick()));
  CHECK(j.at("ga92").is_null());
  CHECK(j.at("rho").at("method") == "closed_form");
  CHECK(j.at("summary").at("kind") == "MeasureRho");
  CHECK_FALSE(format_text(analyze(kStable, quick())).empty());
}

TEST_CASE("cli ga92 and rho") {
  const Run g = run(cmd("ga92", kStable));
  CHECK(g.code == cli::kExitOk);
  CHECK(g.out == "status Stable\nm 2\nk 2\n");
  const Run w = run(cmd("ga92", kPeriod3));
  CHECK(w.code == cli::kExitOk);
  CHECK(w.out.find("status InstabilityWitness\n") == 0);
  CHECK(w.out.find("witness_period 3\n") != std::string::npos);

  const Run bad = run(cmd("ga92", kSpeckled));
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find("regime") != std::string::npos);

  const Run r = run(cmd("rho", kSpeckled, {"--samples", "500", "--seed", "3"}));
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("closed_form 0.37194496689379") == 0);
  CHECK(r.out.find("samples 500\n") != std::string::npos);
  CHECK(run(cmd("rho", kSpeckled, {"--samples", "500", "--seed", "3"})).out == r.out);
  CHECK(run(cmd("rho", kStable, {"--samples", "100"})).out.find("closed_form n/a\n") == 0);
}

TEST_CASE("cli lambda and analyze") {
  const Run l = run(cmd("lambda", kStable, {"--theta0", "1", "--iters", "200000"}));
  CHECK(l.code == cli::kExitOk);
  std::istringstream in(l.out);
  std::string key;
  double value = 0;
  in >> key >> value;
  CHECK(key == "lambda_hat");
  CHECK(value == doctest::Approx(-0.16).epsilon(0.1));
  CHECK(l.out.find("n_used 199000\n") != std::string::npos);

  const Run a = run(cmd("analyze", kSpeckled, {"--json", "--samples", "2000"}));
  REQUIRE(a.code == cli::kExitOk);
  const AnalysisReport parsed = report_from_json(nlohmann::json::parse(a.out));
  AnalyzeOptions opt;
  opt.rho_samples = 2000;
  CHECK(parsed == analyze(kSpeckled, opt));
  CHECK(run(cmd("analyze", kStable)).out.find("ExponentiallyStable") != std::string::npos);
}

TEST_CASE("cli file outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "pwlstab_test_cli";
  std::filesystem::create_directories(dir);
  const std::string h = (dir / "h.csv").string();
  CHECK(run(cmd("hist", kSpeckled, {"--iters", "20000", "--bins", "10", "--out", h})).code == 0);
  const std::string hs = slurp(h);
  CHECK(hs.rfind("bin,theta_lo,theta_hi,count,density\n", 0) == 0);
  CHECK(std::count(hs.begin(), hs.end(), '\n') == 11);

  const std::string pc = (dir / "p.csv").string();
  CHECK(run(cmd("polygons", kStable, {"--n", "3", "--kind", "omega", "--out", pc})).code == 0);
  CHECK(slurp(pc).rfind("generation,vertex_index,x,y\n0,0,0,0\n", 0) == 0);
  CHECK(run(cmd("polygons", kStable, {"--kind", "square", "--out", pc})).code == cli::kExitUsage);

  const std::vector<std::string> sweep{"sweep", "--mode", "measure", "--nx", "4", "--ny", "3",
                                       "--samples", "30", "--budget", "2000"};
  auto s1 = sweep, s2 = sweep;
  for (auto* s : {&s1, &s2}) {
    const std::string tag = s == &s1 ? "1" : "2";
    s->insert(s->end(), {"--out", (dir / ("s" + tag + ".csv")).string(), "--pgm",
                         (dir / ("s" + tag + ".pgm")).string(), "--threads", tag});
  }
  CHECK(run(s1).code == 0);
  CHECK(run(s2).code == 0);
  CHECK(slurp(dir / "s1.csv") == slurp(dir / "s2.csv"));
  CHECK(slurp(dir / "s1.pgm") == slurp(dir / "s2.pgm"));
  const std::string sc = slurp(dir / "s1.csv");
  CHECK(std::count(sc.begin(), sc.end(), '\n') == 13);

  const Run io = run(cmd("hist", kSpeckled, {"--iters", "100", "--out", "/nonexistent/dir/h.csv"}));
  CHECK(io.code == cli::kExitIo);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli usage errors") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run(cmd("ga92", kStable, {"--bogus"})).code == cli::kExitUsage);
  CHECK(run({"ga92", "--tl", "2"}).code == cli::kExitUsage);
  CHECK(run(cmd("rho", kSpeckled, {"--samples", "x"})).code == cli::kExitUsage);
  CHECK(run({"sweep", "--mode", "foo", "--out", "/tmp/x.csv"}).code == cli::kExitUsage);
  CHECK(run(cmd("analyze", NormalForm2D{1, 1, 1, 1})).code == cli::kExitUsage);
  const Run help = run({"--help"});
  CHECK(help.code == cli::kExitOk);
  CHECK(help.out.find("sweep") != std::string::npos);
}
