#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "momw1/experiments.hpp"
#include "momw1/plot.hpp"
#include "test_util.hpp"

using namespace momw1;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "momw1_test_out";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("toy dataset builders") {
  const Sample x1 = make_toy_x(ToyDataset::D1, 200, 0.1, 1);
  CHECK(x1.outlier_count() == 20);
  for (int i = 0; i < x1.n(); ++i)
    if (!x1.inlier_mask[i])
      for (double v : x1.points[i]) CHECK(std::abs(v) <= 50.0);

  const Sample x2 = make_toy_x(ToyDataset::D2, 200, 0.1, 1);
  CHECK(x2.outlier_count() == 20);

  const Sample y = make_toy_y(100, 2);
  CHECK(y.outlier_count() == 0);
  CHECK(y.dim() == 2);
}

TEST_CASE("quantile and kendall helpers") {
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.0) == 1.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 1.0) == 4.0);
  CHECK(kendall_tau_against_order({4.0, 3.0, 2.0, 1.0}) == 1.0);
  CHECK(kendall_tau_against_order({1.0, 2.0, 3.0, 4.0}) == -1.0);
  CHECK(kendall_tau_against_order({2.0, 2.0}) == 0.0);
}

TEST_CASE("k-sweep: rows are complete, summaries consistent, reruns bitwise") {
  SweepSpec spec;
  spec.taus = {0.0, 0.1};
  spec.ks = {1, 4};
  spec.repeats = 2;
  spec.epochs = 3;
  spec.n = 40;
  spec.base_seed = 5;
  const SweepResult a = run_k_sweep(spec);
  CHECK(a.rows.size() == 2 * 2 * 2);
  for (const auto& r : a.rows) CHECK(r.abs_error >= 0.0);
  CHECK(a.summary.size() == 4);
  for (const auto& s : a.summary) CHECK(s.q25 <= s.q75);

  const SweepResult b = run_k_sweep(spec);
  std::stringstream raw_a, sum_a, raw_b, sum_b;
  write_sweep_csv(a, raw_a, sum_a);
  write_sweep_csv(b, raw_b, sum_b);
  CHECK(raw_a.str() == raw_b.str());
  CHECK(sum_a.str() == sum_b.str());
  CHECK(raw_a.str().find("dataset,estimator,tau,k,repeat,seed,abs_error") == 0);
}

TEST_CASE("convergence rows align on epochs") {
  ConvergenceSpec spec;
  spec.ks = {1, 5};
  spec.repeats = 2;
  spec.epochs = 4;
  spec.n = 30;
  spec.tau = 0.0;
  spec.base_seed = 6;
  const ConvergenceResult r = run_convergence(spec);
  CHECK(r.rows.size() == 2 * 4);
  int k1_rows = 0;
  for (const auto& row : r.rows) {
    CHECK(row.epoch >= 1);
    CHECK(row.epoch <= 4);
    if (row.k == 1) ++k1_rows;
  }
  CHECK(k1_rows == 4);
  std::stringstream out;
  write_convergence_csv(r, out);
  CHECK(out.str().find("k,epoch,objective_mean") != std::string::npos);
}

TEST_CASE("rate trace produces positive errors and a finite slope") {
  RateSpec spec;
  spec.ns = {60, 120};
  spec.tau = 0.1;
  spec.repeats = 2;
  spec.base_seed = 7;
  const RateResult r = run_rate_trace(spec);
  CHECK(r.rows.size() == 4);
  for (const auto& row : r.rows) CHECK(row.error >= 0.0);
  CHECK(r.mean_errors.size() == 2);
  CHECK(std::isfinite(r.loglog_slope));

  // tau = 0 is the clean K = 1 baseline: full sample against the reference.
  RateSpec clean = spec;
  clean.tau = 0.0;
  const RateResult rc = run_rate_trace(clean);
  for (const auto& row : rc.rows) CHECK(row.error >= 0.0);

  CHECK_THROWS_AS(run_rate_trace(RateSpec{{100, 50}, 0.1, 1, 0}), std::invalid_argument);
}

TEST_CASE("sweep plots: one svg per dataset, empty csv rejected") {
  const auto dir = temp_dir();
  const auto csv = dir / "sweep_summary.csv";
  {
    std::ofstream out(csv);
    out << "dataset,estimator,tau,k,mean,q25,q75\n";
    out << "d1,mou-diag,0,1,0.5,0.4,0.6\n";
    out << "d1,mou-diag,0,10,0.3,0.2,0.4\n";
    out << "d2,mou-diag,0,1,0.7,0.6,0.8\n";
    out << "d2,mou-diag,0,10,0.2,0.1,0.3\n";
  }
  const auto written = plot_sweep_summary(csv.string(), dir.string());
  REQUIRE(written.size() == 2);
  for (const auto& p : written) {
    const std::string svg = slurp(p);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
  }

  const auto empty_csv = dir / "empty.csv";
  {
    std::ofstream out(empty_csv);
    out << "dataset,estimator,tau,k,mean,q25,q75\n";
  }
  const auto out_svg = dir / "should_not_exist.svg";
  CHECK_THROWS_AS(plot_sweep_summary(empty_csv.string(), (dir / "nope").string()),
                  std::invalid_argument);
  CHECK(!std::filesystem::exists(out_svg));
}

TEST_CASE("convergence plot labels every K curve") {
  const auto dir = temp_dir();
  const auto csv = dir / "convergence.csv";
  {
    std::ofstream out(csv);
    out << "k,epoch,objective_mean\n";
    for (int k : {1, 10, 50, 100})
      for (int e = 1; e <= 3; ++e)
        out << k << ',' << e << ',' << 0.01 * k + 0.001 * e << '\n';
  }
  const auto written = plot_convergence(csv.string(), dir.string());
  REQUIRE(written.size() == 1);
  const std::string svg = slurp(written[0]);
  for (const char* label : {"K=1", "K=10", "K=50", "K=100"})
    CHECK(svg.find(label) != std::string::npos);
}

TEST_CASE("rate plot consumes the summary csv") {
  const auto dir = temp_dir();
  const auto csv = dir / "rate_summary.csv";
  {
    std::ofstream out(csv);
    out << "# {\"loglog_slope\":-0.5}\n";
    out << "n,mean_error\n200,0.5\n500,0.3\n1000,0.2\n";
  }
  const auto written = plot_rate(csv.string(), dir.string());
  REQUIRE(written.size() == 1);
  CHECK(slurp(written[0]).rfind("<svg", 0) == 0);
}
