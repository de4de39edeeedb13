#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "momw1/estimators.hpp"
#include "test_util.hpp"

using namespace momw1;

namespace {

Sample cloud_sample(std::vector<Point> pts) {
  Sample s;
  s.inlier_mask.assign(pts.size(), 1);
  s.points = std::move(pts);
  return s;
}

Sample sample_1d(std::vector<double> values) {
  std::vector<Point> pts;
  for (double v : values) pts.push_back({v});
  return cloud_sample(std::move(pts));
}

const auto identity1d = [](const Point& p) { return p[0]; };

// phi(x) = clamp(x, -10, 10) as a relu net: relu(x+10) - relu(x-10) - 10.
CriticNet clamp_critic() {
  CriticNet n;
  n.in_dim = 1;
  n.hidden = 2;
  n.w1 = {1.0, 1.0};
  n.b1 = {10.0, -10.0};
  n.w2 = {1.0, -1.0};
  n.b2 = -10.0;
  return n;
}

}  // namespace

TEST_CASE("mom with one block is the empirical mean") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(300));
    std::vector<double> values(n);
    for (double& v : values) v = 10.0 * rng.gaussian();
    const auto r = mom_from_values(values, 1, rng.raw());
    CHECK(r.value == doctest::Approx(testutil::naive_mean(values)).epsilon(1e-12));
    CHECK(r.median_block.size() == static_cast<size_t>(n));
  }
}

TEST_CASE("mom with k = n is the lower median of the values") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(50));
    std::vector<double> values(n);
    for (double& v : values) v = rng.gaussian();
    const auto r = mom_from_values(values, n, rng.raw());
    CHECK(r.value == testutil::naive_lower_median(values));
  }
}

TEST_CASE("four zero blocks outvote one huge block") {
  const Sample s = sample_1d({0.0, 0.0, 0.0, 0.0, 1000.0});
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = mom_estimate(s, identity1d, 5, seed);
    CHECK(r.value == 0.0);
    CHECK(r.median_block.size() == 1);
  }
}

TEST_CASE("mou with a single block is the complete two-sample U-statistic") {
  Rng rng(4);
  const auto h = [](const Point& a, const Point& b) { return a[0] * b[0] + a[1] - b[1]; };
  for (int trial = 0; trial < 10; ++trial) {
    const Sample x = cloud_sample(testutil::random_cloud(rng, 3 + rng.below(40), 2));
    const Sample y = cloud_sample(testutil::random_cloud(rng, 3 + rng.below(40), 2));
    const double expected = testutil::naive_u_statistic(x.points, y.points, h);
    for (auto scheme : {PairSchemeKind::Grid, PairSchemeKind::Diagonal}) {
      const auto r = mou_estimate(x, y, h, 1, 1, scheme, rng.raw());
      CHECK(r.value == doctest::Approx(expected).epsilon(1e-12));
      CHECK(r.median_pairs.size() == x.points.size() * y.points.size());
    }
  }
}

TEST_CASE("constant-phi kernels vanish for every scheme and k") {
  Rng rng(5);
  const auto h = [](const Point&, const Point&) { return 3.0 - 3.0; };
  const Sample x = cloud_sample(testutil::random_cloud(rng, 24, 2));
  const Sample y = cloud_sample(testutil::random_cloud(rng, 24, 2));
  for (int k : {1, 2, 4, 8})
    for (auto scheme :
         {PairSchemeKind::Grid, PairSchemeKind::Diagonal, PairSchemeKind::RandomizedPairs})
      CHECK(mou_estimate(x, y, h, k, k, scheme, rng.raw()).value == 0.0);
}

TEST_CASE("3x3 singleton grid matches brute-force enumeration") {
  const Sample x = sample_1d({0.0, 0.0, 10.0});
  const Sample y = sample_1d({0.0, 0.0, 0.0});
  const auto h = [](const Point& a, const Point& b) { return a[0] - b[0]; };
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = mou_estimate(x, y, h, 3, 3, PairSchemeKind::Grid, seed);
    // Nine singleton-block U-statistics: {0,0,10} repeated three times.
    CHECK(r.value == 0.0);
    CHECK(r.median_pairs.size() == 1);
  }
}

TEST_CASE("grid block statistics match a brute-force oracle on random data") {
  Rng rng(6);
  const auto h = [](const Point& a, const Point& b) { return std::sin(a[0]) - std::cos(b[0]); };
  for (int trial = 0; trial < 10; ++trial) {
    const Sample x = cloud_sample(testutil::random_cloud(rng, 12, 1));
    const Sample y = cloud_sample(testutil::random_cloud(rng, 8, 1));
    const uint64_t seed = rng.raw();
    const int kx = 3, ky = 2;
    const auto pa = assign_pair_blocks(x.n(), y.n(), BlockScheme::grid_pairs(kx, ky), seed);
    std::vector<double> oracle;
    for (size_t b = 0; b < pa.block_count(); ++b) {
      long double acc = 0.0L;
      const auto pairs = pa.materialize(b);
      for (const auto& [i, j] : pairs) acc += h(x.points[i], y.points[j]);
      oracle.push_back(static_cast<double>(acc / pairs.size()));
    }
    std::vector<double> sorted = oracle;
    std::sort(sorted.begin(), sorted.end());
    const double expected = sorted[(sorted.size() + 1) / 2 - 1];
    const auto r = mou_estimate(x, y, h, kx, ky, PairSchemeKind::Grid, seed);
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("dual objective: zero critic gives zero for all estimators") {
  Rng rng(7);
  const Sample x = cloud_sample(testutil::random_cloud(rng, 20, 2));
  const Sample y = cloud_sample(testutil::random_cloud(rng, 20, 2));
  CriticNet zero;
  zero.in_dim = 2;
  zero.hidden = 4;
  zero.w1.assign(8, 0.0);
  zero.b1.assign(4, 0.0);
  zero.w2.assign(4, 0.0);
  for (auto kind : {EstimatorSpec::Kind::MoM, EstimatorSpec::Kind::MoU, EstimatorSpec::Kind::MoUDiag}) {
    EstimatorSpec spec;
    spec.kind = kind;
    spec.k_x = spec.k_y = 4;
    CHECK(dual_objective(x, y, zero, spec, 9).value == 0.0);
  }
}

TEST_CASE("single-block collapse: the three estimators agree to machine precision") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Sample x = cloud_sample(testutil::random_cloud(rng, 30, 2));
    const Sample y = cloud_sample(testutil::random_cloud(rng, 17, 2));
    const CriticNet net = CriticNet::init(2, 16, 0.05, rng.raw());
    double values[3];
    int idx = 0;
    for (auto kind :
         {EstimatorSpec::Kind::MoM, EstimatorSpec::Kind::MoU, EstimatorSpec::Kind::MoUDiag}) {
      EstimatorSpec spec;
      spec.kind = kind;
      spec.k_x = spec.k_y = 1;
      values[idx++] = dual_objective(x, y, net, spec, 11).value;
    }
    CHECK(values[1] == doctest::Approx(values[0]).epsilon(1e-12));
    CHECK(values[2] == doctest::Approx(values[0]).epsilon(1e-12));
  }
}

TEST_CASE("clamp critic on a contaminated 1d pair, K_X=5, K_Y=1") {
  // X: nine zeros and one huge outlier; Y: ten ones. The outlier block is
  // discarded by the median, so the objective is 0 - 1 = -1.
  const Sample x = sample_1d({0, 0, 0, 0, 0, 0, 0, 0, 0, 100.0});
  const Sample y = sample_1d({1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  const CriticNet critic = clamp_critic();
  CHECK(critic.forward(Point{100.0}) == 10.0);
  CHECK(critic.forward(Point{0.0}) == 0.0);
  CHECK(critic.forward(Point{-25.0}) == -10.0);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    EstimatorSpec spec;
    spec.kind = EstimatorSpec::Kind::MoM;
    spec.k_x = 5;
    spec.k_y = 1;
    const auto r = dual_objective(x, y, critic, spec, seed);
    CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("translation covariance: f and f + c differ by exactly c") {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 10 + static_cast<int>(rng.below(200));
    std::vector<double> values(n);
    for (double& v : values) v = rng.gaussian();
    const double c = 3.25;
    std::vector<double> shifted(values);
    for (double& v : shifted) v += c;
    const int k = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(n)));
    const uint64_t seed = rng.raw();
    const auto r0 = mom_from_values(values, k, seed);
    const auto r1 = mom_from_values(shifted, k, seed);
    CHECK(r1.value - r0.value == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("robustness breakdown: value independent of corruption magnitude") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 4 + static_cast<int>(rng.below(20));
    const int b = k / 2 > 1 ? 1 + static_cast<int>(rng.below(k / 2 - 1)) : 0;
    if (b < 1) continue;
    const int block = 1 + static_cast<int>(rng.below(8));
    const int n = k * block;
    std::vector<double> base(n);
    for (double& v : base) v = rng.gaussian();
    std::vector<double> lo = base, hi = base;
    for (int c = 0; c < b; ++c) {
      lo[c] = 1e3;
      hi[c] = 1e9;
    }
    const uint64_t seed = rng.raw();
    CHECK(mom_from_values(lo, k, seed).value == mom_from_values(hi, k, seed).value);
  }
}

TEST_CASE("scale equivariance with a power-of-two factor is exact") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 10 + static_cast<int>(rng.below(100));
    std::vector<double> values(n);
    for (double& v : values) v = rng.gaussian();
    std::vector<double> scaled(values);
    for (double& v : scaled) v *= 4.0;
    const int k = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(n)));
    const uint64_t seed = rng.raw();
    const auto r0 = mom_from_values(values, k, seed);
    const auto r1 = mom_from_values(scaled, k, seed);
    CHECK(r1.value == 4.0 * r0.value);
    CHECK(r1.median_block == r0.median_block);  // argmedian invariance
  }
}

TEST_CASE("diagonal block statistics are a subset of the grid statistics") {
  Rng rng(13);
  const Sample x = cloud_sample(testutil::random_cloud(rng, 20, 2));
  const Sample y = cloud_sample(testutil::random_cloud(rng, 20, 2));
  const auto h = [](const Point& a, const Point& b) { return a[0] - b[0]; };
  const int k = 4;
  const uint64_t seed = 19;
  // Shared partitions: the diagonal blocks are the (t, t) grid entries.
  const auto grid_pa = assign_pair_blocks(x.n(), y.n(), BlockScheme::grid_pairs(k, k), seed);
  const auto diag_pa = assign_pair_blocks(x.n(), y.n(), BlockScheme::diagonal_pairs(k), seed);
  auto stat_of = [&](const PairBlockAssignment& pa, size_t b) {
    long double acc = 0.0L;
    const auto pairs = pa.materialize(b);
    for (const auto& [i, j] : pairs) acc += h(x.points[i], y.points[j]);
    return static_cast<double>(acc / pairs.size());
  };
  for (int t = 0; t < k; ++t)
    CHECK(stat_of(diag_pa, t) == stat_of(grid_pa, static_cast<size_t>(t) * k + t));
}

TEST_CASE("estimator errors propagate") {
  const Sample x = sample_1d({1, 2, 3});
  const Sample y = sample_1d({1, 2, 3});
  const auto bad = [](const Point&) { return std::nan(""); };
  CHECK_THROWS_AS(mom_estimate(x, bad, 1, 0), std::invalid_argument);
  EstimatorSpec spec;
  spec.kind = EstimatorSpec::Kind::MoUDiag;
  spec.k_x = 2;
  spec.k_y = 3;
  CHECK_THROWS_AS(spec.validate(3, 3), std::invalid_argument);
}
