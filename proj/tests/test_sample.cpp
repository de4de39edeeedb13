#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "momw1/sample.hpp"
#include "test_util.hpp"

using namespace momw1;

TEST_CASE("clean gaussian sample has no outliers and the right mean") {
  const Sample s = generate_sample({{5.0, 5.0}, 500}, ContaminationSpec::none(), 7);
  CHECK(s.n() == 500);
  CHECK(s.dim() == 2);
  CHECK(s.outlier_count() == 0);
  for (uint8_t m : s.inlier_mask) CHECK(m == 1);
  for (int j = 0; j < 2; ++j) {
    long double mean = 0.0L;
    for (const auto& p : s.points) mean += p[j];
    mean /= s.n();
    CHECK(std::abs(static_cast<double>(mean) - 5.0) < 3.0 / std::sqrt(500.0));
  }
}

TEST_CASE("isolated uniform contamination yields exactly round(tau*n) outliers") {
  const auto cont = ContaminationSpec::isolated_uniform({-50.0, -50.0}, {50.0, 50.0}, 0.1);
  const Sample s = generate_sample({{0.0, 0.0}, 500}, cont, 3);
  CHECK(s.outlier_count() == 50);
  CHECK(s.n() - s.outlier_count() == 450);
  for (int i = 0; i < s.n(); ++i)
    if (!s.inlier_mask[i])
      for (double v : s.points[i]) CHECK(std::abs(v) <= 50.0);
}

TEST_CASE("cauchy shift contamination clusters near the shift") {
  const auto cont = ContaminationSpec::aggregate_cauchy({25.0, 25.0}, 0.04);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Sample s = generate_sample({{0.0, 0.0}, 500}, cont, seed);
    CHECK(s.outlier_count() == 20);
    std::vector<double> coords;
    for (int i = 0; i < s.n(); ++i)
      if (!s.inlier_mask[i])
        for (double v : s.points[i]) coords.push_back(v);
    const double med = testutil::naive_lower_median(coords);
    CHECK(med >= 15.0);
    CHECK(med <= 35.0);
  }
}

TEST_CASE("generation is bit-reproducible") {
  const auto cont = ContaminationSpec::isolated_uniform({-50.0, -50.0}, {50.0, 50.0}, 0.2);
  const Sample a = generate_sample({{0.0, 0.0}, 137}, cont, 99);
  const Sample b = generate_sample({{0.0, 0.0}, 137}, cont, 99);
  REQUIRE(a.n() == b.n());
  for (int i = 0; i < a.n(); ++i) {
    CHECK(a.inlier_mask[i] == b.inlier_mask[i]);
    for (int j = 0; j < a.dim(); ++j) CHECK(a.points[i][j] == b.points[i][j]);
  }
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(generate_sample({{0.0}, 0}, ContaminationSpec::none(), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      generate_sample({{0.0}, 100}, ContaminationSpec::isolated_uniform({-1.0}, {1.0}, 0.5), 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      generate_sample({{0.0}, 100}, ContaminationSpec::isolated_uniform({1.0}, {-1.0}, 0.1), 1),
      std::invalid_argument);
  // round(0.45 * 10) = 5 outliers would not be a strict minority
  CHECK_THROWS_AS(
      generate_sample({{0.0}, 10}, ContaminationSpec::isolated_uniform({-1.0}, {1.0}, 0.45), 1),
      std::invalid_argument);
}

TEST_CASE("true W1 reference is sqrt(50)") {
  CHECK(true_w1_reference() == doctest::Approx(7.0710678118654755).epsilon(1e-12));
  CHECK(true_w1_reference() == std::sqrt(50.0));
}

TEST_CASE("csv round trip is bit exact, including heavy-tailed outliers") {
  const auto cont = ContaminationSpec::aggregate_cauchy({25.0, 25.0, 25.0}, 0.1);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const Sample s = generate_sample({{0.0, 0.0, 0.0}, 64}, cont, seed);
    std::stringstream buf;
    write_sample_csv(s, buf);
    const Sample back = read_sample_csv(buf);
    REQUIRE(back.n() == s.n());
    REQUIRE(back.dim() == s.dim());
    for (int i = 0; i < s.n(); ++i) {
      CHECK(back.inlier_mask[i] == s.inlier_mask[i]);
      for (int j = 0; j < s.dim(); ++j) CHECK(back.points[i][j] == s.points[i][j]);
    }
  }
}

TEST_CASE("csv reader rejects malformed input") {
  std::stringstream empty;
  CHECK_THROWS_AS(read_sample_csv(empty), std::invalid_argument);
  std::stringstream short_row("x0,x1,is_inlier\n1.0,2.0\n");
  CHECK_THROWS_AS(read_sample_csv(short_row), std::invalid_argument);
}
