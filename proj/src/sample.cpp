#include "momw1/sample.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace momw1 {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int Sample::outlier_count() const {
  int c = 0;
  for (uint8_t m : inlier_mask) c += (m == 0);
  return c;
}

std::vector<Point> Sample::inlier_points() const {
  std::vector<Point> out;
  for (size_t i = 0; i < points.size(); ++i)
    if (inlier_mask[i]) out.push_back(points[i]);
  return out;
}

void Sample::validate() const {
  require(n() >= 1, "sample: n must be >= 1");
  require(dim() >= 1, "sample: d must be >= 1");
  require(inlier_mask.size() == points.size(), "sample: mask length mismatch");
  require(tau >= 0.0 && tau < 0.5, "sample: tau must be in [0, 0.5)");
  const size_t d = points.front().size();
  for (const Point& p : points) {
    require(p.size() == d, "sample: inconsistent point dimension");
    for (double v : p) require(std::isfinite(v), "sample: non-finite coordinate");
  }
  const long expected = std::lround(tau * n());
  require(outlier_count() == expected, "sample: outlier count != round(tau*n)");
  require(2 * outlier_count() < n(), "sample: outliers must be a strict minority");
}

ContaminationSpec ContaminationSpec::none() { return {}; }

ContaminationSpec ContaminationSpec::isolated_uniform(Point low, Point high, double tau) {
  ContaminationSpec s;
  s.kind = Kind::IsolatedUniform;
  s.low = std::move(low);
  s.high = std::move(high);
  s.tau = tau;
  return s;
}

ContaminationSpec ContaminationSpec::aggregate_cauchy(Point shift, double tau) {
  ContaminationSpec s;
  s.kind = Kind::AggregateCauchyShift;
  s.shift = std::move(shift);
  s.tau = tau;
  return s;
}

void ContaminationSpec::validate(int dim) const {
  require(tau >= 0.0 && tau < 0.5, "contamination: tau must be in [0, 0.5)");
  switch (kind) {
    case Kind::None:
      break;
    case Kind::IsolatedUniform:
      require(low.size() == static_cast<size_t>(dim) && high.size() == static_cast<size_t>(dim),
              "contamination: box dimension mismatch");
      for (int j = 0; j < dim; ++j)
        require(low[j] < high[j], "contamination: requires low < high component-wise");
      break;
    case Kind::AggregateCauchyShift:
      require(shift.size() == static_cast<size_t>(dim), "contamination: shift dimension mismatch");
      break;
  }
}

void InlierSpec::validate() const {
  require(n >= 1, "inliers: n must be >= 1");
  require(!mean.empty(), "inliers: mean must be non-empty");
}

Sample generate_sample(const InlierSpec& inliers, const ContaminationSpec& contamination,
                       uint64_t seed) {
  inliers.validate();
  const int d = static_cast<int>(inliers.mean.size());
  contamination.validate(d);

  const int n = inliers.n;
  const int n_out =
      contamination.kind == ContaminationSpec::Kind::None
          ? 0
          : static_cast<int>(std::lround(contamination.tau * n));
  require(2 * n_out < n, "generate_sample: round(tau*n) must be < n/2");

  Rng rng(seed);
  Sample s;
  s.tau = contamination.kind == ContaminationSpec::Kind::None ? 0.0 : contamination.tau;
  s.points.reserve(n);
  s.inlier_mask.reserve(n);

  for (int i = 0; i < n - n_out; ++i) {
    Point p(d);
    for (int j = 0; j < d; ++j) p[j] = inliers.mean[j] + rng.gaussian();
    s.points.push_back(std::move(p));
    s.inlier_mask.push_back(1);
  }
  for (int i = 0; i < n_out; ++i) {
    Point p(d);
    for (int j = 0; j < d; ++j) {
      if (contamination.kind == ContaminationSpec::Kind::IsolatedUniform)
        p[j] = rng.uniform(contamination.low[j], contamination.high[j]);
      else
        p[j] = contamination.shift[j] + rng.cauchy();
    }
    s.points.push_back(std::move(p));
    s.inlier_mask.push_back(0);
  }

  // Shuffle points and labels together so blocks are never aligned with the
  // contamination by construction.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  Sample out;
  out.tau = s.tau;
  out.points.reserve(n);
  out.inlier_mask.reserve(n);
  for (int i : order) {
    out.points.push_back(std::move(s.points[i]));
    out.inlier_mask.push_back(s.inlier_mask[i]);
  }
  out.validate();
  return out;
}

double true_w1_reference() { return std::sqrt(50.0); }

void write_sample_csv(const Sample& sample, std::ostream& out) {
  sample.validate();
  const int d = sample.dim();
  for (int j = 0; j < d; ++j) out << 'x' << j << ',';
  out << "is_inlier\n";
  for (int i = 0; i < sample.n(); ++i) {
    for (int j = 0; j < d; ++j) out << format_double(sample.points[i][j]) << ',';
    out << (sample.inlier_mask[i] ? 1 : 0) << '\n';
  }
}

Sample read_sample_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("sample csv: empty input");
  int d = 0;
  {
    std::stringstream header(line);
    std::string col;
    while (std::getline(header, col, ',')) {
      if (col == "is_inlier") break;
      ++d;
    }
  }
  if (d < 1) throw std::invalid_argument("sample csv: no coordinate columns");

  Sample s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    Point p(d);
    for (int j = 0; j < d; ++j) {
      if (!std::getline(row, cell, ',')) throw std::invalid_argument("sample csv: short row");
      p[j] = std::strtod(cell.c_str(), nullptr);
    }
    if (!std::getline(row, cell, ',')) throw std::invalid_argument("sample csv: missing label");
    s.points.push_back(std::move(p));
    s.inlier_mask.push_back(cell.front() == '1');
  }
  if (s.points.empty()) throw std::invalid_argument("sample csv: no rows");
  s.tau = static_cast<double>(s.outlier_count()) / s.n();
  s.validate();
  return s;
}

void write_sample_csv_file(const Sample& sample, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  write_sample_csv(sample, out);
}

Sample read_sample_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open for reading: " + path);
  return read_sample_csv(in);
}

}  // namespace momw1
