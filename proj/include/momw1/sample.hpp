#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "momw1/common.hpp"

namespace momw1 {

// A labeled point cloud: inliers drawn from the nominal distribution plus
// injected outliers. Immutable after construction by convention.
struct Sample {
  std::vector<Point> points;
  std::vector<uint8_t> inlier_mask;  // 1 = inlier, 0 = outlier
  double tau = 0.0;                  // fraction of outliers, in [0, 0.5)

  int n() const { return static_cast<int>(points.size()); }
  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  int outlier_count() const;
  std::vector<Point> inlier_points() const;

  // Enforces the type invariants; throws std::invalid_argument on violation.
  void validate() const;
};

struct ContaminationSpec {
  enum class Kind { None, IsolatedUniform, AggregateCauchyShift };

  Kind kind = Kind::None;
  Point low, high;  // IsolatedUniform box
  Point shift;      // AggregateCauchyShift offset
  double tau = 0.0;

  static ContaminationSpec none();
  static ContaminationSpec isolated_uniform(Point low, Point high, double tau);
  static ContaminationSpec aggregate_cauchy(Point shift, double tau);

  void validate(int dim) const;
};

// Gaussian inliers with identity covariance around `mean`.
struct InlierSpec {
  Point mean;
  int n = 0;

  void validate() const;
};

// Draws round(tau*n) outliers and n - round(tau*n) inliers, shuffles the
// concatenation, and returns the labeled sample. Deterministic given seed.
Sample generate_sample(const InlierSpec& inliers, const ContaminationSpec& contamination,
                       uint64_t seed);

// W1 between N(0, I2) and N(5*1, I2): translates of the same measure, so the
// distance is the norm of the mean shift, sqrt(50).
double true_w1_reference();

// CSV with header x0,...,x{d-1},is_inlier; floats printed with 17 significant
// digits so a read-back is bit exact.
void write_sample_csv(const Sample& sample, std::ostream& out);
Sample read_sample_csv(std::istream& in);
void write_sample_csv_file(const Sample& sample, const std::string& path);
Sample read_sample_csv_file(const std::string& path);

}  // namespace momw1
