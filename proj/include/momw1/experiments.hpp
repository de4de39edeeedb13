#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "momw1/estimators.hpp"
#include "momw1/optim.hpp"
#include "momw1/sample.hpp"

namespace momw1 {

enum class ToyDataset { D1, D2 };

// D1: X = standard Gaussian contaminated with uniform-[-50,50]^2 outliers
// (isolated); D2: same with standard-Cauchy-shifted-by-25 outliers
// (aggregate). Y is always the clean N(5*1, I2) sample; only X carries
// contamination.
Sample make_toy_x(ToyDataset dataset, int n, double tau, uint64_t seed);
Sample make_toy_y(int n, uint64_t seed);

struct SweepSpec {
  ToyDataset dataset = ToyDataset::D1;
  EstimatorSpec::Kind estimator = EstimatorSpec::Kind::MoUDiag;
  std::vector<double> taus;
  std::vector<int> ks;
  int repeats = 20;
  uint64_t base_seed = 0;
  int epochs = kDefaultEpochs;
  int n = 500;
  TrainConfig train;  // lr / clip / hidden template; k and seed filled per cell

  void validate() const;
};

struct SweepRow {
  std::string dataset;
  std::string estimator;
  double tau = 0.0;
  int k = 0;
  int repeat = 0;
  uint64_t seed = 0;
  double abs_error = 0.0;
};

struct SweepSummaryRow {
  std::string dataset;
  std::string estimator;
  double tau = 0.0;
  int k = 0;
  double mean = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepSummaryRow> summary;
};

// For each (tau, K, repeat): train the estimator on the contaminated pair and
// report |final - clean reference|, where the clean reference is the tau=0,
// K=1 run retrained per repeat seed.
SweepResult run_k_sweep(const SweepSpec& spec);

void write_sweep_csv(const SweepResult& result, std::ostream& raw, std::ostream& summary);

struct ConvergenceSpec {
  ToyDataset dataset = ToyDataset::D1;
  EstimatorSpec::Kind estimator = EstimatorSpec::Kind::MoUDiag;
  double tau = 0.0;
  std::vector<int> ks;
  int repeats = 5;
  uint64_t base_seed = 0;
  int epochs = kDefaultEpochs;
  int n = 500;
  TrainConfig train;
};

struct ConvergenceRow {
  int k = 0;
  int epoch = 0;
  double objective_mean = 0.0;  // over repeats, averaged within the epoch
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  uint64_t base_seed = 0;
};

// Objective traces aligned on epochs (K iterations = one epoch).
ConvergenceResult run_convergence(const ConvergenceSpec& spec);

void write_convergence_csv(const ConvergenceResult& result, std::ostream& out);

struct RateSpec {
  std::vector<int> ns;
  double tau = 0.1;  // 0 = clean K=1 baseline; >0 caps the sub-linear outlier growth
  int repeats = 5;
  uint64_t base_seed = 0;
};

struct RateRow {
  int n = 0;
  int repeat = 0;
  uint64_t seed = 0;
  double error = 0.0;
};

struct RateResult {
  std::vector<RateRow> rows;
  std::vector<double> mean_errors;  // aligned with spec.ns
  double loglog_slope = 0.0;
};

// Statistical-rate trace without the neural surrogate: partition the
// contaminated X into K = recommended_k blocks, keep the middle half of the
// blocks ranked by distance-to-center witness, and report
// |exact_w1(kept X, clean Y) - sqrt(50)| per n.
RateResult run_rate_trace(const RateSpec& spec);

void write_rate_csv(const RateSpec& spec, const RateResult& result, std::ostream& raw,
                    std::ostream& summary);

// Kendall rank correlation between 1..k and the (negated) sequence; used by
// the trend checks.
double kendall_tau_against_order(const std::vector<double>& values);

double quantile(std::vector<double> values, double q);

const char* dataset_name(ToyDataset d);
const char* estimator_name(EstimatorSpec::Kind k);

RunReport train_with(EstimatorSpec::Kind kind, const Sample& x, const Sample& y,
                     const TrainConfig& cfg);

}  // namespace momw1
