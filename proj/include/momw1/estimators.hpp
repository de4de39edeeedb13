#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "momw1/blocking.hpp"
#include "momw1/critic.hpp"
#include "momw1/sample.hpp"

namespace momw1 {

// One block's statistic: the block mean of the evaluated function (or kernel).
struct BlockStatistic {
  int block_index = 0;
  int block_index2 = -1;  // second axis for pair schemes
  double value = 0.0;
};

struct MomResult {
  double value = 0.0;
  std::vector<int> median_block;  // indices of the winning block
  int median_block_index = 0;
};

struct MouResult {
  double value = 0.0;
  std::vector<std::pair<int, int>> median_pairs;  // index pairs of the winning block
  std::pair<int, int> median_block_id{0, 0};
};

enum class PairSchemeKind { Grid, Diagonal, RandomizedPairs };

// Per-block compensated means of precomputed values.
std::vector<double> block_means(std::span<const double> values, const BlockAssignment& assignment);

// Median-of-means over a frozen assignment (deterministic, used by tests and
// by the training loops, which manage their own reshuffling).
MomResult mom_with_assignment(std::span<const double> values, const BlockAssignment& assignment);

MomResult mom_from_values(std::span<const double> values, int k, uint64_t seed);

MomResult mom_estimate(const Sample& sample, const std::function<double(const Point&)>& f, int k,
                       uint64_t seed);

// Median of block U-statistics of kernel h over the scheme's pair blocks.
MouResult mou_with_assignment(const Sample& x, const Sample& y,
                              const std::function<double(const Point&, const Point&)>& h,
                              const PairBlockAssignment& assignment);

MouResult mou_estimate(const Sample& x, const Sample& y,
                       const std::function<double(const Point&, const Point&)>& h, int k_x, int k_y,
                       PairSchemeKind scheme, uint64_t seed);

// Which W1 estimator to evaluate, with its block counts. The randomized
// variants swap the partitions for SWoR blocks (MoM) or the pair grid for
// sampled pairs (MoU).
struct EstimatorSpec {
  enum class Kind { MoM, MoU, MoUDiag };

  Kind kind = Kind::MoM;
  int k_x = 1;
  int k_y = 1;
  bool randomized = false;
  int block_size = 0;       // randomized MoM; 0 -> n / k_x
  int pairs_per_block = 0;  // randomized MoU; 0 -> (n/k_x)*(m/k_y)

  void validate(int n, int m) const;
};

struct DualResult {
  double value = 0.0;
  std::vector<int> x_block, y_block;                 // MoM median blocks
  std::vector<std::pair<int, int>> pair_block;       // MoU winning block
};

// The inner objective of Definition-3 style estimators for a fixed critic:
// MoM_X[phi] - MoM_Y[phi], or the MoU / MoU-diag median of block U-statistics
// of h_phi(x, y) = phi(x) - phi(y). Its supremum over critics is the W1
// estimate; the training loops in optim.hpp chase that supremum.
DualResult dual_objective(const Sample& x, const Sample& y, const CriticNet& critic,
                          const EstimatorSpec& spec, uint64_t seed);

}  // namespace momw1
