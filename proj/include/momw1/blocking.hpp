#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "momw1/common.hpp"

namespace momw1 {

// One of the Figure-1 style block constructions. `k` is the number of blocks
// per sample; pair schemes use `k` for the X axis and `k_y` (0 = same as k)
// for the Y axis.
struct BlockScheme {
  enum class Kind { Partition, RandomizedSWoR, DiagonalPairs, GridPairs, RandomizedPairBlocks };

  Kind kind = Kind::Partition;
  int k = 1;
  int k_y = 0;
  int block_size = 0;       // RandomizedSWoR: indices per block
  int pairs_per_block = 0;  // RandomizedPairBlocks: pairs per block

  static BlockScheme partition(int k);
  static BlockScheme randomized_swor(int k, int block_size);
  static BlockScheme diagonal_pairs(int k);
  static BlockScheme grid_pairs(int k_x, int k_y);
  static BlockScheme randomized_pair_blocks(int k, int pairs_per_block);

  int ky() const { return k_y > 0 ? k_y : k; }
};

struct BlockAssignment {
  std::vector<std::vector<int>> blocks;
  int dropped = 0;
};

// Pair blocks over two samples. Product schemes (grid, diagonal) keep the
// factored form (one block id (k, l) per pair block) instead of materializing
// the K_X*K_Y index pairs; the explicit form is only used for randomized
// pair blocks.
struct PairBlockAssignment {
  BlockAssignment x;
  BlockAssignment y;
  std::vector<std::pair<int, int>> block_ids;                   // product schemes
  std::vector<std::vector<std::pair<int, int>>> pair_blocks;    // explicit scheme
  bool explicit_pairs = false;

  size_t block_count() const {
    return explicit_pairs ? pair_blocks.size() : block_ids.size();
  }
  // Index pairs of pair-block b (materialized on demand for product schemes).
  std::vector<std::pair<int, int>> materialize(size_t b) const;
};

// Single-sample block assignment (Partition or RandomizedSWoR). Partition
// shuffles the n indices before cutting contiguous chunks of floor(n/k) and
// drops the n mod k leftover.
BlockAssignment assign_blocks(int n, const BlockScheme& scheme, uint64_t seed);

// Two-sample pair-block assignment (DiagonalPairs, GridPairs,
// RandomizedPairBlocks).
PairBlockAssignment assign_pair_blocks(int n, int m, const BlockScheme& scheme, uint64_t seed);

// ceil(sqrt(2*tau) * n), clamped to [1, n].
int recommended_k(int n, double tau);

// tau_x + tau_y - tau_x*tau_y, the combined contamination level for MoU.
double combined_tau_tilde(double tau_x, double tau_y);

// Index of the lower median: the smallest original index holding the
// ceil(K/2)-th order statistic (1-based, ascending).
size_t median_index(std::span<const double> values);

double median_value(std::span<const double> values);

}  // namespace momw1
