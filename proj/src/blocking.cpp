#include "momw1/blocking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace momw1 {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// k distinct indices from [0, n) via partial Fisher-Yates on a scratch pool.
std::vector<int> sample_without_rejection(std::vector<int>& pool, int k, Rng& rng) {
  const size_t n = pool.size();
  std::vector<int> out(k);
  for (int t = 0; t < k; ++t) {
    const size_t j = t + rng.below(n - t);
    std::swap(pool[t], pool[j]);
    out[t] = pool[t];
  }
  return out;
}

}  // namespace

BlockScheme BlockScheme::partition(int k) {
  BlockScheme s;
  s.kind = Kind::Partition;
  s.k = k;
  return s;
}

BlockScheme BlockScheme::randomized_swor(int k, int block_size) {
  BlockScheme s;
  s.kind = Kind::RandomizedSWoR;
  s.k = k;
  s.block_size = block_size;
  return s;
}

BlockScheme BlockScheme::diagonal_pairs(int k) {
  BlockScheme s;
  s.kind = Kind::DiagonalPairs;
  s.k = k;
  return s;
}

BlockScheme BlockScheme::grid_pairs(int k_x, int k_y) {
  BlockScheme s;
  s.kind = Kind::GridPairs;
  s.k = k_x;
  s.k_y = k_y;
  return s;
}

BlockScheme BlockScheme::randomized_pair_blocks(int k, int pairs_per_block) {
  BlockScheme s;
  s.kind = Kind::RandomizedPairBlocks;
  s.k = k;
  s.pairs_per_block = pairs_per_block;
  return s;
}

std::vector<std::pair<int, int>> PairBlockAssignment::materialize(size_t b) const {
  if (explicit_pairs) return pair_blocks.at(b);
  const auto [kx, ky] = block_ids.at(b);
  const auto& bx = x.blocks.at(kx);
  const auto& by = y.blocks.at(ky);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(bx.size() * by.size());
  for (int i : bx)
    for (int j : by) pairs.emplace_back(i, j);
  return pairs;
}

BlockAssignment assign_blocks(int n, const BlockScheme& scheme, uint64_t seed) {
  require(n >= 1, "assign_blocks: n must be >= 1");
  require(scheme.k >= 1, "assign_blocks: k must be >= 1");
  Rng rng(seed);
  BlockAssignment a;

  switch (scheme.kind) {
    case BlockScheme::Kind::Partition: {
      require(scheme.k <= n, "assign_blocks: partition needs k <= n");
      std::vector<int> idx(n);
      for (int i = 0; i < n; ++i) idx[i] = i;
      rng.shuffle(idx);
      const int b = n / scheme.k;
      a.dropped = n - b * scheme.k;
      a.blocks.resize(scheme.k);
      for (int kblk = 0; kblk < scheme.k; ++kblk)
        a.blocks[kblk].assign(idx.begin() + kblk * b, idx.begin() + (kblk + 1) * b);
      return a;
    }
    case BlockScheme::Kind::RandomizedSWoR: {
      require(scheme.block_size >= 1 && scheme.block_size <= n,
              "assign_blocks: SWoR needs 1 <= block_size <= n");
      std::vector<int> pool(n);
      for (int i = 0; i < n; ++i) pool[i] = i;
      a.blocks.resize(scheme.k);
      for (int kblk = 0; kblk < scheme.k; ++kblk)
        a.blocks[kblk] = sample_without_rejection(pool, scheme.block_size, rng);
      return a;
    }
    default:
      throw std::invalid_argument("assign_blocks: pair scheme passed to single-sample overload");
  }
}

PairBlockAssignment assign_pair_blocks(int n, int m, const BlockScheme& scheme, uint64_t seed) {
  require(n >= 1 && m >= 1, "assign_pair_blocks: sizes must be >= 1");
  PairBlockAssignment pa;

  switch (scheme.kind) {
    case BlockScheme::Kind::DiagonalPairs: {
      require(scheme.k_y == 0 || scheme.k_y == scheme.k,
              "assign_pair_blocks: diagonal requires k_x == k_y");
      const int k = scheme.k;
      pa.x = assign_blocks(n, BlockScheme::partition(k), mix_seed(seed, 0));
      pa.y = assign_blocks(m, BlockScheme::partition(k), mix_seed(seed, 1));
      pa.block_ids.reserve(k);
      for (int t = 0; t < k; ++t) pa.block_ids.emplace_back(t, t);
      return pa;
    }
    case BlockScheme::Kind::GridPairs: {
      const int kx = scheme.k;
      const int ky = scheme.ky();
      pa.x = assign_blocks(n, BlockScheme::partition(kx), mix_seed(seed, 0));
      pa.y = assign_blocks(m, BlockScheme::partition(ky), mix_seed(seed, 1));
      pa.block_ids.reserve(static_cast<size_t>(kx) * ky);
      for (int kk = 0; kk < kx; ++kk)
        for (int ll = 0; ll < ky; ++ll) pa.block_ids.emplace_back(kk, ll);
      return pa;
    }
    case BlockScheme::Kind::RandomizedPairBlocks: {
      require(scheme.pairs_per_block >= 1, "assign_pair_blocks: pairs_per_block must be >= 1");
      const uint64_t grid = static_cast<uint64_t>(n) * static_cast<uint64_t>(m);
      require(static_cast<uint64_t>(scheme.pairs_per_block) <= grid,
              "assign_pair_blocks: pairs_per_block exceeds the pair grid");
      Rng rng(seed);
      pa.explicit_pairs = true;
      pa.pair_blocks.resize(scheme.k);
      // Uniform without replacement inside each block (Floyd's algorithm on
      // pair ids); blocks may overlap each other.
      for (int kblk = 0; kblk < scheme.k; ++kblk) {
        std::vector<uint64_t> chosen;
        chosen.reserve(scheme.pairs_per_block);
        for (uint64_t t = grid - scheme.pairs_per_block; t < grid; ++t) {
          uint64_t r = rng.below(t + 1);
          if (std::find(chosen.begin(), chosen.end(), r) != chosen.end()) r = t;
          chosen.push_back(r);
        }
        auto& blk = pa.pair_blocks[kblk];
        blk.reserve(chosen.size());
        for (uint64_t id : chosen)
          blk.emplace_back(static_cast<int>(id / m), static_cast<int>(id % m));
      }
      return pa;
    }
    default:
      throw std::invalid_argument("assign_pair_blocks: single-sample scheme passed");
  }
}

int recommended_k(int n, double tau) {
  require(n >= 1, "recommended_k: n must be >= 1");
  require(tau >= 0.0 && tau < 0.5, "recommended_k: tau must be in [0, 0.5)");
  const double raw = std::ceil(std::sqrt(2.0 * tau) * n);
  const int k = static_cast<int>(raw);
  return std::clamp(k, 1, n);
}

double combined_tau_tilde(double tau_x, double tau_y) {
  require(tau_x >= 0.0 && tau_x < 0.5, "combined_tau_tilde: tau_x must be in [0, 0.5)");
  require(tau_y >= 0.0 && tau_y < 0.5, "combined_tau_tilde: tau_y must be in [0, 0.5)");
  return tau_x + tau_y - tau_x * tau_y;
}

size_t median_index(std::span<const double> values) {
  require(!values.empty(), "median_index: empty list");
  for (double v : values) require(std::isfinite(v), "median_index: non-finite value");
  const size_t m = (values.size() + 1) / 2;  // ceil(K/2), 1-based rank
  std::vector<double> scratch(values.begin(), values.end());
  std::nth_element(scratch.begin(), scratch.begin() + (m - 1), scratch.end());
  const double med = scratch[m - 1];
  for (size_t i = 0; i < values.size(); ++i)
    if (values[i] == med) return i;
  throw std::logic_error("median_index: median value not found");  // unreachable
}

double median_value(std::span<const double> values) {
  return values[median_index(values)];
}

}  // namespace momw1
