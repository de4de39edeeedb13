#include "momw1/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace momw1 {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_finite(std::span<const double> values, const char* msg) {
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument(msg);
}

std::vector<double> evaluate(const Sample& s, const std::function<double(const Point&)>& f) {
  std::vector<double> out;
  out.reserve(s.points.size());
  for (const Point& p : s.points) out.push_back(f(p));
  check_finite(out, "estimator: non-finite function value");
  return out;
}

}  // namespace

std::vector<double> block_means(std::span<const double> values,
                                const BlockAssignment& assignment) {
  std::vector<double> means;
  means.reserve(assignment.blocks.size());
  for (const auto& block : assignment.blocks) {
    require(!block.empty(), "block_means: empty block");
    CompensatedSum acc;
    for (int i : block) acc.add(values[i]);
    means.push_back(acc.value() / static_cast<double>(block.size()));
  }
  return means;
}

MomResult mom_with_assignment(std::span<const double> values, const BlockAssignment& assignment) {
  check_finite(values, "mom: non-finite function value");
  const std::vector<double> means = block_means(values, assignment);
  const size_t med = median_index(means);
  MomResult r;
  r.value = means[med];
  r.median_block_index = static_cast<int>(med);
  r.median_block = assignment.blocks[med];
  return r;
}

MomResult mom_from_values(std::span<const double> values, int k, uint64_t seed) {
  const auto assignment =
      assign_blocks(static_cast<int>(values.size()), BlockScheme::partition(k), seed);
  return mom_with_assignment(values, assignment);
}

MomResult mom_estimate(const Sample& sample, const std::function<double(const Point&)>& f, int k,
                       uint64_t seed) {
  return mom_from_values(evaluate(sample, f), k, seed);
}

MouResult mou_with_assignment(const Sample& x, const Sample& y,
                              const std::function<double(const Point&, const Point&)>& h,
                              const PairBlockAssignment& assignment) {
  const size_t blocks = assignment.block_count();
  require(blocks >= 1, "mou: empty block set");
  std::vector<double> stats(blocks);
  for (size_t b = 0; b < blocks; ++b) {
    const auto pairs = assignment.materialize(b);
    require(!pairs.empty(), "mou: empty pair block");
    CompensatedSum acc;
    for (const auto& [i, j] : pairs) acc.add(h(x.points[i], y.points[j]));
    stats[b] = acc.value() / static_cast<double>(pairs.size());
  }
  check_finite(stats, "mou: non-finite kernel value");
  const size_t med = median_index(stats);
  MouResult r;
  r.value = stats[med];
  r.median_pairs = assignment.materialize(med);
  r.median_block_id = assignment.explicit_pairs ? std::pair<int, int>{static_cast<int>(med), -1}
                                                : assignment.block_ids[med];
  return r;
}

MouResult mou_estimate(const Sample& x, const Sample& y,
                       const std::function<double(const Point&, const Point&)>& h, int k_x, int k_y,
                       PairSchemeKind scheme, uint64_t seed) {
  BlockScheme bs;
  switch (scheme) {
    case PairSchemeKind::Grid:
      bs = BlockScheme::grid_pairs(k_x, k_y);
      break;
    case PairSchemeKind::Diagonal:
      require(k_x == k_y, "mou: diagonal scheme requires k_x == k_y");
      bs = BlockScheme::diagonal_pairs(k_x);
      break;
    case PairSchemeKind::RandomizedPairs: {
      const int bx = x.n() / k_x;
      const int by = y.n() / k_y;
      require(bx >= 1 && by >= 1, "mou: block counts exceed sample sizes");
      bs = BlockScheme::randomized_pair_blocks(k_x * k_y, bx * by);
      break;
    }
  }
  return mou_with_assignment(x, y, h, assign_pair_blocks(x.n(), y.n(), bs, seed));
}

void EstimatorSpec::validate(int n, int m) const {
  require(k_x >= 1 && k_x <= n, "estimator spec: k_x out of range");
  require(k_y >= 1 && k_y <= m, "estimator spec: k_y out of range");
  if (kind == Kind::MoUDiag) require(k_x == k_y, "estimator spec: MoU-diag requires k_x == k_y");
  if (randomized && block_size > 0)
    require(block_size <= n && block_size <= m, "estimator spec: block_size out of range");
}

DualResult dual_objective(const Sample& x, const Sample& y, const CriticNet& critic,
                          const EstimatorSpec& spec, uint64_t seed) {
  spec.validate(x.n(), y.n());
  const auto phi = [&critic](const Point& p) { return critic.forward(p); };
  DualResult out;

  if (spec.kind == EstimatorSpec::Kind::MoM) {
    const auto style_x = spec.randomized
                             ? BlockScheme::randomized_swor(
                                   spec.k_x, spec.block_size > 0 ? spec.block_size : x.n() / spec.k_x)
                             : BlockScheme::partition(spec.k_x);
    const auto style_y = spec.randomized
                             ? BlockScheme::randomized_swor(
                                   spec.k_y, spec.block_size > 0 ? spec.block_size : y.n() / spec.k_y)
                             : BlockScheme::partition(spec.k_y);
    const auto mx =
        mom_with_assignment(evaluate(x, phi), assign_blocks(x.n(), style_x, mix_seed(seed, 0)));
    const auto my =
        mom_with_assignment(evaluate(y, phi), assign_blocks(y.n(), style_y, mix_seed(seed, 1)));
    out.value = mx.value - my.value;
    out.x_block = mx.median_block;
    out.y_block = my.median_block;
    return out;
  }

  const auto h = [&critic](const Point& a, const Point& b) {
    return critic.forward(a) - critic.forward(b);
  };
  PairSchemeKind scheme = spec.kind == EstimatorSpec::Kind::MoUDiag ? PairSchemeKind::Diagonal
                                                                    : PairSchemeKind::Grid;
  if (spec.randomized && spec.kind == EstimatorSpec::Kind::MoU)
    scheme = PairSchemeKind::RandomizedPairs;
  const auto r = mou_estimate(x, y, h, spec.k_x, spec.k_y, scheme, seed);
  out.value = r.value;
  out.pair_block = r.median_pairs;
  return out;
}

}  // namespace momw1
