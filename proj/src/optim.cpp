#include "momw1/optim.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace momw1 {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

enum class TrainerKind { MoM, MoUDiag, MoUGrid };

std::vector<double> forward_all(const CriticNet& net, const Sample& s) {
  std::vector<double> out;
  out.reserve(s.points.size());
  for (const Point& p : s.points) out.push_back(net.forward(p));
  return out;
}

void ensure_finite(std::span<const double> values, int iteration) {
  for (double v : values)
    if (!std::isfinite(v))
      throw DivergenceError("training diverged: non-finite critic output at iteration " +
                            std::to_string(iteration + 1));
}

std::vector<double> partition_means(const std::vector<double>& values,
                                    const BlockAssignment& assignment) {
  std::vector<double> means;
  means.reserve(assignment.blocks.size());
  for (const auto& block : assignment.blocks) {
    CompensatedSum acc;
    for (int i : block) acc.add(values[i]);
    means.push_back(acc.value() / static_cast<double>(block.size()));
  }
  return means;
}

struct FlatRms {
  RmsPropState state;
  explicit FlatRms(size_t dim, const TrainConfig& cfg)
      : state(RmsPropState::init(dim, cfg.rms_decay, cfg.rms_epsilon)) {}
};

void validate_config(const Sample& x, const Sample& y, const TrainConfig& cfg, TrainerKind kind) {
  require(cfg.n_iter >= 1, "train: n_iter must be >= 1");
  require(cfg.k_x >= 1 && cfg.k_x <= x.n(), "train: k_x out of range");
  require(cfg.k_y >= 1 && cfg.k_y <= y.n(), "train: k_y out of range");
  require(cfg.lr > 0.0 && cfg.clip_c > 0.0, "train: lr and clip_c must be > 0");
  require(cfg.hidden >= 1, "train: hidden must be >= 1");
  require(x.dim() == y.dim(), "train: sample dimensions differ");
  if (kind == TrainerKind::MoUDiag)
    require(cfg.k_x == cfg.k_y, "train: MoU-diag requires k_x == k_y");
  switch (kind) {
    case TrainerKind::MoM:
      require(cfg.scheme == BlockScheme::Kind::Partition ||
                  cfg.scheme == BlockScheme::Kind::RandomizedSWoR,
              "train: MoM supports Partition or RandomizedSWoR blocks");
      break;
    case TrainerKind::MoUDiag:
      require(cfg.scheme == BlockScheme::Kind::Partition ||
                  cfg.scheme == BlockScheme::Kind::DiagonalPairs,
              "train: MoU-diag uses diagonal partition blocks");
      break;
    case TrainerKind::MoUGrid:
      require(cfg.scheme == BlockScheme::Kind::Partition ||
                  cfg.scheme == BlockScheme::Kind::GridPairs ||
                  cfg.scheme == BlockScheme::Kind::RandomizedPairBlocks,
              "train: MoU supports grid or randomized pair blocks");
      break;
  }
}

// Shared iteration-seed protocol: every trainer draws the X partition from
// mix(seed, 2t) and the Y partition from mix(seed, 2t+1), so K=1 runs of the
// three trainers consume randomness identically and coincide bitwise.
RunReport train_core(const Sample& x, const Sample& y, const TrainConfig& cfg, TrainerKind kind,
                     CriticNet* out_net) {
  validate_config(x, y, cfg, kind);
  const auto t0 = std::chrono::steady_clock::now();

  CriticNet net = CriticNet::init(x.dim(), cfg.hidden, cfg.clip_c, mix_seed(cfg.seed, 0x7fffffff));
  FlatRms rms(net.param_count(), cfg);

  const bool randomized_pairs =
      kind == TrainerKind::MoUGrid && cfg.scheme == BlockScheme::Kind::RandomizedPairBlocks;
  const bool swor = kind == TrainerKind::MoM && cfg.scheme == BlockScheme::Kind::RandomizedSWoR;

  RunReport report;
  report.config = cfg;
  report.trace.reserve(cfg.n_iter);

  for (int t = 0; t < cfg.n_iter; ++t) {
    const uint64_t it = cfg.reshuffle ? static_cast<uint64_t>(t) : 0;
    const uint64_t seed_x = mix_seed(cfg.seed, 2 * it);
    const uint64_t seed_y = mix_seed(cfg.seed, 2 * it + 1);

    double objective = 0.0;
    std::vector<int> grad_x, grad_y;          // index sets feeding the gradient
    std::vector<std::pair<int, int>> grad_pairs;  // randomized-pairs variant

    if (randomized_pairs) {
      const int bx = x.n() / cfg.k_x;
      const int by = y.n() / cfg.k_y;
      const auto scheme = BlockScheme::randomized_pair_blocks(cfg.k_x * cfg.k_y, bx * by);
      const auto pa = assign_pair_blocks(x.n(), y.n(), scheme, seed_x);
      const auto phi_x = forward_all(net, x);
      const auto phi_y = forward_all(net, y);
      std::vector<double> stats(pa.pair_blocks.size());
      for (size_t b = 0; b < pa.pair_blocks.size(); ++b) {
        CompensatedSum acc;
        for (const auto& [i, j] : pa.pair_blocks[b]) acc.add(phi_x[i] - phi_y[j]);
        stats[b] = acc.value() / static_cast<double>(pa.pair_blocks[b].size());
      }
      ensure_finite(stats, t);
      const size_t med = median_index(stats);
      objective = stats[med];
      grad_pairs = pa.pair_blocks[med];
    } else {
      const auto ax = assign_blocks(
          x.n(),
          swor ? BlockScheme::randomized_swor(cfg.k_x, x.n() / cfg.k_x)
               : BlockScheme::partition(cfg.k_x),
          seed_x);
      const auto ay = assign_blocks(
          y.n(),
          swor ? BlockScheme::randomized_swor(cfg.k_y, y.n() / cfg.k_y)
               : BlockScheme::partition(cfg.k_y),
          seed_y);
      const auto phi_x = forward_all(net, x);
      const auto phi_y = forward_all(net, y);
      const auto means_x = partition_means(phi_x, ax);
      const auto means_y = partition_means(phi_y, ay);
      ensure_finite(means_x, t);
      ensure_finite(means_y, t);

      if (kind == TrainerKind::MoM) {
        const size_t mx = median_index(means_x);
        const size_t my = median_index(means_y);
        objective = means_x[mx] - means_y[my];
        grad_x = ax.blocks[mx];
        grad_y = ay.blocks[my];
      } else if (kind == TrainerKind::MoUDiag) {
        std::vector<double> stats(means_x.size());
        for (size_t k = 0; k < means_x.size(); ++k) stats[k] = means_x[k] - means_y[k];
        const size_t med = median_index(stats);
        objective = stats[med];
        grad_x = ax.blocks[med];
        grad_y = ay.blocks[med];
      } else {
        std::vector<double> stats(means_x.size() * means_y.size());
        for (size_t k = 0; k < means_x.size(); ++k)
          for (size_t l = 0; l < means_y.size(); ++l)
            stats[k * means_y.size() + l] = means_x[k] - means_y[l];
        const size_t med = median_index(stats);
        objective = stats[med];
        grad_x = ax.blocks[med / means_y.size()];
        grad_y = ay.blocks[med % means_y.size()];
      }
    }

    if (!std::isfinite(objective))
      throw DivergenceError("training diverged: non-finite objective at iteration " +
                            std::to_string(t + 1));

    // Gradient of the median-block objective. The floor(K/n)-style factors in
    // the printed algorithm are block-mean normalizations 1/B; a literal floor
    // would zero the gradient for every K < n.
    CriticGradient grad = CriticGradient::zeros(net);
    if (randomized_pairs) {
      const double w = 1.0 / static_cast<double>(grad_pairs.size());
      for (const auto& [i, j] : grad_pairs) {
        accumulate_grad(net, x.points[i], w, grad);
        accumulate_grad(net, y.points[j], -w, grad);
      }
    } else {
      const double wx = 1.0 / static_cast<double>(grad_x.size());
      const double wy = -1.0 / static_cast<double>(grad_y.size());
      for (int i : grad_x) accumulate_grad(net, x.points[i], wx, grad);
      for (int j : grad_y) accumulate_grad(net, y.points[j], wy, grad);
    }

    const auto update = rmsprop_step(rms.state, grad.flatten());
    CriticGradient shaped = CriticGradient::zeros(net);
    size_t off = 0;
    for (size_t i = 0; i < shaped.w1.size(); ++i) shaped.w1[i] = update[off++];
    for (size_t i = 0; i < shaped.b1.size(); ++i) shaped.b1[i] = update[off++];
    for (size_t i = 0; i < shaped.w2.size(); ++i) shaped.w2[i] = update[off++];
    shaped.b2 = update[off++];
    ascend(net, shaped, cfg.lr);
    net = clip_weights(net, cfg.clip_c, cfg.clip_biases);

    report.trace.push_back(
        {t + 1, static_cast<double>(t + 1) / static_cast<double>(cfg.k_x), objective});
  }

  const int window = std::max(1, cfg.n_iter / 20);
  CompensatedSum tail;
  for (int t = cfg.n_iter - window; t < cfg.n_iter; ++t) tail.add(report.trace[t].objective);
  report.final_estimate = tail.value() / window;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out_net) *out_net = net;
  return report;
}

}  // namespace

RmsPropState RmsPropState::init(size_t dim, double decay, double epsilon) {
  require(decay > 0.0 && decay < 1.0, "rmsprop: decay must be in (0, 1)");
  require(epsilon > 0.0, "rmsprop: epsilon must be > 0");
  RmsPropState s;
  s.mean_square.assign(dim, 0.0);
  s.decay = decay;
  s.epsilon = epsilon;
  return s;
}

std::vector<double> rmsprop_step(RmsPropState& state, std::span<const double> grad) {
  require(grad.size() == state.mean_square.size(), "rmsprop: shape mismatch");
  std::vector<double> update(grad.size());
  for (size_t i = 0; i < grad.size(); ++i) {
    state.mean_square[i] = state.decay * state.mean_square[i] + (1.0 - state.decay) * grad[i] * grad[i];
    update[i] = grad[i] / (std::sqrt(state.mean_square[i]) + state.epsilon);
  }
  return update;
}

RunReport train_w_mom(const Sample& x, const Sample& y, const TrainConfig& cfg) {
  return train_core(x, y, cfg, TrainerKind::MoM, nullptr);
}
RunReport train_w_mou_diag(const Sample& x, const Sample& y, const TrainConfig& cfg) {
  return train_core(x, y, cfg, TrainerKind::MoUDiag, nullptr);
}
RunReport train_w_mou(const Sample& x, const Sample& y, const TrainConfig& cfg) {
  return train_core(x, y, cfg, TrainerKind::MoUGrid, nullptr);
}
RunReport train_w_mom(const Sample& x, const Sample& y, const TrainConfig& cfg,
                      CriticNet* out_net) {
  return train_core(x, y, cfg, TrainerKind::MoM, out_net);
}
RunReport train_w_mou_diag(const Sample& x, const Sample& y, const TrainConfig& cfg,
                           CriticNet* out_net) {
  return train_core(x, y, cfg, TrainerKind::MoUDiag, out_net);
}
RunReport train_w_mou(const Sample& x, const Sample& y, const TrainConfig& cfg,
                      CriticNet* out_net) {
  return train_core(x, y, cfg, TrainerKind::MoUGrid, out_net);
}

std::string train_config_json(const TrainConfig& cfg) {
  nlohmann::json j;
  j["n_iter"] = cfg.n_iter;
  j["k_x"] = cfg.k_x;
  j["k_y"] = cfg.k_y;
  j["lr"] = cfg.lr;
  j["clip_c"] = cfg.clip_c;
  j["hidden"] = cfg.hidden;
  j["seed"] = cfg.seed;
  j["reshuffle"] = cfg.reshuffle;
  j["rms_decay"] = cfg.rms_decay;
  j["rms_epsilon"] = cfg.rms_epsilon;
  j["clip_biases"] = cfg.clip_biases;
  return j.dump();
}

void write_run_report_csv(const RunReport& report, std::ostream& out) {
  out << "# " << train_config_json(report.config) << '\n';
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", report.final_estimate);
  out << "# {\"final_estimate\":" << buf << "}\n";
  out << "iteration,epoch,objective\n";
  for (const TracePoint& p : report.trace) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.objective);
    out << p.iteration << ',' << p.epoch << ',' << buf << '\n';
  }
}

}  // namespace momw1
