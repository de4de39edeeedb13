#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "momw1/blocking.hpp"
#include "momw1/critic.hpp"
#include "momw1/sample.hpp"

namespace momw1 {

// Elementwise RMSProp accumulator over a flat parameter vector.
struct RmsPropState {
  std::vector<double> mean_square;
  double decay = 0.9;
  double epsilon = 1e-8;

  static RmsPropState init(size_t dim, double decay = 0.9, double epsilon = 1e-8);
};

// accumulator <- decay*accumulator + (1-decay)*grad^2;
// update = grad / (sqrt(accumulator) + epsilon). The caller applies
// w <- w + lr * update (ascent for the critic, descent for a generator).
std::vector<double> rmsprop_step(RmsPropState& state, std::span<const double> grad);

constexpr double kDefaultLr = 1e-3;
constexpr double kDefaultClip = 0.01;
constexpr int kDefaultHidden = 64;
constexpr int kDefaultEpochs = 300;

struct TrainConfig {
  int n_iter = 0;  // total iterations; see iters_for_epochs
  int k_x = 1;
  int k_y = 1;
  BlockScheme::Kind scheme = BlockScheme::Kind::Partition;
  double lr = kDefaultLr;
  double clip_c = kDefaultClip;
  int hidden = kDefaultHidden;
  uint64_t seed = 0;
  bool reshuffle = true;  // fresh partition every iteration
  double rms_decay = 0.9;
  double rms_epsilon = 1e-8;
  bool clip_biases = false;
};

// One epoch = one full gradient pass over the dataset = k_x iterations.
inline int iters_for_epochs(int epochs, int k) { return epochs * k; }

struct TracePoint {
  int iteration = 0;  // 1-based
  double epoch = 0.0;
  double objective = 0.0;
};

struct RunReport {
  std::vector<TracePoint> trace;
  double final_estimate = 0.0;  // mean objective over the last max(1, n_iter/20) iterations
  TrainConfig config;
  double wall_time_s = 0.0;
};

// Algorithm: per iteration, (re)partition, pick the median block(s) of the
// critic block means, take a gradient ascent step on the median block(s)
// with RMSProp, and clip the weights.
//
// Seed protocol (part of the determinism contract): the critic is initialized
// from mix_seed(seed, 0x7fffffff); iteration t partitions X with
// mix_seed(seed, 2t) and Y with mix_seed(seed, 2t+1) (t frozen at 0 when
// reshuffle is off). All three trainers share it, so K=1 runs coincide
// bitwise across estimators.
RunReport train_w_mom(const Sample& x, const Sample& y, const TrainConfig& cfg);
RunReport train_w_mou_diag(const Sample& x, const Sample& y, const TrainConfig& cfg);
RunReport train_w_mou(const Sample& x, const Sample& y, const TrainConfig& cfg);

// Same loops but also returning the trained critic (the CLI serializes it).
RunReport train_w_mom(const Sample& x, const Sample& y, const TrainConfig& cfg, CriticNet* out_net);
RunReport train_w_mou_diag(const Sample& x, const Sample& y, const TrainConfig& cfg,
                           CriticNet* out_net);
RunReport train_w_mou(const Sample& x, const Sample& y, const TrainConfig& cfg, CriticNet* out_net);

// CSV: `iteration,epoch,objective` with the config echoed as '#'-prefixed
// JSON header lines.
void write_run_report_csv(const RunReport& report, std::ostream& out);

std::string train_config_json(const TrainConfig& cfg);

}  // namespace momw1
