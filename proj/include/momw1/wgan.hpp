#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "momw1/critic.hpp"
#include "momw1/optim.hpp"
#include "momw1/sample.hpp"

namespace momw1 {

// One-hidden-layer ReLU generator mapping latent z in R^p to R^d. Unclipped;
// only the critic carries the Lipschitz constraint.
struct Generator {
  int latent_dim = 0;
  int hidden = 0;
  int out_dim = 0;
  std::vector<double> w1;  // hidden x latent_dim
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // out_dim x hidden
  std::vector<double> b2;  // out_dim

  static Generator init(int latent_dim, int hidden, int out_dim, uint64_t seed);
  Point forward(std::span<const double> z) const;
  size_t param_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }

  // n points from g(Z), Z ~ N(0, I_p).
  std::vector<Point> sample(int n, uint64_t seed) const;
};

struct GeneratorGradient {
  std::vector<double> w1, b1, w2, b2;
  static GeneratorGradient zeros(const Generator& gen);
  std::vector<double> flatten() const;
};

// Generator loss through a frozen critic: -(1/b) sum f_w(g_theta(Z_j)).
double generator_loss(const Generator& gen, const CriticNet& critic, std::span<const Point> zs);
GeneratorGradient generator_loss_grad(const Generator& gen, const CriticNet& critic,
                                      std::span<const Point> zs);

struct GanConfig {
  // Batch 20 with K_X = 4 gives MoM blocks of 5; at tau = 0.1 an outlier-free
  // block is then the majority case, which is what lets the median reject the
  // contaminated mini-batch fraction.
  int batch_size = 20;
  int n_critic = 5;
  int k_blocks = 1;  // K_X = 1 recovers the plain WGAN critic loss
  double lr = kDefaultLr;
  double gen_lr = 5e-3;
  double clip_c = kDefaultClip;
  int latent_dim = 2;
  int max_generator_steps = 2000;
  uint64_t seed = 0;
  int critic_hidden = kDefaultHidden;
  int gen_hidden = 32;

  void validate() const;
};

// Algorithm: alternate n_critic critic updates (median-of-means over the real
// mini-batch, plain mean over the generated batch) with one RMSProp descent
// step on the generator. The report trace holds the critic objective per
// generator step. `on_step`, when set, is invoked after every generator step.
//
// Seed protocol: critic init from mix_seed(seed, 1), generator init from
// mix_seed(seed, 2); a single stream seeded with mix_seed(seed, 3) then feeds,
// per critic step, b real indices, b*latent_dim latent gaussians and (only
// when k_blocks > 1) one raw partition seed, and per generator step
// b*latent_dim latent gaussians. k_blocks == 1 is therefore the plain WGAN
// loop, bit for bit.
using GanStepCallback = std::function<void(int step, const Generator& gen)>;
std::pair<Generator, RunReport> train_momwgan(const Sample& data, const GanConfig& cfg,
                                              const GanStepCallback& on_step = nullptr);

struct GeneratorScores {
  double mean_error = 0.0;    // || generated mean - inlier mean ||
  double w1_to_inliers = 0.0; // exact W1, generated subsample (<= 500) vs inliers
};

GeneratorScores score_generator(const Generator& gen, const Sample& reference_inliers, int n_gen,
                                uint64_t seed);

}  // namespace momw1
