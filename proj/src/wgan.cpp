#include "momw1/wgan.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "momw1/blocking.hpp"
#include "momw1/exact_ot.hpp"

namespace momw1 {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Generator Generator::init(int latent_dim, int hidden, int out_dim, uint64_t seed) {
  require(latent_dim >= 1 && hidden >= 1 && out_dim >= 1, "generator: dimensions must be >= 1");
  Rng rng(seed);
  Generator g;
  g.latent_dim = latent_dim;
  g.hidden = hidden;
  g.out_dim = out_dim;
  g.w1.resize(static_cast<size_t>(hidden) * latent_dim);
  g.b1.assign(hidden, 0.0);
  g.w2.resize(static_cast<size_t>(out_dim) * hidden);
  g.b2.assign(out_dim, 0.0);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(latent_dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& w : g.w1) w = rng.uniform(-s1, s1);
  for (double& w : g.w2) w = rng.uniform(-s2, s2);
  return g;
}

Point Generator::forward(std::span<const double> z) const {
  require(static_cast<int>(z.size()) == latent_dim, "generator: latent dimension mismatch");
  std::vector<double> h(hidden);
  for (int t = 0; t < hidden; ++t) {
    double pre = b1[t];
    const double* row = &w1[static_cast<size_t>(t) * latent_dim];
    for (int j = 0; j < latent_dim; ++j) pre += row[j] * z[j];
    h[t] = pre > 0.0 ? pre : 0.0;
  }
  Point out(out_dim);
  for (int o = 0; o < out_dim; ++o) {
    double v = b2[o];
    const double* row = &w2[static_cast<size_t>(o) * hidden];
    for (int t = 0; t < hidden; ++t) v += row[t] * h[t];
    out[o] = v;
  }
  return out;
}

std::vector<Point> Generator::sample(int n, uint64_t seed) const {
  Rng rng(seed);
  std::vector<Point> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Point z(latent_dim);
    for (double& v : z) v = rng.gaussian();
    out.push_back(forward(z));
  }
  return out;
}

GeneratorGradient GeneratorGradient::zeros(const Generator& gen) {
  GeneratorGradient g;
  g.w1.assign(gen.w1.size(), 0.0);
  g.b1.assign(gen.b1.size(), 0.0);
  g.w2.assign(gen.w2.size(), 0.0);
  g.b2.assign(gen.b2.size(), 0.0);
  return g;
}

std::vector<double> GeneratorGradient::flatten() const {
  std::vector<double> flat;
  flat.reserve(w1.size() + b1.size() + w2.size() + b2.size());
  flat.insert(flat.end(), w1.begin(), w1.end());
  flat.insert(flat.end(), b1.begin(), b1.end());
  flat.insert(flat.end(), w2.begin(), w2.end());
  flat.insert(flat.end(), b2.begin(), b2.end());
  return flat;
}

double generator_loss(const Generator& gen, const CriticNet& critic, std::span<const Point> zs) {
  require(!zs.empty(), "generator loss: empty batch");
  CompensatedSum acc;
  for (const Point& z : zs) acc.add(critic.forward(gen.forward(z)));
  return -acc.value() / static_cast<double>(zs.size());
}

GeneratorGradient generator_loss_grad(const Generator& gen, const CriticNet& critic,
                                      std::span<const Point> zs) {
  require(!zs.empty(), "generator loss: empty batch");
  GeneratorGradient g = GeneratorGradient::zeros(gen);
  const double scale = -1.0 / static_cast<double>(zs.size());

  std::vector<double> h(gen.hidden), pre(gen.hidden), dh(gen.hidden);
  for (const Point& z : zs) {
    for (int t = 0; t < gen.hidden; ++t) {
      double p = gen.b1[t];
      const double* row = &gen.w1[static_cast<size_t>(t) * gen.latent_dim];
      for (int j = 0; j < gen.latent_dim; ++j) p += row[j] * z[j];
      pre[t] = p;
      h[t] = p > 0.0 ? p : 0.0;
    }
    Point out(gen.out_dim);
    for (int o = 0; o < gen.out_dim; ++o) {
      double v = gen.b2[o];
      const double* row = &gen.w2[static_cast<size_t>(o) * gen.hidden];
      for (int t = 0; t < gen.hidden; ++t) v += row[t] * h[t];
      out[o] = v;
    }

    const Point dout_raw = input_gradient(critic, out);  // d f / d out
    std::fill(dh.begin(), dh.end(), 0.0);
    for (int o = 0; o < gen.out_dim; ++o) {
      const double dout = scale * dout_raw[o];
      g.b2[o] += dout;
      double* w2row = &g.w2[static_cast<size_t>(o) * gen.hidden];
      const double* w2src = &gen.w2[static_cast<size_t>(o) * gen.hidden];
      for (int t = 0; t < gen.hidden; ++t) {
        w2row[t] += dout * h[t];
        dh[t] += dout * w2src[t];
      }
    }
    for (int t = 0; t < gen.hidden; ++t) {
      if (pre[t] <= 0.0) continue;
      g.b1[t] += dh[t];
      double* w1row = &g.w1[static_cast<size_t>(t) * gen.latent_dim];
      for (int j = 0; j < gen.latent_dim; ++j) w1row[j] += dh[t] * z[j];
    }
  }
  return g;
}

void GanConfig::validate() const {
  require(batch_size >= 1 && k_blocks >= 1 && batch_size >= k_blocks,
          "gan: requires batch_size >= k_blocks >= 1");
  require(n_critic >= 1, "gan: n_critic must be >= 1");
  require(latent_dim >= 1 && max_generator_steps >= 1, "gan: invalid sizes");
  require(lr > 0.0 && gen_lr > 0.0 && clip_c > 0.0, "gan: rates must be > 0");
}

std::pair<Generator, RunReport> train_momwgan(const Sample& data, const GanConfig& cfg,
                                              const GanStepCallback& on_step) {
  cfg.validate();
  data.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int d = data.dim();

  CriticNet critic = CriticNet::init(d, cfg.critic_hidden, cfg.clip_c, mix_seed(cfg.seed, 1));
  Generator gen = Generator::init(cfg.latent_dim, cfg.gen_hidden, d, mix_seed(cfg.seed, 2));
  RmsPropState critic_rms = RmsPropState::init(critic.param_count());
  RmsPropState gen_rms = RmsPropState::init(gen.param_count());
  Rng rng(mix_seed(cfg.seed, 3));

  RunReport report;
  report.config.n_iter = cfg.max_generator_steps;
  report.config.k_x = cfg.k_blocks;
  report.config.k_y = 1;
  report.config.lr = cfg.lr;
  report.config.clip_c = cfg.clip_c;
  report.config.hidden = cfg.critic_hidden;
  report.config.seed = cfg.seed;
  report.trace.reserve(cfg.max_generator_steps);

  const int b = cfg.batch_size;
  std::vector<Point> real(b), fake(b), zs(b);

  for (int step = 0; step < cfg.max_generator_steps; ++step) {
    double objective = 0.0;
    for (int t = 0; t < cfg.n_critic; ++t) {
      for (int i = 0; i < b; ++i)
        real[i] = data.points[rng.below(static_cast<uint64_t>(data.n()))];
      for (int i = 0; i < b; ++i) {
        Point z(cfg.latent_dim);
        for (double& v : z) v = rng.gaussian();
        fake[i] = gen.forward(z);
      }

      // Median-of-means on the real mini-batch only; the generated side keeps
      // the plain mean (its contamination structure is unknown). k_blocks == 1
      // bypasses the blocking machinery entirely, so it is the plain WGAN
      // critic step, bit for bit.
      std::vector<double> phi_real(b);
      for (int i = 0; i < b; ++i) phi_real[i] = critic.forward(real[i]);
      std::vector<int> median_block;
      double real_term = 0.0;
      if (cfg.k_blocks == 1) {
        CompensatedSum acc;
        for (double v : phi_real) acc.add(v);
        real_term = acc.value() / static_cast<double>(b);
        median_block.resize(b);
        for (int i = 0; i < b; ++i) median_block[i] = i;
      } else {
        const auto blocks = assign_blocks(b, BlockScheme::partition(cfg.k_blocks), rng.raw());
        std::vector<double> means;
        means.reserve(cfg.k_blocks);
        for (const auto& blk : blocks.blocks) {
          CompensatedSum acc;
          for (int i : blk) acc.add(phi_real[i]);
          means.push_back(acc.value() / static_cast<double>(blk.size()));
        }
        for (double v : means)
          if (!std::isfinite(v))
            throw DivergenceError("momwgan diverged: non-finite block mean at step " +
                                  std::to_string(step + 1));
        const size_t med = median_index(means);
        real_term = means[med];
        median_block = blocks.blocks[med];
      }
      CompensatedSum fake_mean;
      for (int i = 0; i < b; ++i) fake_mean.add(critic.forward(fake[i]));
      objective = real_term - fake_mean.value() / static_cast<double>(b);
      if (!std::isfinite(objective))
        throw DivergenceError("momwgan diverged: non-finite critic objective at step " +
                              std::to_string(step + 1));

      CriticGradient grad = CriticGradient::zeros(critic);
      const double wr = 1.0 / static_cast<double>(median_block.size());
      for (int i : median_block) accumulate_grad(critic, real[i], wr, grad);
      const double wf = -1.0 / static_cast<double>(b);
      for (int i = 0; i < b; ++i) accumulate_grad(critic, fake[i], wf, grad);

      const auto update = rmsprop_step(critic_rms, grad.flatten());
      size_t off = 0;
      for (size_t p = 0; p < critic.w1.size(); ++p) critic.w1[p] += cfg.lr * update[off++];
      for (size_t p = 0; p < critic.b1.size(); ++p) critic.b1[p] += cfg.lr * update[off++];
      for (size_t p = 0; p < critic.w2.size(); ++p) critic.w2[p] += cfg.lr * update[off++];
      critic.b2 += cfg.lr * update[off++];
      critic = clip_weights(critic, cfg.clip_c);
    }

    for (int i = 0; i < b; ++i) {
      Point z(cfg.latent_dim);
      for (double& v : z) v = rng.gaussian();
      zs[i] = std::move(z);
    }
    const auto ggrad = generator_loss_grad(gen, critic, zs);
    if (!std::isfinite(generator_loss(gen, critic, zs)))
      throw DivergenceError("momwgan diverged: non-finite generator loss at step " +
                            std::to_string(step + 1));
    const auto gupdate = rmsprop_step(gen_rms, ggrad.flatten());
    size_t off = 0;
    for (size_t p = 0; p < gen.w1.size(); ++p) gen.w1[p] -= cfg.gen_lr * gupdate[off++];
    for (size_t p = 0; p < gen.b1.size(); ++p) gen.b1[p] -= cfg.gen_lr * gupdate[off++];
    for (size_t p = 0; p < gen.w2.size(); ++p) gen.w2[p] -= cfg.gen_lr * gupdate[off++];
    for (size_t p = 0; p < gen.b2.size(); ++p) gen.b2[p] -= cfg.gen_lr * gupdate[off++];

    report.trace.push_back({step + 1, static_cast<double>(step + 1), objective});
    if (on_step) on_step(step + 1, gen);
  }

  const int window = std::max(1, cfg.max_generator_steps / 20);
  CompensatedSum tail;
  for (int t = cfg.max_generator_steps - window; t < cfg.max_generator_steps; ++t)
    tail.add(report.trace[t].objective);
  report.final_estimate = tail.value() / window;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(gen), std::move(report)};
}

GeneratorScores score_generator(const Generator& gen, const Sample& reference_inliers, int n_gen,
                                uint64_t seed) {
  require(n_gen >= 100, "score_generator: n_gen must be >= 100");
  const auto generated = gen.sample(n_gen, seed);
  const auto inliers = reference_inliers.inlier_points();
  require(!inliers.empty(), "score_generator: reference has no inliers");

  const int d = gen.out_dim;
  Point gen_mean(d, 0.0), ref_mean(d, 0.0);
  for (const Point& p : generated)
    for (int j = 0; j < d; ++j) gen_mean[j] += p[j];
  for (double& v : gen_mean) v /= generated.size();
  for (const Point& p : inliers)
    for (int j = 0; j < d; ++j) ref_mean[j] += p[j];
  for (double& v : ref_mean) v /= inliers.size();

  GeneratorScores s;
  s.mean_error = euclidean_distance(gen_mean, ref_mean);
  const size_t sub = std::min<size_t>(generated.size(), 500);
  std::vector<Point> subset(generated.begin(), generated.begin() + sub);
  s.w1_to_inliers = exact_w1(subset, inliers);
  return s;
}

}  // namespace momw1
