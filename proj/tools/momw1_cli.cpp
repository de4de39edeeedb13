#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "momw1/exact_ot.hpp"
#include "momw1/experiments.hpp"
#include "momw1/optim.hpp"
#include "momw1/plot.hpp"
#include "momw1/sample.hpp"
#include "momw1/wgan.hpp"

namespace {

using namespace momw1;

struct GlobalOpts {
  uint64_t seed = 0;
  std::string out_dir = ".";
  int repeats = -1;  // -1: subcommand default
  bool fast = false;
};

ToyDataset parse_dataset(const std::string& name) {
  if (name == "d1") return ToyDataset::D1;
  if (name == "d2") return ToyDataset::D2;
  throw std::invalid_argument("unknown dataset (expected d1 or d2): " + name);
}

EstimatorSpec::Kind parse_estimator(const std::string& name) {
  if (name == "mom") return EstimatorSpec::Kind::MoM;
  if (name == "mou") return EstimatorSpec::Kind::MoU;
  if (name == "mou-diag") return EstimatorSpec::Kind::MoUDiag;
  throw std::invalid_argument("unknown estimator (expected mom, mou or mou-diag): " + name);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  return out;
}

void ensure_out_dir(const GlobalOpts& g) {
  std::filesystem::create_directories(g.out_dir);
}

struct TrainFlags {
  int epochs = kDefaultEpochs;
  double lr = kDefaultLr;
  double clip_c = kDefaultClip;
  int hidden = kDefaultHidden;
  bool clip_biases = false;
  bool no_reshuffle = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--epochs", epochs, "Training epochs (K iterations each)");
    cmd->add_option("--lr", lr, "RMSProp learning rate");
    cmd->add_option("--clip-c", clip_c, "Weight clipping parameter");
    cmd->add_option("--hidden", hidden, "Critic hidden width");
    cmd->add_flag("--clip-biases", clip_biases, "Clip biases as well as weights");
    cmd->add_flag("--no-reshuffle", no_reshuffle, "Freeze the partition across iterations");
  }

  TrainConfig to_config() const {
    TrainConfig cfg;
    cfg.lr = lr;
    cfg.clip_c = clip_c;
    cfg.hidden = hidden;
    cfg.clip_biases = clip_biases;
    cfg.reshuffle = !no_reshuffle;
    return cfg;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"momw1: outlier-robust Wasserstein-1 estimation (median-of-means critics)"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--seed", g.seed, "Master seed; every output derives from it");
  app.add_option("--out-dir", g.out_dir, "Directory for CSV / SVG outputs");
  app.add_option("--repeats", g.repeats, "Repetitions for sweep-k / convergence / rate-trace");
  app.add_flag("--fast", g.fast, "CI-friendly mode: repeats=3, epochs=50 unless overridden");

  // ---- gen-data ----------------------------------------------------------
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a toy dataset pair as CSV");
  std::string gd_dataset = "d1", gd_which = "both";
  double gd_tau = 0.1;
  int gd_n = 500;
  gen_cmd->add_option("--dataset", gd_dataset, "d1 (isolated outliers) or d2 (aggregate)");
  gen_cmd->add_option("--tau", gd_tau, "Outlier fraction on X (Y stays clean)");
  gen_cmd->add_option("--n", gd_n, "Points per sample");
  gen_cmd->add_option("--which", gd_which, "x, y or both");
  gen_cmd->callback([&] {
    ensure_out_dir(g);
    if (gd_which == "x" || gd_which == "both") {
      const auto x = make_toy_x(parse_dataset(gd_dataset), gd_n, gd_tau, mix_seed(g.seed, 1));
      write_sample_csv_file(x, g.out_dir + "/x.csv");
      std::cout << g.out_dir + "/x.csv" << '\n';
    }
    if (gd_which == "y" || gd_which == "both") {
      const auto y = make_toy_y(gd_n, mix_seed(g.seed, 2));
      write_sample_csv_file(y, g.out_dir + "/y.csv");
      std::cout << g.out_dir + "/y.csv" << '\n';
    }
  });

  // ---- estimate ----------------------------------------------------------
  auto* est_cmd = app.add_subcommand("estimate", "Train a critic and report the W1 estimate");
  std::string es_x, es_y, es_estimator = "mou-diag", es_report, es_critic;
  std::string es_blocks = "partition";
  int es_kx = 1, es_ky = 0;
  TrainFlags es_flags;
  est_cmd->add_option("--x", es_x, "X sample CSV")->required();
  est_cmd->add_option("--y", es_y, "Y sample CSV")->required();
  est_cmd->add_option("--estimator", es_estimator, "mom, mou or mou-diag");
  est_cmd->add_option("--kx", es_kx, "Blocks for X");
  est_cmd->add_option("--ky", es_ky, "Blocks for Y (default: same as --kx)");
  est_cmd->add_option("--blocks", es_blocks,
                      "partition (default) or randomized (SWoR blocks / sampled pair blocks)");
  est_cmd->add_option("--report", es_report, "Write the iteration trace CSV here");
  est_cmd->add_option("--save-critic", es_critic, "Write the trained critic JSON here");
  es_flags.attach(est_cmd);
  est_cmd->callback([&] {
    const Sample x = read_sample_csv_file(es_x);
    const Sample y = read_sample_csv_file(es_y);
    TrainConfig cfg = es_flags.to_config();
    cfg.k_x = es_kx;
    cfg.k_y = es_ky > 0 ? es_ky : es_kx;
    cfg.n_iter = iters_for_epochs(es_flags.epochs, cfg.k_x);
    cfg.seed = g.seed;
    const bool randomized = es_blocks == "randomized";
    if (!randomized && es_blocks != "partition")
      throw std::invalid_argument("unknown --blocks value: " + es_blocks);
    CriticNet net;
    const RunReport report = [&] {
      switch (parse_estimator(es_estimator)) {
        case EstimatorSpec::Kind::MoM:
          if (randomized) cfg.scheme = BlockScheme::Kind::RandomizedSWoR;
          return train_w_mom(x, y, cfg, &net);
        case EstimatorSpec::Kind::MoU:
          if (randomized) cfg.scheme = BlockScheme::Kind::RandomizedPairBlocks;
          return train_w_mou(x, y, cfg, &net);
        default:
          return train_w_mou_diag(x, y, cfg, &net);
      }
    }();
    if (!es_report.empty()) {
      auto out = open_out(es_report);
      write_run_report_csv(report, out);
    }
    if (!es_critic.empty()) open_out(es_critic) << net.to_json() << '\n';
    std::printf("%.12g\n", report.final_estimate);
  });

  // ---- exact -------------------------------------------------------------
  auto* exact_cmd = app.add_subcommand("exact", "Exact discrete W1 between two point CSVs");
  std::string ex_x, ex_y;
  exact_cmd->add_option("x_csv", ex_x, "X sample CSV")->required();
  exact_cmd->add_option("y_csv", ex_y, "Y sample CSV")->required();
  exact_cmd->callback([&] {
    const Sample x = read_sample_csv_file(ex_x);
    const Sample y = read_sample_csv_file(ex_y);
    std::printf("%.12g\n", exact_w1(x, y));
  });

  // ---- sweep-k -----------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep-k", "Error vs K over taus (Figure-2 style)");
  std::string sw_dataset = "d1", sw_estimator = "mou-diag";
  std::vector<double> sw_taus{0.0, 0.05, 0.1};
  std::vector<int> sw_ks{1, 2, 5, 10, 20, 50, 70, 100, 150, 224};
  int sw_n = 500;
  TrainFlags sw_flags;
  sweep_cmd->add_option("--dataset", sw_dataset, "d1 or d2");
  sweep_cmd->add_option("--estimator", sw_estimator, "mom, mou or mou-diag");
  sweep_cmd->add_option("--taus", sw_taus, "Outlier fractions for X")->delimiter(',');
  sweep_cmd->add_option("--ks", sw_ks, "Block counts to sweep")->delimiter(',');
  sweep_cmd->add_option("--n", sw_n, "Points per sample");
  sw_flags.attach(sweep_cmd);
  sweep_cmd->callback([&] {
    ensure_out_dir(g);
    SweepSpec spec;
    spec.dataset = parse_dataset(sw_dataset);
    spec.estimator = parse_estimator(sw_estimator);
    spec.taus = sw_taus;
    spec.ks = sw_ks;
    spec.n = sw_n;
    spec.base_seed = g.seed;
    spec.repeats = g.repeats > 0 ? g.repeats : (g.fast ? 3 : 20);
    spec.epochs = sweep_cmd->count("--epochs") ? sw_flags.epochs : (g.fast ? 50 : sw_flags.epochs);
    spec.train = sw_flags.to_config();
    const SweepResult result = run_k_sweep(spec);
    auto raw = open_out(g.out_dir + "/sweep_raw.csv");
    auto summary = open_out(g.out_dir + "/sweep_summary.csv");
    write_sweep_csv(result, raw, summary);
    std::cout << g.out_dir + "/sweep_raw.csv\n" << g.out_dir + "/sweep_summary.csv\n";
  });

  // ---- convergence -------------------------------------------------------
  auto* conv_cmd = app.add_subcommand("convergence", "Objective vs epoch per K (Figure-3 style)");
  std::string cv_dataset = "d1", cv_estimator = "mou-diag";
  double cv_tau = 0.0;
  std::vector<int> cv_ks{1, 10, 50, 100};
  int cv_n = 500;
  TrainFlags cv_flags;
  conv_cmd->add_option("--dataset", cv_dataset, "d1 or d2");
  conv_cmd->add_option("--estimator", cv_estimator, "mom, mou or mou-diag");
  conv_cmd->add_option("--tau", cv_tau, "Outlier fraction for X");
  conv_cmd->add_option("--ks", cv_ks, "Block counts")->delimiter(',');
  conv_cmd->add_option("--n", cv_n, "Points per sample");
  cv_flags.attach(conv_cmd);
  conv_cmd->callback([&] {
    ensure_out_dir(g);
    ConvergenceSpec spec;
    spec.dataset = parse_dataset(cv_dataset);
    spec.estimator = parse_estimator(cv_estimator);
    spec.tau = cv_tau;
    spec.ks = cv_ks;
    spec.n = cv_n;
    spec.base_seed = g.seed;
    spec.repeats = g.repeats > 0 ? g.repeats : (g.fast ? 3 : 5);
    spec.epochs = conv_cmd->count("--epochs") ? cv_flags.epochs : (g.fast ? 50 : cv_flags.epochs);
    spec.train = cv_flags.to_config();
    const ConvergenceResult result = run_convergence(spec);
    auto out = open_out(g.out_dir + "/convergence.csv");
    write_convergence_csv(result, out);
    std::cout << g.out_dir + "/convergence.csv\n";
  });

  // ---- rate-trace --------------------------------------------------------
  auto* rate_cmd = app.add_subcommand(
      "rate-trace", "Error of exact W1 on median-selected blocks as n grows");
  std::vector<int> rt_ns{200, 500, 1000, 2000};
  double rt_tau = 0.1;
  rate_cmd->add_option("--ns", rt_ns, "Sample sizes (increasing)")->delimiter(',');
  rate_cmd->add_option("--tau", rt_tau,
                       "0: clean K=1 baseline; >0: n_O = min(ceil(sqrt(n)), round(tau*n))");
  rate_cmd->callback([&] {
    ensure_out_dir(g);
    RateSpec spec;
    spec.ns = rt_ns;
    spec.tau = rt_tau;
    spec.repeats = g.repeats > 0 ? g.repeats : (g.fast ? 3 : 5);
    spec.base_seed = g.seed;
    const RateResult result = run_rate_trace(spec);
    auto raw = open_out(g.out_dir + "/rate_raw.csv");
    auto summary = open_out(g.out_dir + "/rate_summary.csv");
    write_rate_csv(spec, result, raw, summary);
    std::printf("loglog_slope %.6g\n", result.loglog_slope);
    std::cout << g.out_dir + "/rate_raw.csv\n" << g.out_dir + "/rate_summary.csv\n";
  });

  // ---- wgan-toy ----------------------------------------------------------
  auto* wgan_cmd = app.add_subcommand("wgan-toy", "2D MoMWGAN / WGAN training run");
  double wg_tau = 0.1;
  int wg_n = 500, wg_snapshot = 0;
  GanConfig wg_cfg;
  wgan_cmd->add_option("--tau", wg_tau, "Outlier fraction in the training data");
  wgan_cmd->add_option("--n", wg_n, "Training points");
  wgan_cmd->add_option("--k-blocks", wg_cfg.k_blocks, "MoM blocks inside each real mini-batch (1 = plain WGAN)");
  wgan_cmd->add_option("--batch", wg_cfg.batch_size, "Mini-batch size");
  wgan_cmd->add_option("--n-critic", wg_cfg.n_critic, "Critic steps per generator step");
  wgan_cmd->add_option("--gen-steps", wg_cfg.max_generator_steps, "Generator steps");
  wgan_cmd->add_option("--latent-dim", wg_cfg.latent_dim, "Latent dimension");
  wgan_cmd->add_option("--gen-hidden", wg_cfg.gen_hidden, "Generator hidden width");
  wgan_cmd->add_option("--critic-hidden", wg_cfg.critic_hidden, "Critic hidden width");
  wgan_cmd->add_option("--lr", wg_cfg.lr, "Critic RMSProp learning rate");
  wgan_cmd->add_option("--gen-lr", wg_cfg.gen_lr, "Generator RMSProp learning rate");
  wgan_cmd->add_option("--clip-c", wg_cfg.clip_c, "Critic clipping parameter");
  wgan_cmd->add_option("--snapshot-every", wg_snapshot,
                       "Write generated-points CSV every N generator steps (0 = off)");
  wgan_cmd->callback([&] {
    ensure_out_dir(g);
    // Training data: N((5,5), I2) inliers, optionally polluted with isolated
    // uniform outliers.
    InlierSpec inliers{{5.0, 5.0}, wg_n};
    const ContaminationSpec cont =
        wg_tau > 0.0 ? ContaminationSpec::isolated_uniform({-50.0, -50.0}, {50.0, 50.0}, wg_tau)
                     : ContaminationSpec::none();
    const Sample data = generate_sample(inliers, cont, mix_seed(g.seed, 11));
    wg_cfg.seed = g.seed;

    GanStepCallback on_step = nullptr;
    if (wg_snapshot > 0) {
      on_step = [&](int step, const Generator& gen) {
        if (step % wg_snapshot != 0) return;
        const auto pts = gen.sample(500, mix_seed(g.seed, 20000 + step));
        Sample snap;
        snap.points = pts;
        snap.inlier_mask.assign(pts.size(), 1);
        write_sample_csv_file(snap, g.out_dir + "/generated_step" + std::to_string(step) + ".csv");
      };
    }
    auto [gen, report] = train_momwgan(data, wg_cfg, on_step);
    auto out = open_out(g.out_dir + "/wgan_report.csv");
    write_run_report_csv(report, out);
    const auto scores = score_generator(gen, data, 10000, mix_seed(g.seed, 12));
    std::printf("mean_error %.6g\nw1_to_inliers %.6g\n", scores.mean_error, scores.w1_to_inliers);
    std::cout << g.out_dir + "/wgan_report.csv\n";
  });

  // ---- plot --------------------------------------------------------------
  auto* plot_cmd = app.add_subcommand("plot", "Render SVG plots from experiment CSVs");
  std::string pl_kind = "sweep", pl_csv;
  plot_cmd->add_option("--kind", pl_kind, "sweep, convergence or rate");
  plot_cmd->add_option("--csv", pl_csv, "Input CSV (sweep/rate: the summary file)")->required();
  plot_cmd->callback([&] {
    ensure_out_dir(g);
    std::vector<std::string> written;
    if (pl_kind == "sweep")
      written = plot_sweep_summary(pl_csv, g.out_dir);
    else if (pl_kind == "convergence")
      written = plot_convergence(pl_csv, g.out_dir);
    else if (pl_kind == "rate")
      written = plot_rate(pl_csv, g.out_dir);
    else
      throw std::invalid_argument("unknown plot kind: " + pl_kind);
    for (const auto& p : written) std::cout << p << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad flags are validation errors
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const momw1::DivergenceError& e) {
    std::cerr << "numerical divergence: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
