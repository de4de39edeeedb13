#include "momw1/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "momw1/blocking.hpp"
#include "momw1/exact_ot.hpp"

namespace momw1 {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* dataset_name(ToyDataset d) { return d == ToyDataset::D1 ? "d1" : "d2"; }

const char* estimator_name(EstimatorSpec::Kind k) {
  switch (k) {
    case EstimatorSpec::Kind::MoM: return "mom";
    case EstimatorSpec::Kind::MoU: return "mou";
    default: return "mou-diag";
  }
}

Sample make_toy_x(ToyDataset dataset, int n, double tau, uint64_t seed) {
  InlierSpec inliers{{0.0, 0.0}, n};
  ContaminationSpec cont =
      tau <= 0.0 ? ContaminationSpec::none()
      : dataset == ToyDataset::D1
          ? ContaminationSpec::isolated_uniform({-50.0, -50.0}, {50.0, 50.0}, tau)
          : ContaminationSpec::aggregate_cauchy({25.0, 25.0}, tau);
  return generate_sample(inliers, cont, seed);
}

Sample make_toy_y(int n, uint64_t seed) {
  return generate_sample({{5.0, 5.0}, n}, ContaminationSpec::none(), seed);
}

RunReport train_with(EstimatorSpec::Kind kind, const Sample& x, const Sample& y,
                     const TrainConfig& cfg) {
  switch (kind) {
    case EstimatorSpec::Kind::MoM: return train_w_mom(x, y, cfg);
    case EstimatorSpec::Kind::MoU: return train_w_mou(x, y, cfg);
    default: return train_w_mou_diag(x, y, cfg);
  }
}

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), "quantile: empty values");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * (values.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - lo;
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double kendall_tau_against_order(const std::vector<double>& values) {
  require(values.size() >= 2, "kendall: need at least two values");
  long long concordant = 0, discordant = 0;
  for (size_t a = 0; a < values.size(); ++a)
    for (size_t b = a + 1; b < values.size(); ++b) {
      if (values[a] > values[b]) ++concordant;   // decreasing pair: trend respected
      else if (values[a] < values[b]) ++discordant;
    }
  const long long pairs = concordant + discordant;
  return pairs == 0 ? 0.0 : static_cast<double>(concordant - discordant) / pairs;
}

void SweepSpec::validate() const {
  require(repeats >= 1, "sweep: repeats must be >= 1");
  require(!taus.empty() && !ks.empty(), "sweep: taus and ks must be non-empty");
  for (double t : taus) require(t >= 0.0 && t < 0.5, "sweep: tau must be in [0, 0.5)");
  for (int k : ks) require(k >= 1 && k <= n, "sweep: k out of range");
  require(epochs >= 1 && n >= 2, "sweep: invalid sizes");
}

SweepResult run_k_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult out;

  for (int rep = 0; rep < spec.repeats; ++rep) {
    const uint64_t rep_seed = mix_seed(spec.base_seed, rep);

    // Clean K=1 reference, retrained per repeat so the paired differences
    // cancel critic-capacity effects.
    const Sample x_clean = make_toy_x(spec.dataset, spec.n, 0.0, mix_seed(rep_seed, 101));
    const Sample y = make_toy_y(spec.n, mix_seed(rep_seed, 102));
    TrainConfig ref_cfg = spec.train;
    ref_cfg.k_x = 1;
    ref_cfg.k_y = 1;
    ref_cfg.n_iter = iters_for_epochs(spec.epochs, 1);
    ref_cfg.seed = mix_seed(rep_seed, 103);
    const double clean_ref = train_with(spec.estimator, x_clean, y, ref_cfg).final_estimate;

    for (double tau : spec.taus) {
      const Sample x = tau <= 0.0 ? x_clean
                                  : make_toy_x(spec.dataset, spec.n, tau, mix_seed(rep_seed, 104));
      for (int k : spec.ks) {
        TrainConfig cfg = spec.train;
        cfg.k_x = k;
        cfg.k_y = k;
        cfg.n_iter = iters_for_epochs(spec.epochs, k);
        cfg.seed = mix_seed(rep_seed, 103);
        const double est = train_with(spec.estimator, x, y, cfg).final_estimate;
        out.rows.push_back({dataset_name(spec.dataset), estimator_name(spec.estimator), tau, k,
                            rep, rep_seed, std::abs(est - clean_ref)});
      }
    }
  }

  for (double tau : spec.taus)
    for (int k : spec.ks) {
      std::vector<double> errs;
      for (const SweepRow& r : out.rows)
        if (r.tau == tau && r.k == k) errs.push_back(r.abs_error);
      SweepSummaryRow s;
      s.dataset = dataset_name(spec.dataset);
      s.estimator = estimator_name(spec.estimator);
      s.tau = tau;
      s.k = k;
      s.mean = compensated_mean(errs);
      s.q25 = quantile(errs, 0.25);
      s.q75 = quantile(errs, 0.75);
      out.summary.push_back(s);
    }
  return out;
}

void write_sweep_csv(const SweepResult& result, std::ostream& raw, std::ostream& summary) {
  raw << "dataset,estimator,tau,k,repeat,seed,abs_error\n";
  for (const SweepRow& r : result.rows)
    raw << r.dataset << ',' << r.estimator << ',' << fmt(r.tau) << ',' << r.k << ',' << r.repeat
        << ',' << r.seed << ',' << fmt(r.abs_error) << '\n';
  summary << "dataset,estimator,tau,k,mean,q25,q75\n";
  for (const SweepSummaryRow& s : result.summary)
    summary << s.dataset << ',' << s.estimator << ',' << fmt(s.tau) << ',' << s.k << ','
            << fmt(s.mean) << ',' << fmt(s.q25) << ',' << fmt(s.q75) << '\n';
}

ConvergenceResult run_convergence(const ConvergenceSpec& spec) {
  require(spec.repeats >= 1 && !spec.ks.empty() && spec.epochs >= 1, "convergence: invalid spec");
  require(spec.tau >= 0.0 && spec.tau < 0.5, "convergence: tau must be in [0, 0.5)");
  ConvergenceResult out;
  out.base_seed = spec.base_seed;

  for (int k : spec.ks) {
    // epoch e -> mean over repeats of the mean objective across the K
    // iterations inside epoch e.
    std::vector<double> per_epoch(spec.epochs, 0.0);
    for (int rep = 0; rep < spec.repeats; ++rep) {
      const uint64_t rep_seed = mix_seed(spec.base_seed, rep);
      const Sample x = make_toy_x(spec.dataset, spec.n, spec.tau, mix_seed(rep_seed, 104));
      const Sample y = make_toy_y(spec.n, mix_seed(rep_seed, 102));
      TrainConfig cfg = spec.train;
      cfg.k_x = k;
      cfg.k_y = k;
      cfg.n_iter = iters_for_epochs(spec.epochs, k);
      cfg.seed = mix_seed(rep_seed, 103);
      const RunReport report = train_with(spec.estimator, x, y, cfg);
      for (int e = 0; e < spec.epochs; ++e) {
        CompensatedSum acc;
        for (int t = e * k; t < (e + 1) * k; ++t) acc.add(report.trace[t].objective);
        per_epoch[e] += acc.value() / k;
      }
    }
    for (int e = 0; e < spec.epochs; ++e)
      out.rows.push_back({k, e + 1, per_epoch[e] / spec.repeats});
  }
  return out;
}

void write_convergence_csv(const ConvergenceResult& result, std::ostream& out) {
  out << "# {\"base_seed\":" << result.base_seed << "}\n";
  out << "k,epoch,objective_mean\n";
  for (const ConvergenceRow& r : result.rows)
    out << r.k << ',' << r.epoch << ',' << fmt(r.objective_mean) << '\n';
}

RateResult run_rate_trace(const RateSpec& spec) {
  require(!spec.ns.empty() && spec.repeats >= 1, "rate: invalid spec");
  require(spec.tau >= 0.0 && spec.tau < 0.5, "rate: tau must be in [0, 0.5)");
  for (size_t i = 1; i < spec.ns.size(); ++i)
    require(spec.ns[i] > spec.ns[i - 1], "rate: ns must be increasing");
  require(spec.ns.front() >= 8, "rate: n too small for blocking");

  RateResult out;
  const double target = true_w1_reference();

  for (int n : spec.ns) {
    std::vector<double> errs;
    for (int rep = 0; rep < spec.repeats; ++rep) {
      const uint64_t seed = mix_seed(spec.base_seed, 1000 * rep + n);
      // Sub-linear outlier growth: n_O = ceil(sqrt(n)), capped by the nominal tau.
      const int cap = static_cast<int>(std::lround(spec.tau * n));
      const int n_out = spec.tau <= 0.0 ? 0 : std::min<int>(std::ceil(std::sqrt(n)), cap);
      const double tau_n = static_cast<double>(n_out) / n;

      const Sample x = make_toy_x(ToyDataset::D1, n, tau_n, mix_seed(seed, 1));
      const Sample y = make_toy_y(n, mix_seed(seed, 2));
      const int k = n_out == 0 ? 1 : recommended_k(n, tau_n);
      const auto blocks = assign_blocks(n, BlockScheme::partition(k), mix_seed(seed, 3));

      // Robust witness: block mean of distance to the coordinatewise median.
      Point center(x.dim());
      for (int j = 0; j < x.dim(); ++j) {
        std::vector<double> coords(n);
        for (int i = 0; i < n; ++i) coords[i] = x.points[i][j];
        center[j] = median_value(coords);
      }
      std::vector<double> witness(n);
      for (int i = 0; i < n; ++i) witness[i] = euclidean_distance(x.points[i], center);
      const auto means = block_means(witness, blocks);

      // Keep the middle half of the blocks by witness rank and concatenate.
      std::vector<size_t> order(means.size());
      for (size_t b = 0; b < order.size(); ++b) order[b] = b;
      std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return means[a] != means[b] ? means[a] < means[b] : a < b;
      });
      const size_t lo = (means.size() + 3) / 4;     // ceil(K/4), 1-based
      const size_t hi = (3 * means.size() + 3) / 4; // ceil(3K/4)
      std::vector<Point> kept;
      for (size_t rank = lo; rank <= hi && rank >= 1; ++rank)
        for (int i : blocks.blocks[order[rank - 1]]) kept.push_back(x.points[i]);

      const double err = std::abs(exact_w1(kept, y.points) - target);
      errs.push_back(err);
      out.rows.push_back({n, rep, seed, err});
    }
    out.mean_errors.push_back(compensated_mean(errs));
  }

  // Least-squares slope of log(mean error) against log(n).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int pts = static_cast<int>(spec.ns.size());
  for (int i = 0; i < pts; ++i) {
    const double lx = std::log(static_cast<double>(spec.ns[i]));
    const double ly = std::log(std::max(out.mean_errors[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  out.loglog_slope = (pts * sxy - sx * sy) / (pts * sxx - sx * sx);
  return out;
}

void write_rate_csv(const RateSpec& spec, const RateResult& result, std::ostream& raw,
                    std::ostream& summary) {
  raw << "n,repeat,seed,error\n";
  for (const RateRow& r : result.rows)
    raw << r.n << ',' << r.repeat << ',' << r.seed << ',' << fmt(r.error) << '\n';
  summary << "# {\"loglog_slope\":" << fmt(result.loglog_slope) << ",\"tau\":" << fmt(spec.tau)
          << ",\"base_seed\":" << spec.base_seed << "}\n";
  summary << "n,mean_error\n";
  for (size_t i = 0; i < spec.ns.size(); ++i)
    summary << spec.ns[i] << ',' << fmt(result.mean_errors[i]) << '\n';
}

}  // namespace momw1
