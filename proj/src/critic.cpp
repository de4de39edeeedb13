#include "momw1/critic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace momw1 {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Largest singular value of the hidden x d matrix via power iteration on the
// d x d Gram matrix (d is small here).
double spectral_norm(const std::vector<double>& w, int rows, int cols) {
  std::vector<double> gram(static_cast<size_t>(cols) * cols, 0.0);
  for (int r = 0; r < rows; ++r)
    for (int a = 0; a < cols; ++a)
      for (int b = 0; b < cols; ++b)
        gram[a * cols + b] += w[r * cols + a] * w[r * cols + b];

  std::vector<double> v(cols, 1.0 / std::sqrt(static_cast<double>(cols)));
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    std::vector<double> gv(cols, 0.0);
    for (int a = 0; a < cols; ++a)
      for (int b = 0; b < cols; ++b) gv[a] += gram[a * cols + b] * v[b];
    double norm = 0.0;
    for (double x : gv) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (int a = 0; a < cols; ++a) v[a] = gv[a] / norm;
    lambda = norm;
  }
  return std::sqrt(lambda);
}

}  // namespace

CriticNet CriticNet::init(int in_dim, int hidden, double clip_c, uint64_t seed) {
  require(in_dim >= 1 && hidden >= 1, "critic: dimensions must be >= 1");
  require(clip_c > 0.0, "critic: clip_c must be > 0");
  Rng rng(seed);
  CriticNet net;
  net.in_dim = in_dim;
  net.hidden = hidden;
  net.clip_c = clip_c;
  net.w1.resize(static_cast<size_t>(hidden) * in_dim);
  net.b1.assign(hidden, 0.0);
  net.w2.resize(hidden);
  for (double& w : net.w1) w = rng.uniform(-clip_c, clip_c);
  for (double& w : net.w2) w = rng.uniform(-clip_c, clip_c);
  net.b2 = 0.0;
  return net;
}

double CriticNet::forward(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == in_dim, "critic forward: dimension mismatch");
  double out = b2;
  for (int h = 0; h < hidden; ++h) {
    double pre = b1[h];
    const double* row = &w1[static_cast<size_t>(h) * in_dim];
    for (int j = 0; j < in_dim; ++j) pre += row[j] * x[j];
    if (pre > 0.0) out += w2[h] * pre;
  }
  return out;
}

CriticGradient CriticGradient::zeros(const CriticNet& net) {
  CriticGradient g;
  g.w1.assign(net.w1.size(), 0.0);
  g.b1.assign(net.b1.size(), 0.0);
  g.w2.assign(net.w2.size(), 0.0);
  g.b2 = 0.0;
  return g;
}

std::vector<double> CriticGradient::flatten() const {
  std::vector<double> flat;
  flat.reserve(w1.size() + b1.size() + w2.size() + 1);
  flat.insert(flat.end(), w1.begin(), w1.end());
  flat.insert(flat.end(), b1.begin(), b1.end());
  flat.insert(flat.end(), w2.begin(), w2.end());
  flat.push_back(b2);
  return flat;
}

void accumulate_grad(const CriticNet& net, std::span<const double> x, double weight,
                     CriticGradient& acc) {
  require(static_cast<int>(x.size()) == net.in_dim, "critic grad: dimension mismatch");
  for (int h = 0; h < net.hidden; ++h) {
    double pre = net.b1[h];
    const double* row = &net.w1[static_cast<size_t>(h) * net.in_dim];
    for (int j = 0; j < net.in_dim; ++j) pre += row[j] * x[j];
    acc.w2[h] += weight * (pre > 0.0 ? pre : 0.0);
    if (pre > 0.0) {
      const double gh = weight * net.w2[h];
      acc.b1[h] += gh;
      double* grow = &acc.w1[static_cast<size_t>(h) * net.in_dim];
      for (int j = 0; j < net.in_dim; ++j) grow[j] += gh * x[j];
    }
  }
  acc.b2 += weight;
}

CriticGradient grad_params(const CriticNet& net, std::span<const Point> xs,
                           std::span<const double> weights) {
  require(xs.size() == weights.size(), "critic grad: weights length mismatch");
  CriticGradient g = CriticGradient::zeros(net);
  for (size_t t = 0; t < xs.size(); ++t) accumulate_grad(net, xs[t], weights[t], g);
  return g;
}

Point input_gradient(const CriticNet& net, std::span<const double> x) {
  require(static_cast<int>(x.size()) == net.in_dim, "critic grad: dimension mismatch");
  Point g(net.in_dim, 0.0);
  for (int h = 0; h < net.hidden; ++h) {
    double pre = net.b1[h];
    const double* row = &net.w1[static_cast<size_t>(h) * net.in_dim];
    for (int j = 0; j < net.in_dim; ++j) pre += row[j] * x[j];
    if (pre > 0.0)
      for (int j = 0; j < net.in_dim; ++j) g[j] += net.w2[h] * row[j];
  }
  return g;
}

CriticNet clip_weights(const CriticNet& net, double c, bool clip_biases) {
  require(c > 0.0, "clip_weights: c must be > 0");
  CriticNet out = net;
  auto clamp_all = [c](std::vector<double>& v) {
    for (double& w : v) w = std::clamp(w, -c, c);
  };
  clamp_all(out.w1);
  clamp_all(out.w2);
  if (clip_biases) {
    clamp_all(out.b1);
    out.b2 = std::clamp(out.b2, -c, c);
  }
  return out;
}

double lipschitz_bound(const CriticNet& net) {
  double w2_norm = 0.0;
  for (double w : net.w2) w2_norm += w * w;
  return std::sqrt(w2_norm) * spectral_norm(net.w1, net.hidden, net.in_dim);
}

void ascend(CriticNet& net, const CriticGradient& update, double lr) {
  for (size_t i = 0; i < net.w1.size(); ++i) net.w1[i] += lr * update.w1[i];
  for (size_t i = 0; i < net.b1.size(); ++i) net.b1[i] += lr * update.b1[i];
  for (size_t i = 0; i < net.w2.size(); ++i) net.w2[i] += lr * update.w2[i];
  net.b2 += lr * update.b2;
}

std::string CriticNet::to_json() const {
  nlohmann::json j;
  j["in_dim"] = in_dim;
  j["hidden"] = hidden;
  j["clip_c"] = clip_c;
  j["w1"] = w1;
  j["b1"] = b1;
  j["w2"] = w2;
  j["b2"] = b2;
  return j.dump();
}

CriticNet CriticNet::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CriticNet net;
  net.in_dim = j.at("in_dim").get<int>();
  net.hidden = j.at("hidden").get<int>();
  net.clip_c = j.at("clip_c").get<double>();
  net.w1 = j.at("w1").get<std::vector<double>>();
  net.b1 = j.at("b1").get<std::vector<double>>();
  net.w2 = j.at("w2").get<std::vector<double>>();
  net.b2 = j.at("b2").get<double>();
  require(net.w1.size() == static_cast<size_t>(net.hidden) * net.in_dim &&
              net.b1.size() == static_cast<size_t>(net.hidden) &&
              net.w2.size() == static_cast<size_t>(net.hidden),
          "critic json: inconsistent shapes");
  return net;
}

}  // namespace momw1
