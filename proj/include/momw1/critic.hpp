#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "momw1/common.hpp"

namespace momw1 {

// One-hidden-layer ReLU MLP with clipped weights: phi(x) = w2 . relu(w1 x + b1) + b2.
// Clipping the weight matrices to [-c, c] bounds the Lipschitz constant, which
// is what makes the net usable as a Kantorovich-Rubinstein test function.
struct CriticNet {
  int in_dim = 0;
  int hidden = 0;
  std::vector<double> w1;  // hidden x in_dim, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
  double clip_c = 0.01;

  // Matrices uniform on [-clip_c, clip_c], biases zero.
  static CriticNet init(int in_dim, int hidden, double clip_c, uint64_t seed);

  double forward(std::span<const double> x) const;

  size_t param_count() const { return w1.size() + b1.size() + w2.size() + 1; }

  std::string to_json() const;
  static CriticNet from_json(const std::string& text);
};

// Gradient of a weighted sum of forward values w.r.t. the parameters;
// shape-congruent with CriticNet.
struct CriticGradient {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

  static CriticGradient zeros(const CriticNet& net);
  std::vector<double> flatten() const;
};

// sum_t weights[t] * grad_w phi(xs[t]), by backpropagation. The ReLU
// subgradient at exactly 0 is taken as 0.
CriticGradient grad_params(const CriticNet& net, std::span<const Point> xs,
                           std::span<const double> weights);

// Accumulates one weighted gradient term into `acc` (same math as
// grad_params, loop-friendly form for the training loops).
void accumulate_grad(const CriticNet& net, std::span<const double> x, double weight,
                     CriticGradient& acc);

// Gradient of phi w.r.t. its input, needed to backpropagate into a generator.
Point input_gradient(const CriticNet& net, std::span<const double> x);

// Weight matrices clamped to [-c, c]; biases untouched unless clip_biases.
CriticNet clip_weights(const CriticNet& net, double c, bool clip_biases = false);

// Upper bound on the Lipschitz constant: ||w2||_2 * sigma_max(w1).
double lipschitz_bound(const CriticNet& net);

// Applies w <- w + lr * update (gradient ascent step).
void ascend(CriticNet& net, const CriticGradient& update, double lr);

}  // namespace momw1
