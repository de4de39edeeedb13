#pragma once

#include <span>
#include <vector>

#include "momw1/critic.hpp"
#include "momw1/common.hpp"
#include "momw1/sample.hpp"

namespace momw1 {

// Euclidean ground costs ||x_i - y_j||_2.
std::vector<std::vector<double>> cost_matrix(std::span<const Point> xs, std::span<const Point> ys);

// Minimum total cost of a perfect matching on a square cost matrix
// (Jonker-Volgenant shortest augmenting paths). Ties broken by lowest index.
double solve_assignment(const std::vector<std::vector<double>>& cost);

// Minimum-cost transportation plan with integer supplies/demands
// (network simplex on the dense bipartite graph, strongly feasible basis).
// Returns sum of flow * cost in supply units.
double solve_transportation(const std::vector<std::vector<double>>& cost,
                            const std::vector<long long>& supply,
                            const std::vector<long long>& demand);

// Exact 1-Wasserstein distance between the uniform empirical measures on xs
// and ys. Equal sizes reduce to a balanced assignment (value / n); unequal
// sizes go through the transportation solver with supplies 1/n, demands 1/m.
double exact_w1(std::span<const Point> xs, std::span<const Point> ys);
double exact_w1(const Sample& x, const Sample& y);

// Weak-duality diagnostic: |mean_x phi - mean_y phi| normalized by
// max(lipschitz_bound, realized Lipschitz ratio over the sample pairs); the
// result never exceeds exact_w1(xs, ys) beyond float noise.
double exact_w1_dual_check(std::span<const Point> xs, std::span<const Point> ys,
                           const CriticNet& critic);

}  // namespace momw1
