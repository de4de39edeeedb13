#include "momw1/exact_ot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace momw1 {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense bipartite transportation via network simplex. Basis is a spanning
// tree over sources, sinks and an artificial root; the strongly feasible
// leaving-arc rule guarantees termination under degeneracy.
class NetworkSimplex {
 public:
  NetworkSimplex(const std::vector<std::vector<double>>& cost,
                 const std::vector<long long>& supply, const std::vector<long long>& demand)
      : cost_(cost),
        n_(static_cast<int>(supply.size())),
        m_(static_cast<int>(demand.size())),
        root_(n_ + m_) {
    double maxc = 0.0;
    for (const auto& row : cost_)
      for (double c : row) maxc = std::max(maxc, c);
    big_m_ = (n_ + m_ + 1) * (maxc + 1.0);
    tol_ = 1e-10 * (1.0 + maxc);

    const int v = n_ + m_ + 1;
    parent_.assign(v, -1);
    up_dir_.assign(v, false);
    flow_.assign(v, 0);
    arc_cost_.assign(v, 0.0);
    depth_.assign(v, 0);
    pi_.assign(v, 0.0);

    // Star tree on the artificial root: source arcs i->root carry the whole
    // supply, root->j arcs the whole demand. Strongly feasible as long as all
    // supplies and demands are positive.
    for (int i = 0; i < n_; ++i) {
      require(supply[i] > 0, "transportation: supplies must be positive");
      parent_[i] = root_;
      up_dir_[i] = true;
      flow_[i] = supply[i];
      arc_cost_[i] = big_m_;
    }
    for (int j = 0; j < m_; ++j) {
      require(demand[j] > 0, "transportation: demands must be positive");
      parent_[n_ + j] = root_;
      up_dir_[n_ + j] = false;
      flow_[n_ + j] = demand[j];
      arc_cost_[n_ + j] = big_m_;
    }
    refresh_tree();
  }

  double solve() {
    const long long arcs = static_cast<long long>(n_) * m_;
    const long long block =
        std::max<long long>(64, static_cast<long long>(std::sqrt(static_cast<double>(arcs))));
    long long cursor = 0;
    for (;;) {
      long long best = -1;
      double best_r = -tol_;
      long long scanned = 0;
      while (scanned < arcs) {
        const long long stop = std::min(arcs, cursor + block);
        for (long long a = cursor; a < stop; ++a) {
          const int i = static_cast<int>(a / m_);
          const int j = static_cast<int>(a % m_);
          const double r = cost_[i][j] - pi_[i] + pi_[n_ + j];
          if (r < best_r) {
            best_r = r;
            best = a;
          }
        }
        scanned += stop - cursor;
        cursor = stop == arcs ? 0 : stop;
        if (best >= 0) break;
      }
      if (best < 0) break;  // optimal
      pivot(static_cast<int>(best / m_), n_ + static_cast<int>(best % m_),
            cost_[best / m_][best % m_]);
    }

    CompensatedSum total;
    for (int v = 0; v < n_ + m_; ++v) {
      if (parent_[v] == root_ || v == root_) {
        if (flow_[v] != 0)
          throw std::runtime_error("transportation: infeasible (artificial flow remains)");
        continue;
      }
      total.add(static_cast<double>(flow_[v]) * arc_cost_[v]);
    }
    return total.value();
  }

 private:
  // Rebuild depths and potentials from the parent structure.
  void refresh_tree() {
    const int v = n_ + m_ + 1;
    std::vector<std::vector<int>> children(v);
    for (int u = 0; u < v; ++u)
      if (parent_[u] >= 0) children[parent_[u]].push_back(u);
    std::vector<int> stack{root_};
    depth_[root_] = 0;
    pi_[root_] = 0.0;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int c : children[u]) {
        depth_[c] = depth_[u] + 1;
        pi_[c] = up_dir_[c] ? pi_[u] + arc_cost_[c] : pi_[u] - arc_cost_[c];
        stack.push_back(c);
      }
    }
  }

  void pivot(int enter_from, int enter_to, double enter_cost) {
    // Chains from both endpoints up to their LCA.
    std::vector<int> side_i, side_j;
    {
      int a = enter_from, b = enter_to;
      while (depth_[a] > depth_[b]) {
        side_i.push_back(a);
        a = parent_[a];
      }
      while (depth_[b] > depth_[a]) {
        side_j.push_back(b);
        b = parent_[b];
      }
      while (a != b) {
        side_i.push_back(a);
        side_j.push_back(b);
        a = parent_[a];
        b = parent_[b];
      }
    }

    // Cycle direction: apex -> enter_from (downward), entering arc,
    // enter_to -> apex (upward). Opposed arcs bound the push.
    long long theta = std::numeric_limits<long long>::max();
    for (int v : side_i)
      if (up_dir_[v]) theta = std::min(theta, flow_[v]);  // traversed downward
    for (int v : side_j)
      if (!up_dir_[v]) theta = std::min(theta, flow_[v]);  // traversed upward

    // Leaving arc: last blocking arc along the cycle starting at the apex
    // (keeps the tree strongly feasible).
    int leave = -1;
    bool leave_on_i = false;
    for (auto it = side_i.rbegin(); it != side_i.rend(); ++it)
      if (up_dir_[*it] && flow_[*it] == theta) {
        leave = *it;
        leave_on_i = true;
      }
    for (int v : side_j)
      if (!up_dir_[v] && flow_[v] == theta) {
        leave = v;
        leave_on_i = false;
      }
    if (leave < 0) throw std::runtime_error("transportation: unbounded pivot");

    for (int v : side_i) flow_[v] += up_dir_[v] ? -theta : theta;
    for (int v : side_j) flow_[v] += up_dir_[v] ? theta : -theta;

    // Re-hang the subtree cut off by the leaving arc: reverse parent links
    // from the entering endpoint inside the subtree up to the leaving arc.
    const int sub_end = leave_on_i ? enter_from : enter_to;
    int prev = leave_on_i ? enter_to : enter_from;
    bool prev_up = leave_on_i;  // entering arc goes enter_from -> enter_to
    long long prev_flow = theta;
    double prev_cost = enter_cost;

    int v = sub_end;
    for (;;) {
      const int old_parent = parent_[v];
      const bool old_up = up_dir_[v];
      const long long old_flow = flow_[v];
      const double old_cost = arc_cost_[v];
      parent_[v] = prev;
      up_dir_[v] = prev_up;
      flow_[v] = prev_flow;
      arc_cost_[v] = prev_cost;
      if (v == leave) break;
      prev = v;
      prev_up = !old_up;
      prev_flow = old_flow;
      prev_cost = old_cost;
      v = old_parent;
    }
    refresh_tree();
  }

  const std::vector<std::vector<double>>& cost_;
  int n_, m_, root_;
  double big_m_ = 0.0, tol_ = 0.0;
  std::vector<int> parent_;
  std::vector<bool> up_dir_;  // true: arc points child -> parent
  std::vector<long long> flow_;
  std::vector<double> arc_cost_;
  std::vector<int> depth_;
  std::vector<double> pi_;
};

}  // namespace

std::vector<std::vector<double>> cost_matrix(std::span<const Point> xs, std::span<const Point> ys) {
  require(!xs.empty() && !ys.empty(), "exact_w1: empty input");
  const size_t d = xs.front().size();
  std::vector<std::vector<double>> cost(xs.size(), std::vector<double>(ys.size()));
  for (size_t i = 0; i < xs.size(); ++i) {
    require(xs[i].size() == d, "exact_w1: dimension mismatch");
    for (size_t j = 0; j < ys.size(); ++j) {
      require(ys[j].size() == d, "exact_w1: dimension mismatch");
      cost[i][j] = euclidean_distance(xs[i], ys[j]);
    }
  }
  return cost;
}

double solve_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  require(n >= 1, "assignment: empty cost matrix");
  for (const auto& row : cost)
    require(static_cast<int>(row.size()) == n, "assignment: cost matrix must be square");

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  CompensatedSum total;
  for (int j = 1; j <= n; ++j) total.add(cost[match[j] - 1][j - 1]);
  return total.value();
}

double solve_transportation(const std::vector<std::vector<double>>& cost,
                            const std::vector<long long>& supply,
                            const std::vector<long long>& demand) {
  require(!supply.empty() && !demand.empty(), "transportation: empty problem");
  require(cost.size() == supply.size(), "transportation: cost rows != supplies");
  for (const auto& row : cost)
    require(row.size() == demand.size(), "transportation: cost cols != demands");
  const long long total_supply = std::accumulate(supply.begin(), supply.end(), 0ll);
  const long long total_demand = std::accumulate(demand.begin(), demand.end(), 0ll);
  require(total_supply == total_demand, "transportation: supply/demand imbalance");
  return NetworkSimplex(cost, supply, demand).solve();
}

double exact_w1(std::span<const Point> xs, std::span<const Point> ys) {
  const auto cost = cost_matrix(xs, ys);
  const long long n = static_cast<long long>(xs.size());
  const long long m = static_cast<long long>(ys.size());
  if (n == m) return solve_assignment(cost) / static_cast<double>(n);

  const long long g = std::gcd(n, m);
  std::vector<long long> supply(n, m / g), demand(m, n / g);
  const double units = solve_transportation(cost, supply, demand);
  return units * static_cast<double>(g) / (static_cast<double>(n) * static_cast<double>(m));
}

double exact_w1(const Sample& x, const Sample& y) { return exact_w1(x.points, y.points); }

double exact_w1_dual_check(std::span<const Point> xs, std::span<const Point> ys,
                           const CriticNet& critic) {
  require(!xs.empty() && !ys.empty(), "dual check: empty input");
  CompensatedSum mx, my;
  for (const Point& p : xs) mx.add(critic.forward(p));
  for (const Point& p : ys) my.add(critic.forward(p));
  const double gap = mx.value() / static_cast<double>(xs.size()) -
                     my.value() / static_cast<double>(ys.size());

  std::vector<Point> all(xs.begin(), xs.end());
  all.insert(all.end(), ys.begin(), ys.end());
  double realized = 0.0;
  for (size_t a = 0; a < all.size(); ++a) {
    const double fa = critic.forward(all[a]);
    for (size_t b = a + 1; b < all.size(); ++b) {
      const double dist = euclidean_distance(all[a], all[b]);
      if (dist > 0.0) realized = std::max(realized, std::abs(fa - critic.forward(all[b])) / dist);
    }
  }
  const double denom = std::max(lipschitz_bound(critic), realized);
  if (denom == 0.0) {
    if (std::abs(gap) > 0.0)
      throw std::invalid_argument("dual check: zero Lipschitz bound with nonzero mean gap");
    return 0.0;
  }
  return std::abs(gap) / denom;
}

}  // namespace momw1
