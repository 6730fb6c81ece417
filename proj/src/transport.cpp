#include "lingdist/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <queue>

#include "lingdist/errors.hpp"

namespace lingdist::transport {
namespace {

constexpr double kFlowZero = 1e-12;

struct Basis {
  std::vector<std::int32_t> row;
  std::vector<std::int32_t> col;
  std::vector<double> flow;

  std::size_t size() const { return row.size(); }
};

// Adjacency of the spanning tree over nodes [0, m) = rows, [m, m+n) = cols;
// entries are indices into the basis arrays.
std::vector<std::vector<std::int32_t>> tree_adjacency(const Basis& basis,
                                                      int m, int n) {
  std::vector<std::vector<std::int32_t>> adj(m + n);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    adj[basis.row[k]].push_back(static_cast<std::int32_t>(k));
    adj[m + basis.col[k]].push_back(static_cast<std::int32_t>(k));
  }
  return adj;
}

// Northwest-corner start: exactly m + n - 1 basic cells, degenerate zeros
// included when a row and column exhaust together.
Basis northwest_corner(Eigen::VectorXd supply, Eigen::VectorXd demand) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  Basis basis;
  basis.row.reserve(m + n - 1);
  basis.col.reserve(m + n - 1);
  basis.flow.reserve(m + n - 1);
  int i = 0;
  int j = 0;
  for (int c = 0; c < m + n - 1; ++c) {
    const double t = std::min(supply[i], demand[j]);
    basis.row.push_back(i);
    basis.col.push_back(j);
    basis.flow.push_back(std::max(t, 0.0));
    supply[i] -= t;
    demand[j] -= t;
    if (c == m + n - 2) break;
    if (i < m - 1 && (supply[i] <= kFlowZero || j == n - 1)) {
      ++i;
    } else {
      ++j;
    }
  }
  return basis;
}

void compute_duals(const Basis& basis, const Eigen::MatrixXd& cost, int m,
                   int n, Eigen::VectorXd& u, Eigen::VectorXd& v) {
  const auto adj = tree_adjacency(basis, m, n);
  std::vector<char> seen(m + n, 0);
  std::vector<std::int32_t> stack = {0};
  u[0] = 0.0;
  seen[0] = 1;
  while (!stack.empty()) {
    const std::int32_t node = stack.back();
    stack.pop_back();
    for (const std::int32_t k : adj[node]) {
      const std::int32_t r = basis.row[k];
      const std::int32_t c = m + basis.col[k];
      const std::int32_t other = (node == r) ? c : r;
      if (seen[other]) continue;
      seen[other] = 1;
      if (other >= m) {
        v[other - m] = cost(r, other - m) - u[r];
      } else {
        u[other] = cost(other, basis.col[k]) - v[basis.col[k]];
      }
      stack.push_back(other);
    }
  }
}

// Tree path from node `from` to node `to`; returns the basis-cell indices of
// the edges in order.
std::vector<std::int32_t> tree_path(const Basis& basis, int m, int n, int from,
                                    int to) {
  const auto adj = tree_adjacency(basis, m, n);
  std::vector<std::int32_t> parent_edge(m + n, -1);
  std::vector<std::int32_t> parent_node(m + n, -1);
  std::vector<char> seen(m + n, 0);
  std::queue<std::int32_t> queue;
  queue.push(from);
  seen[from] = 1;
  while (!queue.empty()) {
    const std::int32_t node = queue.front();
    queue.pop();
    if (node == to) break;
    for (const std::int32_t k : adj[node]) {
      const std::int32_t r = basis.row[k];
      const std::int32_t c = m + basis.col[k];
      const std::int32_t other = (node == r) ? c : r;
      if (seen[other]) continue;
      seen[other] = 1;
      parent_edge[other] = k;
      parent_node[other] = node;
      queue.push(other);
    }
  }
  std::vector<std::int32_t> path;
  for (std::int32_t node = to; node != from; node = parent_node[node]) {
    path.push_back(parent_edge[node]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

Solution solve(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
               const Eigen::MatrixXd& cost) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (m == 0 || n == 0) throw InvalidDistribution("transport: empty marginal");
  if ((supply.array() <= 0).any() || (demand.array() <= 0).any()) {
    throw InvalidDistribution("transport: marginals must be positive");
  }
  if (std::abs(supply.sum() - demand.sum()) > 1e-9) {
    throw InvalidDistribution("transport: unbalanced marginals");
  }

  Basis basis = northwest_corner(supply, demand);
  std::vector<char> in_basis(static_cast<std::size_t>(m) * n, 0);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    in_basis[basis.row[k] * n + basis.col[k]] = 1;
  }

  const double cost_scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double enter_tol = 1e-11 * cost_scale;
  // Dantzig's rule normally; Bland's rule after long degenerate stretches to
  // rule out cycling.
  const long bland_after = 20L * (m + n);
  const long max_pivots = 2000L * (m + n) + 1000;

  Eigen::VectorXd u(m);
  Eigen::VectorXd v(n);
  for (long pivot = 0;; ++pivot) {
    if (pivot > max_pivots) {
      throw Error("transport: pivot limit exceeded");
    }
    compute_duals(basis, cost, m, n, u, v);

    int enter_i = -1;
    int enter_j = -1;
    double best = -enter_tol;
    const bool bland = pivot >= bland_after;
    for (int i = 0; i < m && (!bland || enter_i < 0); ++i) {
      for (int j = 0; j < n; ++j) {
        if (in_basis[i * n + j]) continue;
        const double reduced = cost(i, j) - u[i] - v[j];
        if (reduced < best) {
          best = reduced;
          enter_i = i;
          enter_j = j;
          if (bland) break;
        }
      }
    }
    if (enter_i < 0) break;  // optimal

    const auto path = tree_path(basis, m, n, enter_i, m + enter_j);
    // Entering cell takes +theta; path cells alternate starting with - on
    // the edge adjacent to the entering row.
    double theta = std::numeric_limits<double>::infinity();
    std::int32_t leave = -1;
    for (std::size_t t = 0; t < path.size(); t += 2) {
      const std::int32_t k = path[t];
      const bool smaller =
          basis.flow[k] < theta ||
          (basis.flow[k] == theta &&
           (leave < 0 || basis.row[k] < basis.row[leave] ||
            (basis.row[k] == basis.row[leave] &&
             basis.col[k] < basis.col[leave])));
      if (smaller) {
        theta = basis.flow[k];
        leave = k;
      }
    }
    for (std::size_t t = 0; t < path.size(); ++t) {
      const std::int32_t k = path[t];
      basis.flow[k] += (t % 2 == 0) ? -theta : theta;
      if (basis.flow[k] < kFlowZero) basis.flow[k] = 0.0;
    }
    in_basis[basis.row[leave] * n + basis.col[leave]] = 0;
    in_basis[enter_i * n + enter_j] = 1;
    basis.row[leave] = enter_i;
    basis.col[leave] = enter_j;
    basis.flow[leave] = theta;
  }

  Solution solution;
  std::vector<std::size_t> order(basis.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (basis.row[a] != basis.row[b]) return basis.row[a] < basis.row[b];
    return basis.col[a] < basis.col[b];
  });
  for (const std::size_t k : order) {
    if (basis.flow[k] <= 0.0) continue;
    solution.flows.push_back({basis.row[k], basis.col[k], basis.flow[k]});
    solution.cost += basis.flow[k] * cost(basis.row[k], basis.col[k]);
  }
  return solution;
}

}  // namespace lingdist::transport
