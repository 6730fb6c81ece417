// Exact solver for the balanced transportation problem
//
//   min sum_ij flow_ij * cost(i, j)   s.t.  row sums = supply, col sums = demand
//
// implemented as the classic transportation simplex on a spanning-tree basis.
// Supports and demands here are probability weights over at most a few
// hundred support points, so an exact pivot method is affordable and we never
// fall back to entropic approximations.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace lingdist::transport {

struct FlowEntry {
  std::int32_t source;
  std::int32_t target;
  double mass;
};

struct Solution {
  double cost = 0.0;
  std::vector<FlowEntry> flows;  // strictly positive masses, sorted by (i, j)
};

// `supply` and `demand` must be positive and sum to the same total (within
// 1e-9). Throws InvalidDistribution otherwise.
Solution solve(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
               const Eigen::MatrixXd& cost);

}  // namespace lingdist::transport
