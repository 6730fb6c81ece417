// Genealogy DAG over linguistic entities and its transitive closure, the
// source of positive pairs for embedding training.
#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "lingdist/random.hpp"

namespace lingdist {

using NodeId = std::string;
using NodeIndex = std::int32_t;

class GenealogyGraph {
 public:
  // Nodes are indexed by sorted id so downstream artifacts do not depend on
  // edge-list order. Throws CycleDetected (with a witness cycle) on cycles.
  GenealogyGraph(std::vector<NodeId> nodes,
                 std::vector<std::pair<NodeId, NodeId>> edges);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<NodeId>& nodes() const { return nodes_; }
  const std::vector<std::pair<NodeIndex, NodeIndex>>& edges() const {
    return edges_;
  }
  NodeIndex index_of(const NodeId& id) const;  // throws UnknownNode
  const NodeId& id_of(NodeIndex index) const { return nodes_.at(index); }
  const std::vector<NodeIndex>& children(NodeIndex node) const {
    return children_[node];
  }
  // Indices in topological order (parents before children).
  const std::vector<NodeIndex>& topological_order() const { return topo_; }

 private:
  std::vector<NodeId> nodes_;  // sorted
  std::unordered_map<NodeId, NodeIndex> index_;
  std::vector<std::pair<NodeIndex, NodeIndex>> edges_;
  std::vector<std::vector<NodeIndex>> children_;
  std::vector<NodeIndex> topo_;
};

// Strict ancestor/descendant sets per node; (u, v) is a positive pair iff
// u is a strict ancestor of v.
class ClosureIndex {
 public:
  explicit ClosureIndex(const GenealogyGraph& graph);

  std::size_t node_count() const { return descendants_.size(); }
  const std::vector<NodeIndex>& descendants(NodeIndex node) const {
    return descendants_[node];
  }
  const std::vector<NodeIndex>& ancestors(NodeIndex node) const {
    return ancestors_[node];
  }
  bool is_descendant(NodeIndex node, NodeIndex candidate) const;
  // All (ancestor, descendant) pairs, sorted.
  std::vector<std::pair<NodeIndex, NodeIndex>> positive_pairs() const;
  std::size_t positive_count() const;
  // Nodes eligible as negatives for u: everything except u and its strict
  // descendants.
  std::size_t eligible_negative_count(NodeIndex u) const;

 private:
  std::vector<std::vector<NodeIndex>> descendants_;  // sorted
  std::vector<std::vector<NodeIndex>> ancestors_;    // sorted
};

ClosureIndex build_closure(const GenealogyGraph& graph);

// K nodes drawn uniformly with replacement from the eligible set of u.
// Throws NoEligibleNegatives when every other node descends from u.
std::vector<NodeIndex> sample_negatives(NodeIndex u, std::size_t k,
                                        const ClosureIndex& closure, Rng& rng);

}  // namespace lingdist
