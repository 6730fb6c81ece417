#include "lingdist/genealogy.hpp"

#include <algorithm>

#include "lingdist/errors.hpp"

namespace lingdist {
namespace {

// Merge sorted `source` into sorted `dest`.
void merge_into(std::vector<NodeIndex>& dest,
                const std::vector<NodeIndex>& source) {
  std::vector<NodeIndex> merged;
  merged.reserve(dest.size() + source.size());
  std::set_union(dest.begin(), dest.end(), source.begin(), source.end(),
                 std::back_inserter(merged));
  dest = std::move(merged);
}

}  // namespace

GenealogyGraph::GenealogyGraph(std::vector<NodeId> nodes,
                               std::vector<std::pair<NodeId, NodeId>> edges) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  nodes_ = std::move(nodes);
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(nodes_.size()); ++i) {
    index_[nodes_[i]] = i;
  }
  children_.resize(nodes_.size());
  std::vector<int> in_degree(nodes_.size(), 0);
  std::vector<std::pair<NodeIndex, NodeIndex>> indexed;
  indexed.reserve(edges.size());
  for (const auto& [parent, child] : edges) {
    indexed.emplace_back(index_of(parent), index_of(child));
  }
  std::sort(indexed.begin(), indexed.end());
  indexed.erase(std::unique(indexed.begin(), indexed.end()), indexed.end());
  for (const auto& [parent, child] : indexed) {
    children_[parent].push_back(child);
    ++in_degree[child];
  }
  edges_ = std::move(indexed);

  // Kahn's algorithm; leftover nodes witness a cycle.
  std::vector<NodeIndex> frontier;
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(nodes_.size()); ++i) {
    if (in_degree[i] == 0) frontier.push_back(i);
  }
  topo_.reserve(nodes_.size());
  while (!frontier.empty()) {
    const NodeIndex node = frontier.back();
    frontier.pop_back();
    topo_.push_back(node);
    for (const NodeIndex child : children_[node]) {
      if (--in_degree[child] == 0) frontier.push_back(child);
    }
  }
  if (topo_.size() != nodes_.size()) {
    // Every node Kahn left behind has an unprocessed parent, so walking
    // parent links inside the leftover set must revisit a node and that
    // revisit closes a cycle.
    std::vector<NodeIndex> first_parent(nodes_.size(), -1);
    for (const auto& [parent, child] : edges_) {
      if (in_degree[parent] > 0 && first_parent[child] < 0) {
        first_parent[child] = parent;
      }
    }
    NodeIndex start = 0;
    while (in_degree[start] == 0) ++start;
    std::vector<NodeIndex> walk = {start};
    std::vector<char> visited(nodes_.size(), 0);
    visited[start] = 1;
    for (NodeIndex current = start;;) {
      current = first_parent[current];
      if (visited[current]) {
        const auto begin = std::find(walk.begin(), walk.end(), current);
        std::string cycle = nodes_[current];
        for (auto it = std::make_reverse_iterator(walk.end());
             it != std::make_reverse_iterator(begin); ++it) {
          cycle += " -> " + nodes_[*it];
        }
        throw CycleDetected("genealogy contains a cycle: " + cycle);
      }
      visited[current] = 1;
      walk.push_back(current);
    }
  }
}

NodeIndex GenealogyGraph::index_of(const NodeId& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw UnknownNode("unknown node id: " + id);
  return it->second;
}

ClosureIndex::ClosureIndex(const GenealogyGraph& graph) {
  const std::size_t n = graph.node_count();
  descendants_.resize(n);
  ancestors_.resize(n);
  const auto& topo = graph.topological_order();
  // Reverse topological order: a node's descendants are its children plus
  // their descendants.
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const NodeIndex node = *it;
    for (const NodeIndex child : graph.children(node)) {
      std::vector<NodeIndex> single = {child};
      merge_into(descendants_[node], single);
      merge_into(descendants_[node], descendants_[child]);
    }
  }
  for (NodeIndex u = 0; u < static_cast<NodeIndex>(n); ++u) {
    for (const NodeIndex v : descendants_[u]) {
      ancestors_[v].push_back(u);
    }
  }
  for (auto& anc : ancestors_) std::sort(anc.begin(), anc.end());
}

bool ClosureIndex::is_descendant(NodeIndex node, NodeIndex candidate) const {
  const auto& desc = descendants_[node];
  return std::binary_search(desc.begin(), desc.end(), candidate);
}

std::vector<std::pair<NodeIndex, NodeIndex>> ClosureIndex::positive_pairs()
    const {
  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  pairs.reserve(positive_count());
  for (NodeIndex u = 0; u < static_cast<NodeIndex>(descendants_.size()); ++u) {
    for (const NodeIndex v : descendants_[u]) {
      pairs.emplace_back(u, v);
    }
  }
  return pairs;
}

std::size_t ClosureIndex::positive_count() const {
  std::size_t count = 0;
  for (const auto& desc : descendants_) count += desc.size();
  return count;
}

std::size_t ClosureIndex::eligible_negative_count(NodeIndex u) const {
  return node_count() - descendants_[u].size() - 1;
}

ClosureIndex build_closure(const GenealogyGraph& graph) {
  return ClosureIndex(graph);
}

std::vector<NodeIndex> sample_negatives(NodeIndex u, std::size_t k,
                                        const ClosureIndex& closure,
                                        Rng& rng) {
  const std::size_t n = closure.node_count();
  if (closure.eligible_negative_count(u) == 0) {
    throw NoEligibleNegatives("every other node descends from node " +
                              std::to_string(u));
  }
  std::vector<NodeIndex> samples;
  samples.reserve(k);
  while (samples.size() < k) {
    const auto candidate = static_cast<NodeIndex>(rng.uniform_index(n));
    if (candidate == u || closure.is_descendant(u, candidate)) continue;
    samples.push_back(candidate);
  }
  return samples;
}

}  // namespace lingdist
