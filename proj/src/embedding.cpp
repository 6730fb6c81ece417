#include "lingdist/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "lingdist/errors.hpp"

namespace lingdist {
namespace {

// loss = -log softmax weight of the positive distance. `distances[0]` is the
// positive pair; the rest are negatives. Returns d/d(distance_j) in `dgrad`.
double softmax_loss(const std::vector<double>& distances, bool include_positive,
                    std::vector<double>& dgrad) {
  const std::size_t n = distances.size();
  dgrad.assign(n, 0.0);
  if (include_positive) {
    double max_score = -distances[0];
    for (std::size_t j = 1; j < n; ++j) {
      max_score = std::max(max_score, -distances[j]);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum += std::exp(-distances[j] - max_score);
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double p = std::exp(-distances[j] - max_score) / sum;
      dgrad[j] = (j == 0 ? 1.0 : 0.0) - p;
    }
    return distances[0] + max_score + std::log(sum);
  }
  // Bare ratio objective: denominator runs over the negatives only.
  double max_score = -distances[1];
  for (std::size_t j = 2; j < n; ++j) {
    max_score = std::max(max_score, -distances[j]);
  }
  double sum = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    sum += std::exp(-distances[j] - max_score);
  }
  dgrad[0] = 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    dgrad[j] = -std::exp(-distances[j] - max_score) / sum;
  }
  return distances[0] + max_score + std::log(sum);
}

}  // namespace

EmbeddingTable::EmbeddingTable(Geometry geometry, int dim,
                               std::vector<NodeId> node_ids,
                               Eigen::MatrixXd coords)
    : geometry_(geometry),
      dim_(dim),
      node_ids_(std::move(node_ids)),
      coords_(std::move(coords)) {
  const int ambient = dim + (geometry == Geometry::hyperboloid ? 1 : 0);
  if (coords_.rows() != static_cast<Eigen::Index>(node_ids_.size()) ||
      coords_.cols() != ambient) {
    throw DimensionMismatch("embedding table shape mismatch");
  }
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(node_ids_.size()); ++i) {
    index_[node_ids_[i]] = i;
  }
}

NodeIndex EmbeddingTable::index_of(const NodeId& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw UnknownNode("unknown node id: " + id);
  return it->second;
}

double EmbeddingTable::distance(NodeIndex a, NodeIndex b) const {
  return geometry_distance(geometry_, coords_.row(a).transpose(),
                           coords_.row(b).transpose(), kTableEpsilon);
}

double EmbeddingTable::distance(const NodeId& a, const NodeId& b) const {
  return distance(index_of(a), index_of(b));
}

double EmbeddingTable::dmax() const {
  if (!dmax_) throw DegenerateTable("d_max has not been computed");
  return *dmax_;
}

double contrastive_loss(const NodeId& u, const NodeId& v,
                        const std::vector<NodeId>& negatives,
                        const EmbeddingTable& table, bool include_positive) {
  std::vector<double> distances;
  distances.reserve(negatives.size() + 1);
  distances.push_back(table.distance(u, v));
  for (const NodeId& w : negatives) distances.push_back(table.distance(u, w));
  std::vector<double> unused;
  return softmax_loss(distances, include_positive, unused);
}

double contrastive_loss_grad(Geometry geometry, VectorRef u, VectorRef v,
                             const std::vector<Eigen::VectorXd>& negatives,
                             double epsilon, bool include_positive,
                             Eigen::VectorXd& grad_u, Eigen::VectorXd& grad_v,
                             std::vector<Eigen::VectorXd>& grad_negatives) {
  const std::size_t k = negatives.size();
  std::vector<double> distances(k + 1);
  std::vector<Eigen::VectorXd> dist_grad_u(k + 1);
  std::vector<Eigen::VectorXd> dist_grad_other(k + 1);
  distances[0] = geometry_distance_grad(geometry, u, v, epsilon,
                                        dist_grad_u[0], dist_grad_other[0]);
  for (std::size_t j = 0; j < k; ++j) {
    distances[j + 1] =
        geometry_distance_grad(geometry, u, negatives[j], epsilon,
                               dist_grad_u[j + 1], dist_grad_other[j + 1]);
  }
  std::vector<double> dgrad;
  const double loss = softmax_loss(distances, include_positive, dgrad);

  grad_u = Eigen::VectorXd::Zero(u.size());
  for (std::size_t j = 0; j <= k; ++j) grad_u += dgrad[j] * dist_grad_u[j];
  grad_v = dgrad[0] * dist_grad_other[0];
  grad_negatives.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    grad_negatives[j] = dgrad[j + 1] * dist_grad_other[j + 1];
  }
  return loss;
}

TrainResult train_embeddings(const GenealogyGraph& graph,
                             const TrainConfig& config) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw EmptyGraph("cannot train on an empty genealogy");
  const ClosureIndex closure = build_closure(graph);

  Rng rng(config.rng_seed);
  const int ambient =
      config.dim + (config.geometry == Geometry::hyperboloid ? 1 : 0);
  Eigen::MatrixXd coords(n, ambient);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd spatial(config.dim);
    for (int d = 0; d < config.dim; ++d) spatial[d] = rng.uniform(-1e-3, 1e-3);
    if (config.geometry == Geometry::hyperboloid) {
      coords.row(i) = hyperboloid_lift(spatial).transpose();
    } else {
      coords.row(i) = spatial.transpose();
    }
  }

  auto pairs = closure.positive_pairs();
  std::vector<double> epoch_loss;
  epoch_loss.reserve(config.epochs);
  Eigen::VectorXd grad_u;
  Eigen::VectorXd grad_v;
  std::vector<Eigen::VectorXd> grad_neg;
  std::vector<Eigen::VectorXd> negative_points;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = (epoch < config.burn_in_epochs)
                          ? config.learning_rate * config.burn_in_factor
                          : config.learning_rate;
    rng.shuffle(pairs);
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (const auto& [u, v] : pairs) {
      if (closure.eligible_negative_count(u) == 0) continue;
      const std::vector<NodeIndex> negatives =
          sample_negatives(u, config.negatives, closure, rng);
      negative_points.assign(negatives.size(), Eigen::VectorXd());
      for (std::size_t j = 0; j < negatives.size(); ++j) {
        negative_points[j] = coords.row(negatives[j]).transpose();
      }
      const double loss = contrastive_loss_grad(
          config.geometry, coords.row(u).transpose(),
          coords.row(v).transpose(), negative_points, config.epsilon,
          config.loss_includes_positive, grad_u, grad_v, grad_neg);
      loss_sum += loss;
      ++loss_count;

      coords.row(u) =
          geometry_step(config.geometry, coords.row(u).transpose(), grad_u, lr,
                        config.epsilon, config.grad_clip, config.spatial_clip)
              .transpose();
      coords.row(v) =
          geometry_step(config.geometry, coords.row(v).transpose(), grad_v, lr,
                        config.epsilon, config.grad_clip, config.spatial_clip)
              .transpose();
      for (std::size_t j = 0; j < negatives.size(); ++j) {
        coords.row(negatives[j]) =
            geometry_step(config.geometry, coords.row(negatives[j]).transpose(),
                          grad_neg[j], lr, config.epsilon, config.grad_clip,
                          config.spatial_clip)
                .transpose();
      }
    }
    epoch_loss.push_back(loss_count > 0 ? loss_sum / loss_count : 0.0);
  }

  TrainResult result{
      EmbeddingTable(config.geometry, config.dim, graph.nodes(),
                     std::move(coords)),
      std::move(epoch_loss)};
  if (n >= 2) compute_dmax(result.table);
  return result;
}

double compute_dmax(EmbeddingTable& table) {
  const auto n = static_cast<NodeIndex>(table.node_count());
  if (n < 2) throw TooFewNodes("d_max needs at least two embedded nodes");
  double best = 0.0;
  for (NodeIndex i = 0; i < n; ++i) {
    for (NodeIndex j = i + 1; j < n; ++j) {
      best = std::max(best, table.distance(i, j));
    }
  }
  if (best <= 0.0) {
    throw DegenerateTable("all embedded points coincide");
  }
  table.set_dmax(best);
  return best;
}

double genetic_distance(const NodeId& a, const NodeId& b,
                        const EmbeddingTable& table) {
  return table.distance(a, b) / table.dmax();
}

ReconstructionMetrics eval_reconstruction(const EmbeddingTable& table,
                                          const ClosureIndex& closure) {
  const auto n = static_cast<NodeIndex>(table.node_count());
  if (closure.node_count() != table.node_count()) {
    throw DimensionMismatch("closure and table node counts differ");
  }
  double rank_sum = 0.0;
  std::size_t rank_count = 0;
  double ap_sum = 0.0;
  std::size_t ap_count = 0;
  std::vector<double> dist(n);
  for (NodeIndex u = 0; u < n; ++u) {
    const auto& ancestors = closure.ancestors(u);
    if (ancestors.empty()) continue;
    for (NodeIndex v = 0; v < n; ++v) {
      if (v != u) dist[v] = table.distance(u, v);
    }
    // Filtered rank per ancestor: only strictly closer non-ancestors count.
    for (const NodeIndex a : ancestors) {
      std::size_t closer = 0;
      for (NodeIndex v = 0; v < n; ++v) {
        if (v == u || v == a) continue;
        if (std::binary_search(ancestors.begin(), ancestors.end(), v)) continue;
        if (dist[v] < dist[a]) ++closer;
      }
      rank_sum += static_cast<double>(1 + closer);
      ++rank_count;
    }
    // Average precision over the full ranking, ancestors first on ties.
    std::vector<std::pair<double, int>> ranked;  // (distance, is_ancestor)
    ranked.reserve(n - 1);
    for (NodeIndex v = 0; v < n; ++v) {
      if (v == u) continue;
      const bool anc =
          std::binary_search(ancestors.begin(), ancestors.end(), v);
      ranked.emplace_back(dist[v], anc ? 0 : 1);
    }
    std::sort(ranked.begin(), ranked.end());
    double precision_sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
      if (ranked[k].second == 0) {
        ++hits;
        precision_sum +=
            static_cast<double>(hits) / static_cast<double>(k + 1);
      }
    }
    ap_sum += precision_sum / static_cast<double>(ancestors.size());
    ++ap_count;
  }
  if (rank_count == 0) {
    throw NoAncestorPairs("no node has a strict ancestor");
  }
  return {rank_sum / static_cast<double>(rank_count),
          ap_sum / static_cast<double>(ap_count)};
}

Geometry geometry_from_name(const std::string& name) {
  if (name == "poincare") return Geometry::poincare;
  if (name == "hyperboloid") return Geometry::hyperboloid;
  if (name == "euclidean") return Geometry::euclidean;
  throw Error("unknown geometry: " + name);
}

std::string geometry_name(Geometry geometry) {
  switch (geometry) {
    case Geometry::poincare:
      return "poincare";
    case Geometry::hyperboloid:
      return "hyperboloid";
    case Geometry::euclidean:
      return "euclidean";
  }
  return "unknown";
}

}  // namespace lingdist
