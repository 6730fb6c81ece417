// Embedding tables over a genealogy graph, the contrastive training loop,
// and the ancestor-retrieval evaluation (mean rank / mean average precision).
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "lingdist/genealogy.hpp"
#include "lingdist/geometry.hpp"

namespace lingdist {

// Distance queries on a finalized table always clamp with this epsilon, so
// saved artifacts reproduce identical distances after reload regardless of
// the epsilon used during training.
inline constexpr double kTableEpsilon = 1e-7;

struct TrainConfig {
  Geometry geometry = Geometry::hyperboloid;
  int dim = 10;  // intrinsic dimension; hyperboloid stores dim + 1 coords
  int epochs = 300;
  double learning_rate = 0.1;  // 0.3 is the usual choice for the ball model
  int burn_in_epochs = 20;
  double burn_in_factor = 0.1;
  int negatives = 10;
  double epsilon = 1e-7;
  double grad_clip = 1.0;
  double spatial_clip = 1e6;
  std::uint64_t rng_seed = 42;
  // The softmax denominator includes the positive pair by default, which
  // keeps the loss bounded; disable to recover the bare ratio objective.
  bool loss_includes_positive = true;
};

class EmbeddingTable {
 public:
  EmbeddingTable(Geometry geometry, int dim, std::vector<NodeId> node_ids,
                 Eigen::MatrixXd coords);

  Geometry geometry() const { return geometry_; }
  int dim() const { return dim_; }
  int ambient_dim() const { return static_cast<int>(coords_.cols()); }
  std::size_t node_count() const { return node_ids_.size(); }
  const std::vector<NodeId>& node_ids() const { return node_ids_; }
  NodeIndex index_of(const NodeId& id) const;  // throws UnknownNode
  const Eigen::MatrixXd& coords() const { return coords_; }
  Eigen::MatrixXd& coords() { return coords_; }

  double distance(NodeIndex a, NodeIndex b) const;
  double distance(const NodeId& a, const NodeId& b) const;

  bool has_dmax() const { return dmax_.has_value(); }
  double dmax() const;  // throws DegenerateTable when unset
  void set_dmax(double value) { dmax_ = value; }

 private:
  Geometry geometry_;
  int dim_;
  std::vector<NodeId> node_ids_;
  std::unordered_map<NodeId, NodeIndex> index_;
  Eigen::MatrixXd coords_;  // one row per node, ambient coordinates
  std::optional<double> dmax_;
};

// Softmax-based contrastive loss for one positive pair against K sampled
// negatives. Distances are taken from the table with the table epsilon.
double contrastive_loss(const NodeId& u, const NodeId& v,
                        const std::vector<NodeId>& negatives,
                        const EmbeddingTable& table,
                        bool include_positive = true);

// Loss plus Euclidean gradients with respect to u, v and each negative, in
// that order. Exposed so the gradients can be checked against finite
// differences; the trainer uses it directly.
double contrastive_loss_grad(Geometry geometry, VectorRef u, VectorRef v,
                             const std::vector<Eigen::VectorXd>& negatives,
                             double epsilon, bool include_positive,
                             Eigen::VectorXd& grad_u, Eigen::VectorXd& grad_v,
                             std::vector<Eigen::VectorXd>& grad_negatives);

struct TrainResult {
  EmbeddingTable table;
  std::vector<double> epoch_mean_loss;
};

// Contrastive Riemannian SGD over all transitive-closure positive pairs.
// Deterministic for a fixed seed. Pairs whose head has no eligible negative
// (a root covering the whole graph) contribute zero gradient and are
// skipped. The returned table has d_max cached.
TrainResult train_embeddings(const GenealogyGraph& graph,
                             const TrainConfig& config);

// Exact maximum pairwise distance; throws TooFewNodes / DegenerateTable.
double compute_dmax(EmbeddingTable& table);

// distance(a, b) / d_max, in [0, 1].
double genetic_distance(const NodeId& a, const NodeId& b,
                        const EmbeddingTable& table);

struct ReconstructionMetrics {
  double mean_rank = 0.0;         // >= 1
  double mean_average_precision = 0.0;  // in [0, 1]
};

// Ancestor retrieval quality. For each node, all other nodes are ranked by
// distance; ranks are filtered to non-ancestors and ties favor the ancestor
// (strictly smaller distances only).
ReconstructionMetrics eval_reconstruction(const EmbeddingTable& table,
                                          const ClosureIndex& closure);

Geometry geometry_from_name(const std::string& name);  // throws Error
std::string geometry_name(Geometry geometry);

}  // namespace lingdist
