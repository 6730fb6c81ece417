// Typological modality: binary feature matrices with missing entries,
// 2-state latent class models fitted by EM, greedy construction of feature
// "islands" arbitrated by a quadratically penalized BIC, and angular
// distances between concatenated island posteriors.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lingdist/random.hpp"

namespace lingdist {

using LanguageId = std::string;
using FeatureId = std::string;

// Rectangular matrix of {0, 1, missing} cells; missing is stored as -1.
class FeatureMatrix {
 public:
  FeatureMatrix(std::vector<LanguageId> languages,
                std::vector<FeatureId> features, Eigen::MatrixXi values);

  const std::vector<LanguageId>& languages() const { return languages_; }
  const std::vector<FeatureId>& features() const { return features_; }
  std::size_t language_count() const { return languages_.size(); }
  std::size_t feature_count() const { return features_.size(); }
  int language_index(const LanguageId& id) const;  // throws UnknownLanguage
  int feature_index(const FeatureId& id) const;    // throws UnknownFeature
  // -1 = missing, otherwise 0/1.
  int value(int language, int feature) const { return values_(language, feature); }
  const Eigen::MatrixXi& values() const { return values_; }
  double missing_rate() const;

 private:
  std::vector<LanguageId> languages_;
  std::vector<FeatureId> features_;
  std::unordered_map<LanguageId, int> language_index_;
  std::unordered_map<FeatureId, int> feature_index_;
  Eigen::MatrixXi values_;
};

struct LatentClassModel {
  std::vector<FeatureId> feature_ids;
  Eigen::Vector2d prior;   // P(Z = k), sums to 1
  Eigen::MatrixXd theta;   // theta(j, k) = P(w_j = 1 | Z = k), clamped
  double loglik = 0.0;
  std::size_t n_samples = 0;  // languages with >= 1 observed member feature
};

struct IslandModel {
  std::vector<LatentClassModel> islands;
  // feature id -> index into `islands`; every input feature appears exactly
  // once (singletons allowed).
  std::unordered_map<FeatureId, std::size_t> provenance;
};

// Per-restart log-likelihood traces, for monotonicity checks.
struct EmDiagnostics {
  std::vector<std::vector<double>> restart_loglik;
};

// Empirical mutual information (nats) between two features over languages
// where both are observed, from the add-0.5-smoothed 2x2 table; 0 when fewer
// than two such languages exist.
double mutual_information(const FeatureId& fi, const FeatureId& fj,
                          const FeatureMatrix& m);

// EM fit of a 2-state latent class model on a feature subset. Missing cells
// are marginalized (products over observed features only); per restart EM
// runs until the log-likelihood improves by < 1e-6 or 200 iterations, and
// the best restart wins. Throws InsufficientData.
LatentClassModel em_fit_lcm(const FeatureMatrix& m,
                            const std::vector<FeatureId>& feature_subset,
                            int restarts, Rng& rng,
                            EmDiagnostics* diagnostics = nullptr);

// 2 k^2 ln(n) - 2 l with k free parameters, n samples, l log-likelihood.
double modified_bic_value(double k, double n, double loglik);

// The criterion above with k = 2 |features| + 1 (theta matrix plus one free
// prior weight). Lower is better.
double modified_bic(const LatentClassModel& model);

struct SplitProposal {
  std::vector<FeatureId> group1;
  std::vector<FeatureId> group2;
  LatentClassModel model1;
  LatentClassModel model2;
};

// Attempts to split `active` in two. The candidate bipartition separates
// features by the sign of the whole-set theta contrast (MI-seeded fallback
// when one side is empty); the split is kept iff BIC(G1) + BIC(G2) <
// BIC(whole), then refined by first-improvement single-feature moves while
// the summed BIC strictly improves (at most 50 passes).
std::optional<SplitProposal> split_active_set(
    const FeatureMatrix& m, const std::vector<FeatureId>& active, Rng& rng,
    int restarts = 5);

struct IslandBuildConfig {
  int restarts = 5;
  int max_active = 12;  // growth cap for the active set
};

// Greedy island construction: seed with the highest-MI unassigned pair, grow
// by mean MI against the active set, split via BIC; an accepted split turns
// the larger group into an island and returns the rest to the pool.
IslandModel greedy_island_build(const FeatureMatrix& m, Rng& rng,
                                const IslandBuildConfig& config = {});

// Concatenated per-island posteriors (P(z=0|w), P(z=1|w))_i for a language;
// islands with no observed features for the language contribute their prior.
Eigen::VectorXd posterior_vector(const LanguageId& lang,
                                 const IslandModel& model,
                                 const FeatureMatrix& m);

// (2/pi) * arccos of cosine similarity clamped to [0, 1]; nonnegative inputs
// land in [0, 1] with 0 for parallel and 1 for orthogonal vectors.
double angular_distance(Eigen::Ref<const Eigen::VectorXd> u,
                        Eigen::Ref<const Eigen::VectorXd> v);

double typology_distance(const LanguageId& a, const LanguageId& b,
                         const IslandModel& model, const FeatureMatrix& m);

}  // namespace lingdist
