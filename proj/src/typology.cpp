#include "lingdist/typology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lingdist/errors.hpp"

namespace lingdist {
namespace {

constexpr double kThetaFloor = 1e-6;
constexpr double kEmTol = 1e-6;
constexpr int kEmMaxIterations = 200;
constexpr int kMaxRefinePasses = 50;

double clamp_theta(double x) {
  return std::min(std::max(x, kThetaFloor), 1.0 - kThetaFloor);
}

// Observation masks for a feature subset, restricted to languages with at
// least one observed member feature.
struct SubsetData {
  Eigen::MatrixXd ones;   // 1 where the cell is observed and equals 1
  Eigen::MatrixXd zeros;  // 1 where the cell is observed and equals 0
  std::size_t n_samples = 0;
};

SubsetData subset_data(const FeatureMatrix& m, const std::vector<int>& cols) {
  const int n = static_cast<int>(m.language_count());
  const int f = static_cast<int>(cols.size());
  std::vector<int> kept;
  kept.reserve(n);
  for (int row = 0; row < n; ++row) {
    for (const int col : cols) {
      if (m.value(row, col) >= 0) {
        kept.push_back(row);
        break;
      }
    }
  }
  SubsetData data;
  data.n_samples = kept.size();
  data.ones = Eigen::MatrixXd::Zero(static_cast<int>(kept.size()), f);
  data.zeros = Eigen::MatrixXd::Zero(static_cast<int>(kept.size()), f);
  for (std::size_t r = 0; r < kept.size(); ++r) {
    for (int j = 0; j < f; ++j) {
      const int v = m.value(kept[r], cols[j]);
      if (v == 1) data.ones(static_cast<int>(r), j) = 1.0;
      if (v == 0) data.zeros(static_cast<int>(r), j) = 1.0;
    }
  }
  return data;
}

std::vector<int> feature_indices(const FeatureMatrix& m,
                                 const std::vector<FeatureId>& ids) {
  std::vector<int> cols;
  cols.reserve(ids.size());
  for (const FeatureId& id : ids) cols.push_back(m.feature_index(id));
  return cols;
}

// One EM run from a random start; returns final log-likelihood.
double em_single_run(const SubsetData& data, Rng& rng, Eigen::Vector2d& prior,
                     Eigen::MatrixXd& theta, std::vector<double>* trace) {
  const auto n = static_cast<double>(data.ones.rows());
  const int f = static_cast<int>(data.ones.cols());
  prior << 0.5, 0.5;
  theta.resize(f, 2);
  for (int j = 0; j < f; ++j) {
    for (int k = 0; k < 2; ++k) theta(j, k) = clamp_theta(rng.uniform01());
  }
  const Eigen::MatrixXd observed = data.ones + data.zeros;
  double loglik = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < kEmMaxIterations; ++iter) {
    // E-step in the log domain; missing cells simply contribute no factor.
    const Eigen::MatrixXd log_theta = theta.array().log().matrix();
    const Eigen::MatrixXd log_1m_theta =
        (1.0 - theta.array()).log().matrix();
    Eigen::MatrixXd scores = data.ones * log_theta + data.zeros * log_1m_theta;
    scores.col(0).array() += std::log(prior[0]);
    scores.col(1).array() += std::log(prior[1]);
    const Eigen::VectorXd row_max = scores.rowwise().maxCoeff();
    const Eigen::MatrixXd shifted =
        (scores.colwise() - row_max).array().exp().matrix();
    const Eigen::VectorXd norm = shifted.rowwise().sum();
    const double new_loglik =
        (row_max.array() + norm.array().log()).sum();
    if (trace) trace->push_back(new_loglik);
    const bool converged = iter > 0 && new_loglik - loglik < kEmTol;
    loglik = new_loglik;
    if (converged) break;
    const Eigen::MatrixXd resp =
        shifted.array().colwise() / norm.array();
    // M-step.
    prior = (resp.colwise().sum() / n).transpose();
    const Eigen::MatrixXd numer = data.ones.transpose() * resp;
    const Eigen::MatrixXd denom = observed.transpose() * resp;
    for (int j = 0; j < f; ++j) {
      for (int k = 0; k < 2; ++k) {
        const double d = denom(j, k);
        theta(j, k) = clamp_theta(d > 0.0 ? numer(j, k) / d : 0.5);
      }
    }
  }
  return loglik;
}

// Mutual information by column index; callers have already validated ids.
double mutual_information_cols(const FeatureMatrix& m, int ci, int cj) {
  double counts[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  int total = 0;
  for (int row = 0; row < static_cast<int>(m.language_count()); ++row) {
    const int a = m.value(row, ci);
    const int b = m.value(row, cj);
    if (a < 0 || b < 0) continue;
    counts[a][b] += 1.0;
    ++total;
  }
  if (total < 2) return 0.0;
  const double n = total + 2.0;  // add-0.5 smoothing over four cells
  double mi = 0.0;
  const double pa[2] = {(counts[0][0] + counts[0][1] + 1.0) / n,
                        (counts[1][0] + counts[1][1] + 1.0) / n};
  const double pb[2] = {(counts[0][0] + counts[1][0] + 1.0) / n,
                        (counts[0][1] + counts[1][1] + 1.0) / n};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double pab = (counts[a][b] + 0.5) / n;
      mi += pab * std::log(pab / (pa[a] * pb[b]));
    }
  }
  return std::max(mi, 0.0);
}

// LCM for subsets too sparse for EM (member features observed in fewer than
// two languages): uniform prior, both theta columns at the observed mean.
LatentClassModel degenerate_model(const FeatureMatrix& m,
                                  const std::vector<FeatureId>& ids,
                                  const SubsetData& data) {
  const auto cols = feature_indices(m, ids);
  LatentClassModel model;
  model.feature_ids = ids;
  model.prior << 0.5, 0.5;
  model.theta.resize(static_cast<int>(cols.size()), 2);
  model.loglik = 0.0;
  model.n_samples = data.n_samples;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    double sum = 0.0;
    int seen = 0;
    for (int row = 0; row < static_cast<int>(m.language_count()); ++row) {
      const int v = m.value(row, cols[j]);
      if (v < 0) continue;
      sum += v;
      ++seen;
    }
    const double mean = seen > 0 ? clamp_theta(sum / seen) : 0.5;
    model.theta(static_cast<int>(j), 0) = mean;
    model.theta(static_cast<int>(j), 1) = mean;
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const double p = model.theta(static_cast<int>(j), 0);
    for (int row = 0; row < static_cast<int>(m.language_count()); ++row) {
      const int v = m.value(row, cols[j]);
      if (v < 0) continue;
      model.loglik += std::log(v == 1 ? p : 1.0 - p);
    }
  }
  return model;
}

LatentClassModel fit_or_degenerate(const FeatureMatrix& m,
                                   const std::vector<FeatureId>& ids,
                                   int restarts, Rng& rng) {
  const auto cols = feature_indices(m, ids);
  const SubsetData data = subset_data(m, cols);
  if (data.n_samples < 2) return degenerate_model(m, ids, data);
  return em_fit_lcm(m, ids, restarts, rng);
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::vector<LanguageId> languages,
                             std::vector<FeatureId> features,
                             Eigen::MatrixXi values)
    : languages_(std::move(languages)),
      features_(std::move(features)),
      values_(std::move(values)) {
  if (values_.rows() != static_cast<Eigen::Index>(languages_.size()) ||
      values_.cols() != static_cast<Eigen::Index>(features_.size())) {
    throw InvalidFeatureMatrix("value matrix shape mismatch");
  }
  if (languages_.size() < 2 || features_.size() < 2) {
    throw InvalidFeatureMatrix("need at least 2 languages and 2 features");
  }
  for (Eigen::Index c = 0; c < values_.cols(); ++c) {
    bool observed = false;
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
      const int v = values_(r, c);
      if (v != -1 && v != 0 && v != 1) {
        throw InvalidFeatureMatrix("cell values must be 0, 1 or missing");
      }
      observed = observed || v >= 0;
    }
    if (!observed) {
      throw InvalidFeatureMatrix("feature '" + features_[c] +
                                 "' has no observed value");
    }
  }
  for (std::size_t i = 0; i < languages_.size(); ++i) {
    if (!language_index_.emplace(languages_[i], static_cast<int>(i)).second) {
      throw InvalidFeatureMatrix("duplicate language id: " + languages_[i]);
    }
  }
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (!feature_index_.emplace(features_[i], static_cast<int>(i)).second) {
      throw InvalidFeatureMatrix("duplicate feature id: " + features_[i]);
    }
  }
}

int FeatureMatrix::language_index(const LanguageId& id) const {
  const auto it = language_index_.find(id);
  if (it == language_index_.end()) {
    throw UnknownLanguage("unknown language id: " + id);
  }
  return it->second;
}

int FeatureMatrix::feature_index(const FeatureId& id) const {
  const auto it = feature_index_.find(id);
  if (it == feature_index_.end()) {
    throw UnknownFeature("unknown feature id: " + id);
  }
  return it->second;
}

double FeatureMatrix::missing_rate() const {
  const auto total = static_cast<double>(values_.size());
  const double missing =
      static_cast<double>((values_.array() == -1).count());
  return missing / total;
}

double mutual_information(const FeatureId& fi, const FeatureId& fj,
                          const FeatureMatrix& m) {
  return mutual_information_cols(m, m.feature_index(fi), m.feature_index(fj));
}

LatentClassModel em_fit_lcm(const FeatureMatrix& m,
                            const std::vector<FeatureId>& feature_subset,
                            int restarts, Rng& rng,
                            EmDiagnostics* diagnostics) {
  if (feature_subset.empty()) {
    throw InsufficientData("feature subset is empty");
  }
  const auto cols = feature_indices(m, feature_subset);
  const SubsetData data = subset_data(m, cols);
  if (data.n_samples < 2) {
    throw InsufficientData("fewer than 2 languages observe the subset");
  }

  LatentClassModel best;
  best.feature_ids = feature_subset;
  best.n_samples = data.n_samples;
  best.loglik = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Eigen::Vector2d prior;
    Eigen::MatrixXd theta;
    std::vector<double> trace;
    const double loglik = em_single_run(
        data, rng, prior, theta, diagnostics ? &trace : nullptr);
    if (diagnostics) diagnostics->restart_loglik.push_back(std::move(trace));
    if (loglik > best.loglik) {
      best.loglik = loglik;
      best.prior = prior;
      best.theta = theta;
    }
  }
  return best;
}

double modified_bic_value(double k, double n, double loglik) {
  return 2.0 * k * k * std::log(n) - 2.0 * loglik;
}

double modified_bic(const LatentClassModel& model) {
  const double k = 2.0 * static_cast<double>(model.feature_ids.size()) + 1.0;
  const double n = std::max<double>(static_cast<double>(model.n_samples), 1.0);
  return modified_bic_value(k, n, model.loglik);
}

std::optional<SplitProposal> split_active_set(
    const FeatureMatrix& m, const std::vector<FeatureId>& active, Rng& rng,
    int restarts) {
  if (active.size() < 2) {
    throw InsufficientData("split needs an active set of >= 2 features");
  }
  const LatentClassModel whole = em_fit_lcm(m, active, restarts, rng);
  const double whole_bic = modified_bic(whole);

  std::vector<FeatureId> group1;
  std::vector<FeatureId> group2;
  for (std::size_t j = 0; j < active.size(); ++j) {
    if (whole.theta(static_cast<int>(j), 1) >
        whole.theta(static_cast<int>(j), 0)) {
      group1.push_back(active[j]);
    } else {
      group2.push_back(active[j]);
    }
  }
  if (group1.empty() || group2.empty()) {
    // Degenerate contrast; seed two groups with the least-coupled pair and
    // attach every other feature to the seed it shares more MI with.
    std::size_t seed1 = 0;
    std::size_t seed2 = 1;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const double mi = mutual_information(active[i], active[j], m);
        if (mi < lowest) {
          lowest = mi;
          seed1 = i;
          seed2 = j;
        }
      }
    }
    group1 = {active[seed1]};
    group2 = {active[seed2]};
    for (std::size_t j = 0; j < active.size(); ++j) {
      if (j == seed1 || j == seed2) continue;
      const double to1 = mutual_information(active[j], active[seed1], m);
      const double to2 = mutual_information(active[j], active[seed2], m);
      (to1 >= to2 ? group1 : group2).push_back(active[j]);
    }
  }

  LatentClassModel model1 = fit_or_degenerate(m, group1, restarts, rng);
  LatentClassModel model2 = fit_or_degenerate(m, group2, restarts, rng);
  double split_bic = modified_bic(model1) + modified_bic(model2);
  if (!(split_bic < whole_bic)) return std::nullopt;

  // First-improvement refinement: move single features between the groups
  // while the summed BIC strictly improves.
  for (int pass = 0; pass < kMaxRefinePasses; ++pass) {
    bool improved = false;
    for (const FeatureId& id : active) {
      const bool in1 =
          std::find(group1.begin(), group1.end(), id) != group1.end();
      std::vector<FeatureId>& from = in1 ? group1 : group2;
      std::vector<FeatureId>& to = in1 ? group2 : group1;
      if (from.size() == 1) continue;  // both groups stay non-empty
      std::vector<FeatureId> new_from;
      for (const FeatureId& f : from) {
        if (f != id) new_from.push_back(f);
      }
      std::vector<FeatureId> new_to = to;
      new_to.push_back(id);
      LatentClassModel fit_from = fit_or_degenerate(m, new_from, restarts, rng);
      LatentClassModel fit_to = fit_or_degenerate(m, new_to, restarts, rng);
      const double candidate = modified_bic(fit_from) + modified_bic(fit_to);
      if (candidate < split_bic) {
        split_bic = candidate;
        from = std::move(new_from);
        to = std::move(new_to);
        (in1 ? model1 : model2) = std::move(fit_from);
        (in1 ? model2 : model1) = std::move(fit_to);
        improved = true;
      }
    }
    if (!improved) break;
  }
  return SplitProposal{std::move(group1), std::move(group2),
                       std::move(model1), std::move(model2)};
}

IslandModel greedy_island_build(const FeatureMatrix& m, Rng& rng,
                                const IslandBuildConfig& config) {
  const int f = static_cast<int>(m.feature_count());
  Eigen::MatrixXd mi = Eigen::MatrixXd::Zero(f, f);
  for (int i = 0; i < f; ++i) {
    for (int j = i + 1; j < f; ++j) {
      mi(i, j) = mi(j, i) = mutual_information_cols(m, i, j);
    }
  }

  std::vector<char> assigned(f, 0);
  int unassigned = f;
  IslandModel result;

  auto add_island = [&](const std::vector<FeatureId>& ids,
                        LatentClassModel model) {
    const std::size_t index = result.islands.size();
    for (const FeatureId& id : ids) {
      assigned[m.feature_index(id)] = 1;
      --unassigned;
      result.provenance[id] = index;
    }
    result.islands.push_back(std::move(model));
  };

  while (unassigned >= 2) {
    // Seed: the unassigned pair with the highest MI.
    int seed_a = -1;
    int seed_b = -1;
    double best_mi = -1.0;
    for (int i = 0; i < f; ++i) {
      if (assigned[i]) continue;
      for (int j = i + 1; j < f; ++j) {
        if (assigned[j]) continue;
        if (mi(i, j) > best_mi) {
          best_mi = mi(i, j);
          seed_a = i;
          seed_b = j;
        }
      }
    }
    std::vector<int> active = {seed_a, seed_b};
    const int seed_first = seed_a;

    while (true) {
      // Grow by the unassigned feature with the highest mean MI to the
      // active set, while there is room.
      bool grown = false;
      if (static_cast<int>(active.size()) < config.max_active &&
          unassigned > static_cast<int>(active.size())) {
        int best_feature = -1;
        double best_score = -1.0;
        for (int c = 0; c < f; ++c) {
          if (assigned[c]) continue;
          if (std::find(active.begin(), active.end(), c) != active.end()) {
            continue;
          }
          double score = 0.0;
          for (const int a : active) score += mi(c, a);
          score /= static_cast<double>(active.size());
          if (score > best_score) {
            best_score = score;
            best_feature = c;
          }
        }
        if (best_feature >= 0) {
          active.push_back(best_feature);
          grown = true;
        }
      }

      std::vector<FeatureId> active_ids;
      active_ids.reserve(active.size());
      for (const int c : active) active_ids.push_back(m.features()[c]);
      auto proposal = split_active_set(m, active_ids, rng, config.restarts);
      if (proposal) {
        const bool first_in_g1 =
            std::find(proposal->group1.begin(), proposal->group1.end(),
                      m.features()[seed_first]) != proposal->group1.end();
        const bool take_g1 =
            proposal->group1.size() > proposal->group2.size() ||
            (proposal->group1.size() == proposal->group2.size() &&
             first_in_g1);
        if (take_g1) {
          add_island(proposal->group1, std::move(proposal->model1));
        } else {
          add_island(proposal->group2, std::move(proposal->model2));
        }
        break;  // the smaller group stays unassigned and returns to the pool
      }
      if (!grown) {
        // Maximal active set with no accepted split becomes one island.
        add_island(active_ids,
                   fit_or_degenerate(m, active_ids, config.restarts, rng));
        break;
      }
    }
  }

  // Leftover single features become singleton islands.
  for (int c = 0; c < f; ++c) {
    if (assigned[c]) continue;
    const std::vector<FeatureId> ids = {m.features()[c]};
    add_island(ids, fit_or_degenerate(m, ids, config.restarts, rng));
  }
  return result;
}

Eigen::VectorXd posterior_vector(const LanguageId& lang,
                                 const IslandModel& model,
                                 const FeatureMatrix& m) {
  const int row = m.language_index(lang);
  Eigen::VectorXd out(2 * static_cast<Eigen::Index>(model.islands.size()));
  for (std::size_t i = 0; i < model.islands.size(); ++i) {
    const LatentClassModel& island = model.islands[i];
    Eigen::Vector2d logp = island.prior.array().log().matrix();
    for (std::size_t j = 0; j < island.feature_ids.size(); ++j) {
      const int col = m.feature_index(island.feature_ids[j]);
      const int v = m.value(row, col);
      if (v < 0) continue;
      for (int k = 0; k < 2; ++k) {
        const double theta = island.theta(static_cast<int>(j), k);
        logp[k] += std::log(v == 1 ? theta : 1.0 - theta);
      }
    }
    const double shift = logp.maxCoeff();
    const Eigen::Vector2d exps = (logp.array() - shift).exp().matrix();
    const double norm = exps.sum();
    out[2 * static_cast<Eigen::Index>(i)] = exps[0] / norm;
    out[2 * static_cast<Eigen::Index>(i) + 1] = exps[1] / norm;
  }
  return out;
}

double angular_distance(Eigen::Ref<const Eigen::VectorXd> u,
                        Eigen::Ref<const Eigen::VectorXd> v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("angular distance on mismatched dimensions");
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw ZeroVector("angular distance of a zero vector");
  }
  if (u == v) return 0.0;
  const double cosine = std::clamp(u.dot(v) / (nu * nv), 0.0, 1.0);
  return 2.0 / 3.14159265358979323846 * std::acos(cosine);
}

double typology_distance(const LanguageId& a, const LanguageId& b,
                         const IslandModel& model, const FeatureMatrix& m) {
  return angular_distance(posterior_vector(a, model, m),
                          posterior_vector(b, model, m));
}

}  // namespace lingdist
