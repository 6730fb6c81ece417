#include "lingdist/composite.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "lingdist/errors.hpp"

namespace lingdist {

double weighted_distance(const std::vector<std::optional<double>>& distances,
                         const std::vector<double>& weights) {
  if (distances.size() != weights.size()) {
    throw DimensionMismatch("distance/weight arity mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    if (!distances[i]) {
      throw MissingModality("modality " + std::to_string(i) +
                            " is weighted but unavailable");
    }
    sum += weights[i] * *distances[i];
  }
  return sum;
}

double composite_distance(const DistanceTriple& t, const ModalityWeights& w) {
  const auto d = t.as_array();
  const auto wa = w.as_array();
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (wa[i] == 0.0) continue;
    if (!d[i]) {
      throw MissingModality(std::string("modality '") + kModalityNames[i] +
                            "' is weighted but unavailable");
    }
    sum += wa[i] * *d[i];
  }
  return sum;
}

ModalityWeights uniform_weights() {
  return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
}

std::array<double, 4> ols_coefficients(const std::vector<WeightFitRow>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n < 4) throw TooFewRows("weight fitting needs at least 4 rows");
  Eigen::MatrixXd design(n, 4);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto d = rows[i].distances.as_array();
    for (std::size_t j = 0; j < 3; ++j) {
      if (!d[j]) {
        throw MissingModality(std::string("row ") + std::to_string(i) +
                              " lacks modality '" + kModalityNames[j] + "'");
      }
    }
    design(i, 0) = 1.0;
    design(i, 1) = *d[0];
    design(i, 2) = *d[1];
    design(i, 3) = *d[2];
    target[i] = rows[i].loss;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 4) {
    throw RankDeficient("design matrix is rank deficient");
  }
  const Eigen::VectorXd beta = qr.solve(target);
  return {beta[0], beta[1], beta[2], beta[3]};
}

ModalityWeights fit_weights(const std::vector<WeightFitRow>& rows,
                            WeightTransform transform) {
  const auto beta = ols_coefficients(rows);

  std::array<double, 3> transformed{};
  for (int j = 0; j < 3; ++j) {
    const double slope = beta[j + 1];
    transformed[j] = transform == WeightTransform::logistic
                         ? 1.0 / (1.0 + std::exp(-slope))
                         : std::max(slope, 0.0);
  }
  const double total = transformed[0] + transformed[1] + transformed[2];
  if (total <= 0.0) {
    // Every ReLU-transformed slope vanished; fall back to the default.
    return uniform_weights();
  }
  return {transformed[0] / total, transformed[1] / total,
          transformed[2] / total};
}

}  // namespace lingdist
