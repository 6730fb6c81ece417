// Composite distance: convex combination of per-modality distances, with a
// uniform default and regression-fitted task-specific weights.
#pragma once

#include <array>
#include <optional>
#include <vector>

namespace lingdist {

inline constexpr std::array<const char*, 3> kModalityNames = {"geo", "gen",
                                                              "typ"};

struct ModalityWeights {
  double geo = 0.0;
  double gen = 0.0;
  double typ = 0.0;

  std::array<double, 3> as_array() const { return {geo, gen, typ}; }
  static ModalityWeights from_array(const std::array<double, 3>& w) {
    return {w[0], w[1], w[2]};
  }
};

struct DistanceTriple {
  std::optional<double> geo;
  std::optional<double> gen;
  std::optional<double> typ;

  std::array<std::optional<double>, 3> as_array() const {
    return {geo, gen, typ};
  }
};

enum class WeightTransform { logistic, relu };

// Weighted sum over available modalities; throws MissingModality when a
// positively weighted modality is unavailable.
double composite_distance(const DistanceTriple& t, const ModalityWeights& w);

// Generic form, open to more modalities than the three wired here.
double weighted_distance(const std::vector<std::optional<double>>& distances,
                         const std::vector<double>& weights);

ModalityWeights uniform_weights();

struct WeightFitRow {
  DistanceTriple distances;
  double loss = 0.0;  // task performance loss in [0, 1]
};

// Least-squares coefficients of loss on (1, d_geo, d_gen, d_typ), in that
// order. Throws TooFewRows and RankDeficient.
std::array<double, 4> ols_coefficients(const std::vector<WeightFitRow>& rows);

// OLS of loss on the three distances plus an intercept (discarded); slope
// coefficients pass through the chosen transform and are normalized to sum
// one. All-nonpositive ReLU slopes fall back to uniform weights.
// Throws TooFewRows (< 4 rows) and RankDeficient.
ModalityWeights fit_weights(const std::vector<WeightFitRow>& rows,
                            WeightTransform transform);

}  // namespace lingdist
