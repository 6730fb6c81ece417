#include "lingdist/evaluation.hpp"

#include <algorithm>

#include "lingdist/errors.hpp"

namespace lingdist {

ScoreMatrix::ScoreMatrix(
    std::vector<std::string> targets, std::vector<std::string> sources,
    std::vector<std::vector<std::optional<double>>> scores)
    : targets_(std::move(targets)),
      sources_(std::move(sources)),
      scores_(std::move(scores)) {
  if (scores_.size() != targets_.size()) {
    throw DimensionMismatch("score matrix row count mismatch");
  }
  for (const auto& row : scores_) {
    if (row.size() != sources_.size()) {
      throw DimensionMismatch("score matrix column count mismatch");
    }
  }
}

std::string select_top1(const std::string& target,
                        const std::vector<std::string>& candidates,
                        const DistanceFn& dist) {
  if (candidates.empty()) {
    throw NoCandidates("no candidate sources for target " + target);
  }
  const std::string* best = nullptr;
  double best_distance = 0.0;
  for (const std::string& candidate : candidates) {
    const double d = dist(target, candidate);
    if (best == nullptr || d < best_distance ||
        (d == best_distance && candidate < *best)) {
      best = &candidate;
      best_distance = d;
    }
  }
  return *best;
}

double performance_loss(const std::vector<std::optional<double>>& target_row,
                        std::size_t chosen) {
  if (chosen >= target_row.size() || !target_row[chosen]) {
    throw MissingScore("chosen source has no score");
  }
  double best = 0.0;
  bool any = false;
  for (const auto& s : target_row) {
    if (!s) continue;
    best = any ? std::max(best, *s) : *s;
    any = true;
  }
  if (!any || best <= 0.0) {
    throw NonPositiveMax("target row has no positive best score");
  }
  return (best - *target_row[chosen]) / best;
}

SelectionReport harness_run(const ScoreMatrix& matrix, const DistanceFn& dist) {
  SelectionReport report;
  double loss_sum = 0.0;
  for (std::size_t t = 0; t < matrix.targets().size(); ++t) {
    const std::string& target = matrix.targets()[t];
    std::vector<std::string> candidates;
    for (std::size_t s = 0; s < matrix.sources().size(); ++s) {
      if (matrix.sources()[s] == target) continue;
      if (matrix.score(t, s)) candidates.push_back(matrix.sources()[s]);
    }
    if (candidates.empty()) {
      report.skipped.push_back(target);
      continue;
    }
    const std::string chosen = select_top1(target, candidates, dist);
    const auto chosen_index = static_cast<std::size_t>(
        std::find(matrix.sources().begin(), matrix.sources().end(), chosen) -
        matrix.sources().begin());
    std::vector<std::optional<double>> row;
    row.reserve(matrix.sources().size());
    for (std::size_t s = 0; s < matrix.sources().size(); ++s) {
      // The target itself is not a transfer option; drop it from the row so
      // the best attainable score is over true candidates.
      if (matrix.sources()[s] == target) {
        row.push_back(std::nullopt);
      } else {
        row.push_back(matrix.score(t, s));
      }
    }
    const double loss = performance_loss(row, chosen_index);
    report.evaluated.push_back({target, chosen, loss});
    loss_sum += loss;
  }
  if (!report.evaluated.empty()) {
    report.mean_loss = loss_sum / static_cast<double>(report.evaluated.size());
  }
  return report;
}

}  // namespace lingdist
