// Transfer-language selection harness: pick the nearest source per target
// and score the choice against the best available source.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lingdist {

// Task scores s(target, source), higher is better; entries may be missing.
class ScoreMatrix {
 public:
  ScoreMatrix(std::vector<std::string> targets, std::vector<std::string> sources,
              std::vector<std::vector<std::optional<double>>> scores);

  const std::vector<std::string>& targets() const { return targets_; }
  const std::vector<std::string>& sources() const { return sources_; }
  const std::optional<double>& score(std::size_t target,
                                     std::size_t source) const {
    return scores_[target][source];
  }

 private:
  std::vector<std::string> targets_;
  std::vector<std::string> sources_;
  std::vector<std::vector<std::optional<double>>> scores_;
};

using DistanceFn =
    std::function<double(const std::string& target, const std::string& source)>;

// argmin of dist(target, .) over candidates; exact ties go to the
// lexicographically smaller id. Throws NoCandidates.
std::string select_top1(const std::string& target,
                        const std::vector<std::string>& candidates,
                        const DistanceFn& dist);

// (max_j s_j - s_chosen) / max_j s_j over one target's source scores.
// Throws MissingScore / NonPositiveMax.
double performance_loss(const std::vector<std::optional<double>>& target_row,
                        std::size_t chosen);

struct TargetOutcome {
  std::string target;
  std::string chosen;
  double loss = 0.0;  // fraction in [0, 1]
};

struct SelectionReport {
  std::vector<TargetOutcome> evaluated;
  std::vector<std::string> skipped;  // targets with no scored candidate
  double mean_loss = 0.0;

  double mean_loss_pct() const { return 100.0 * mean_loss; }
};

// Leave-one-target-out: per target, select the nearest scored source
// (excluding the target itself) and record its performance loss.
SelectionReport harness_run(const ScoreMatrix& matrix, const DistanceFn& dist);

}  // namespace lingdist
