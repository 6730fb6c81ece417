// File formats and persistence. Everything is delimiter-separated or
// JSON-shaped text; floating point round-trips bitwise through 17
// significant digits; writes go through a temp file and a rename.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "lingdist/composite.hpp"
#include "lingdist/embedding.hpp"
#include "lingdist/evaluation.hpp"
#include "lingdist/geo.hpp"
#include "lingdist/typology.hpp"

namespace lingdist {

struct SpeakerLoad {
  std::map<std::string, GeoDistribution> distributions;
  std::vector<std::string> skipped_all_zero;  // languages with only 0 counts
};

// CSV `lang_id,location_id,lat,lon,l1_count` with a header row. Languages
// whose counts are all zero are reported in `skipped_all_zero`, not fatal.
// Throws ParseError naming the offending line.
SpeakerLoad load_speakers(const std::string& path);

// CSV edge list `parent_id,child_id` with a header row.
GenealogyGraph load_tree(const std::string& path);

// CSV, first column `lang_id`, remaining columns feature ids, cells 0/1/?.
FeatureMatrix load_features(const std::string& path);
void save_features(const FeatureMatrix& m, const std::string& path);

// Space-separated: `geometry dim n_nodes d_max` header, then one row per
// node `node_id c0 ... cd`. Bitwise round-trip.
void save_embeddings(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_embeddings(const std::string& path);

// JSON with an `islands` array of (feature_ids, prior, theta, loglik,
// n_samples); provenance is rebuilt on load.
void save_islands(const IslandModel& model, const std::string& path);
IslandModel load_islands(const std::string& path);

// Three labeled lines: `geo <w>`, `gen <w>`, `typ <w>`.
void save_weights(const ModalityWeights& weights, const std::string& path);
ModalityWeights load_weights(const std::string& path);

// CSV, header `target,<source ids...>`, cells decimal or NA.
ScoreMatrix load_score_matrix(const std::string& path);

// CSV, header `id,<ids...>`, one row per id; used by `matrix` and `select`.
void save_distance_matrix(const std::vector<std::string>& ids,
                          const std::vector<std::vector<double>>& distances,
                          const std::string& path);
struct DistanceMatrix {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> values;

  double lookup(const std::string& a, const std::string& b) const;
};
DistanceMatrix load_distance_matrix(const std::string& path);

// CSV header `d_geo,d_gen,d_typ,loss` for weight fitting.
std::vector<WeightFitRow> load_weight_rows(const std::string& path);

// Per-target lines plus `mean_loss_pct=<value>`.
std::string format_report(const SelectionReport& report);

// Writes content to a sibling temp file then renames it into place.
void atomic_write(const std::string& path, const std::string& content);

// 17 significant digits; parses back to the identical double.
std::string format_double(double value);

}  // namespace lingdist
