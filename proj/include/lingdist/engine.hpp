// Ties the loaded artifacts together: a registry of language ids with
// per-modality availability, and distance dispatch across modalities.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lingdist/composite.hpp"
#include "lingdist/embedding.hpp"
#include "lingdist/geo.hpp"
#include "lingdist/typology.hpp"

namespace lingdist {

enum class Modality { geo, gen, typ, composite };

Modality modality_from_name(const std::string& name);  // throws Error
std::string modality_name(Modality modality);

struct EngineConfig {
  std::string speakers_path;
  std::string embeddings_path;
  std::string features_path;
  std::string islands_path;
  std::string weights_path;  // optional; uniform weights when empty
};

struct Availability {
  bool geo = false;
  bool gen = false;
  bool typ = false;

  bool has(Modality m) const {
    switch (m) {
      case Modality::geo:
        return geo;
      case Modality::gen:
        return gen;
      case Modality::typ:
        return typ;
      case Modality::composite:
        return geo || gen || typ;
    }
    return false;
  }
};

class LanguageRegistry {
 public:
  void add(const std::string& id, Modality modality);
  const std::map<std::string, Availability>& entries() const {
    return entries_;
  }
  // Throws UnknownLanguage naming the id when the modality is unavailable.
  void require(const std::string& id, Modality modality) const;

 private:
  std::map<std::string, Availability> entries_;
};

class Engine {
 public:
  // Loads whichever artifact paths are non-empty.
  static Engine load(const EngineConfig& config);

  const LanguageRegistry& registry() const { return registry_; }
  const ModalityWeights& weights() const { return weights_; }

  // Per-modality distance in [0, 1]; composite applies the loaded weights.
  double distance(Modality modality, const std::string& a,
                  const std::string& b) const;

  // Distances for every loaded modality covering both languages.
  DistanceTriple triple(const std::string& a, const std::string& b) const;

 private:
  std::optional<std::map<std::string, GeoDistribution>> speakers_;
  std::optional<EmbeddingTable> table_;
  std::optional<FeatureMatrix> features_;
  std::optional<IslandModel> islands_;
  ModalityWeights weights_ = uniform_weights();
  LanguageRegistry registry_;
};

// Reorders embedding rows to match `node_ids`; throws UnknownNode when a
// node is missing from the table.
EmbeddingTable align_embeddings(const EmbeddingTable& table,
                                const std::vector<NodeId>& node_ids);

}  // namespace lingdist
