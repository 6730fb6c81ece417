#include "lingdist/engine.hpp"

#include "lingdist/errors.hpp"
#include "lingdist/io.hpp"

namespace lingdist {

Modality modality_from_name(const std::string& name) {
  if (name == "geo") return Modality::geo;
  if (name == "gen") return Modality::gen;
  if (name == "typ") return Modality::typ;
  if (name == "composite") return Modality::composite;
  throw Error("unknown modality: " + name);
}

std::string modality_name(Modality modality) {
  switch (modality) {
    case Modality::geo:
      return "geo";
    case Modality::gen:
      return "gen";
    case Modality::typ:
      return "typ";
    case Modality::composite:
      return "composite";
  }
  return "unknown";
}

void LanguageRegistry::add(const std::string& id, Modality modality) {
  Availability& entry = entries_[id];
  switch (modality) {
    case Modality::geo:
      entry.geo = true;
      break;
    case Modality::gen:
      entry.gen = true;
      break;
    case Modality::typ:
      entry.typ = true;
      break;
    case Modality::composite:
      break;
  }
}

void LanguageRegistry::require(const std::string& id,
                               Modality modality) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw UnknownLanguage("language '" + id + "' is not in the registry");
  }
  if (!it->second.has(modality)) {
    throw UnknownLanguage("language '" + id + "' has no " +
                          modality_name(modality) + " data");
  }
}

Engine Engine::load(const EngineConfig& config) {
  Engine engine;
  if (!config.speakers_path.empty()) {
    engine.speakers_ = load_speakers(config.speakers_path).distributions;
    for (const auto& [id, unused] : *engine.speakers_) {
      engine.registry_.add(id, Modality::geo);
    }
  }
  if (!config.embeddings_path.empty()) {
    engine.table_ = load_embeddings(config.embeddings_path);
    for (const auto& id : engine.table_->node_ids()) {
      engine.registry_.add(id, Modality::gen);
    }
  }
  if (!config.features_path.empty()) {
    engine.features_ = load_features(config.features_path);
  }
  if (!config.islands_path.empty()) {
    engine.islands_ = load_islands(config.islands_path);
  }
  if (engine.features_ && engine.islands_) {
    for (const auto& id : engine.features_->languages()) {
      engine.registry_.add(id, Modality::typ);
    }
  }
  if (!config.weights_path.empty()) {
    engine.weights_ = load_weights(config.weights_path);
  }
  return engine;
}

double Engine::distance(Modality modality, const std::string& a,
                        const std::string& b) const {
  switch (modality) {
    case Modality::geo:
      registry_.require(a, Modality::geo);
      registry_.require(b, Modality::geo);
      return geo_distance(speakers_->at(a), speakers_->at(b));
    case Modality::gen:
      registry_.require(a, Modality::gen);
      registry_.require(b, Modality::gen);
      return genetic_distance(a, b, *table_);
    case Modality::typ:
      registry_.require(a, Modality::typ);
      registry_.require(b, Modality::typ);
      return typology_distance(a, b, *islands_, *features_);
    case Modality::composite:
      return composite_distance(triple(a, b), weights_);
  }
  throw Error("unreachable modality");
}

DistanceTriple Engine::triple(const std::string& a,
                              const std::string& b) const {
  DistanceTriple t;
  const auto& entries = registry_.entries();
  const auto ia = entries.find(a);
  const auto ib = entries.find(b);
  if (ia == entries.end()) {
    throw UnknownLanguage("language '" + a + "' is not in the registry");
  }
  if (ib == entries.end()) {
    throw UnknownLanguage("language '" + b + "' is not in the registry");
  }
  if (ia->second.geo && ib->second.geo) {
    t.geo = geo_distance(speakers_->at(a), speakers_->at(b));
  }
  if (ia->second.gen && ib->second.gen) {
    t.gen = genetic_distance(a, b, *table_);
  }
  if (ia->second.typ && ib->second.typ) {
    t.typ = typology_distance(a, b, *islands_, *features_);
  }
  return t;
}

EmbeddingTable align_embeddings(const EmbeddingTable& table,
                                const std::vector<NodeId>& node_ids) {
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(node_ids.size()),
                         table.ambient_dim());
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    coords.row(static_cast<Eigen::Index>(i)) =
        table.coords().row(table.index_of(node_ids[i]));
  }
  EmbeddingTable aligned(table.geometry(), table.dim(), node_ids,
                         std::move(coords));
  if (table.has_dmax()) aligned.set_dmax(table.dmax());
  return aligned;
}

}  // namespace lingdist
