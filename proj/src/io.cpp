#include "lingdist/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lingdist/errors.hpp"

namespace lingdist {
namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw ParseError(context + ": not a number: '" + s + "'");
  }
  return value;
}

std::uint64_t parse_count(const std::string& s, const std::string& context) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError(context + ": not a nonnegative integer: '" + s + "'");
  }
  return std::strtoull(s.c_str(), nullptr, 10);
}

std::string line_ref(const std::string& path, std::size_t line_number) {
  return path + ":" + std::to_string(line_number);
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    if (!out.flush()) throw IoError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw IoError("rename failed: " + tmp + " -> " + path);
  }
}

SpeakerLoad load_speakers(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty speaker file");
  std::map<std::string, std::vector<SpeakerCount>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv(lines[i]);
    const std::string where = line_ref(path, i + 1);
    if (fields.size() != 5) {
      throw ParseError(where + ": expected 5 columns, got " +
                       std::to_string(fields.size()));
    }
    const double lat = parse_double(fields[2], where);
    const double lon = parse_double(fields[3], where);
    const std::uint64_t count = parse_count(fields[4], where);
    try {
      rows[fields[0]].push_back({GeoPoint(lat, lon), count});
    } catch (const InvalidCoordinate& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  SpeakerLoad result;
  for (const auto& [lang, counts] : rows) {
    try {
      result.distributions.emplace(lang, normalize_speaker_counts(counts));
    } catch (const AllZeroCounts&) {
      result.skipped_all_zero.push_back(lang);
    }
  }
  return result;
}

GenealogyGraph load_tree(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty tree file");
  std::vector<NodeId> nodes;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv(lines[i]);
    const std::string where = line_ref(path, i + 1);
    if (fields.size() != 2) {
      throw ParseError(where + ": expected 2 columns, got " +
                       std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw ParseError(where + ": empty node id");
    }
    nodes.push_back(fields[0]);
    nodes.push_back(fields[1]);
    edges.emplace_back(fields[0], fields[1]);
  }
  return GenealogyGraph(std::move(nodes), std::move(edges));
}

FeatureMatrix load_features(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty feature file");
  const auto header = split_csv(lines[0]);
  if (header.size() < 2) {
    throw ParseError(path + ":1: feature header needs id plus features");
  }
  std::vector<FeatureId> features(header.begin() + 1, header.end());
  std::vector<LanguageId> languages;
  std::vector<std::vector<int>> cells;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv(lines[i]);
    const std::string where = line_ref(path, i + 1);
    if (fields.size() != header.size()) {
      throw RaggedRows(where + ": expected " + std::to_string(header.size()) +
                       " columns, got " + std::to_string(fields.size()));
    }
    languages.push_back(fields[0]);
    std::vector<int> row;
    for (std::size_t c = 1; c < fields.size(); ++c) {
      if (fields[c] == "0") {
        row.push_back(0);
      } else if (fields[c] == "1") {
        row.push_back(1);
      } else if (fields[c] == "?") {
        row.push_back(-1);
      } else {
        throw ParseError(where + ": cell must be 0, 1 or ?, got '" +
                         fields[c] + "'");
      }
    }
    cells.push_back(std::move(row));
  }
  Eigen::MatrixXi values(static_cast<Eigen::Index>(cells.size()),
                         static_cast<Eigen::Index>(features.size()));
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < features.size(); ++c) {
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          cells[r][c];
    }
  }
  return FeatureMatrix(std::move(languages), std::move(features),
                       std::move(values));
}

void save_features(const FeatureMatrix& m, const std::string& path) {
  std::ostringstream out;
  out << "lang_id";
  for (const auto& f : m.features()) out << ',' << f;
  out << '\n';
  for (std::size_t r = 0; r < m.language_count(); ++r) {
    out << m.languages()[r];
    for (std::size_t c = 0; c < m.feature_count(); ++c) {
      const int v = m.value(static_cast<int>(r), static_cast<int>(c));
      out << ',' << (v < 0 ? "?" : v == 0 ? "0" : "1");
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  std::ostringstream out;
  out << geometry_name(table.geometry()) << ' ' << table.dim() << ' '
      << table.node_count() << ' ' << format_double(table.dmax()) << '\n';
  for (std::size_t i = 0; i < table.node_count(); ++i) {
    out << table.node_ids()[i];
    for (int c = 0; c < table.ambient_dim(); ++c) {
      out << ' '
          << format_double(table.coords()(static_cast<Eigen::Index>(i), c));
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

EmbeddingTable load_embeddings(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty embedding file");
  std::istringstream header(lines[0]);
  std::string geometry_token;
  int dim = 0;
  std::size_t count = 0;
  std::string dmax_token;
  if (!(header >> geometry_token >> dim >> count >> dmax_token)) {
    throw ParseError(path + ":1: bad embedding header");
  }
  const Geometry geometry = geometry_from_name(geometry_token);
  const double dmax = parse_double(dmax_token, path + ":1");
  const int ambient = dim + (geometry == Geometry::hyperboloid ? 1 : 0);
  std::vector<NodeId> ids;
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(count), ambient);
  std::size_t row = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = line_ref(path, i + 1);
    if (row >= count) throw ParseError(where + ": more rows than declared");
    std::istringstream in(lines[i]);
    std::string id;
    if (!(in >> id)) throw ParseError(where + ": missing node id");
    ids.push_back(id);
    std::string token;
    for (int c = 0; c < ambient; ++c) {
      if (!(in >> token)) {
        throw ParseError(where + ": expected " + std::to_string(ambient) +
                         " coordinates");
      }
      coords(static_cast<Eigen::Index>(row), c) = parse_double(token, where);
    }
    if (in >> token) throw ParseError(where + ": trailing fields");
    ++row;
  }
  if (row != count) {
    throw ParseError(path + ": declared " + std::to_string(count) +
                     " rows, found " + std::to_string(row));
  }
  EmbeddingTable table(geometry, dim, std::move(ids), std::move(coords));
  table.set_dmax(dmax);
  return table;
}

void save_islands(const IslandModel& model, const std::string& path) {
  nlohmann::json islands = nlohmann::json::array();
  for (const auto& island : model.islands) {
    nlohmann::json theta = nlohmann::json::array();
    for (Eigen::Index j = 0; j < island.theta.rows(); ++j) {
      theta.push_back({island.theta(j, 0), island.theta(j, 1)});
    }
    islands.push_back({{"feature_ids", island.feature_ids},
                       {"prior", {island.prior[0], island.prior[1]}},
                       {"theta", theta},
                       {"loglik", island.loglik},
                       {"n_samples", island.n_samples}});
  }
  const nlohmann::json doc = {{"islands", islands}};
  atomic_write(path, doc.dump(2) + "\n");
}

IslandModel load_islands(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  IslandModel model;
  try {
    for (const auto& entry : doc.at("islands")) {
      LatentClassModel island;
      island.feature_ids =
          entry.at("feature_ids").get<std::vector<std::string>>();
      island.prior[0] = entry.at("prior").at(0).get<double>();
      island.prior[1] = entry.at("prior").at(1).get<double>();
      const auto& theta = entry.at("theta");
      island.theta.resize(static_cast<Eigen::Index>(theta.size()), 2);
      for (std::size_t j = 0; j < theta.size(); ++j) {
        island.theta(static_cast<Eigen::Index>(j), 0) =
            theta.at(j).at(0).get<double>();
        island.theta(static_cast<Eigen::Index>(j), 1) =
            theta.at(j).at(1).get<double>();
      }
      island.loglik = entry.at("loglik").get<double>();
      island.n_samples = entry.at("n_samples").get<std::size_t>();
      const std::size_t index = model.islands.size();
      for (const auto& id : island.feature_ids) model.provenance[id] = index;
      model.islands.push_back(std::move(island));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return model;
}

void save_weights(const ModalityWeights& weights, const std::string& path) {
  std::ostringstream out;
  out << "geo " << format_double(weights.geo) << '\n'
      << "gen " << format_double(weights.gen) << '\n'
      << "typ " << format_double(weights.typ) << '\n';
  atomic_write(path, out.str());
}

ModalityWeights load_weights(const std::string& path) {
  const auto lines = read_lines(path);
  ModalityWeights weights;
  bool seen[3] = {false, false, false};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::istringstream in(lines[i]);
    std::string label;
    std::string value;
    if (!(in >> label >> value)) {
      throw ParseError(line_ref(path, i + 1) + ": expected `label value`");
    }
    const double w = parse_double(value, line_ref(path, i + 1));
    if (label == "geo") {
      weights.geo = w;
      seen[0] = true;
    } else if (label == "gen") {
      weights.gen = w;
      seen[1] = true;
    } else if (label == "typ") {
      weights.typ = w;
      seen[2] = true;
    } else {
      throw ParseError(line_ref(path, i + 1) + ": unknown label " + label);
    }
  }
  if (!seen[0] || !seen[1] || !seen[2]) {
    throw ParseError(path + ": weights file must define geo, gen and typ");
  }
  return weights;
}

ScoreMatrix load_score_matrix(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty score file");
  const auto header = split_csv(lines[0]);
  if (header.size() < 2) {
    throw ParseError(path + ":1: score header needs target plus sources");
  }
  std::vector<std::string> sources(header.begin() + 1, header.end());
  std::vector<std::string> targets;
  std::vector<std::vector<std::optional<double>>> scores;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv(lines[i]);
    const std::string where = line_ref(path, i + 1);
    if (fields.size() != header.size()) {
      throw RaggedRows(where + ": expected " + std::to_string(header.size()) +
                       " columns, got " + std::to_string(fields.size()));
    }
    targets.push_back(fields[0]);
    std::vector<std::optional<double>> row;
    for (std::size_t c = 1; c < fields.size(); ++c) {
      if (fields[c] == "NA") {
        row.push_back(std::nullopt);
      } else {
        row.push_back(parse_double(fields[c], where));
      }
    }
    scores.push_back(std::move(row));
  }
  return ScoreMatrix(std::move(targets), std::move(sources),
                     std::move(scores));
}

void save_distance_matrix(const std::vector<std::string>& ids,
                          const std::vector<std::vector<double>>& distances,
                          const std::string& path) {
  std::ostringstream out;
  out << "id";
  for (const auto& id : ids) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ids[i];
    for (std::size_t j = 0; j < ids.size(); ++j) {
      out << ',' << format_double(distances[i][j]);
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

DistanceMatrix load_distance_matrix(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty distance file");
  const auto header = split_csv(lines[0]);
  DistanceMatrix matrix;
  matrix.ids.assign(header.begin() + 1, header.end());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv(lines[i]);
    const std::string where = line_ref(path, i + 1);
    if (fields.size() != header.size()) {
      throw RaggedRows(where + ": ragged distance row");
    }
    std::vector<double> row;
    for (std::size_t c = 1; c < fields.size(); ++c) {
      row.push_back(parse_double(fields[c], where));
    }
    matrix.values.push_back(std::move(row));
  }
  if (matrix.values.size() != matrix.ids.size()) {
    throw ParseError(path + ": distance matrix must be square");
  }
  return matrix;
}

double DistanceMatrix::lookup(const std::string& a,
                              const std::string& b) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] != a) continue;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (ids[j] == b) return values[i][j];
    }
  }
  throw UnknownLanguage("pair (" + a + ", " + b + ") not in distance matrix");
}

std::vector<WeightFitRow> load_weight_rows(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty rows file");
  std::vector<WeightFitRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv(lines[i]);
    const std::string where = line_ref(path, i + 1);
    if (fields.size() != 4) {
      throw ParseError(where + ": expected d_geo,d_gen,d_typ,loss");
    }
    WeightFitRow row;
    row.distances.geo = parse_double(fields[0], where);
    row.distances.gen = parse_double(fields[1], where);
    row.distances.typ = parse_double(fields[2], where);
    row.loss = parse_double(fields[3], where);
    rows.push_back(row);
  }
  return rows;
}

std::string format_report(const SelectionReport& report) {
  std::ostringstream out;
  out << "target,chosen,loss,loss_pct\n";
  char buffer[64];
  for (const auto& outcome : report.evaluated) {
    std::snprintf(buffer, sizeof(buffer), "%.6f,%.6f", outcome.loss,
                  100.0 * outcome.loss);
    out << outcome.target << ',' << outcome.chosen << ',' << buffer << '\n';
  }
  for (const auto& target : report.skipped) {
    out << target << ",SKIPPED,NA,NA\n";
  }
  std::snprintf(buffer, sizeof(buffer), "%.6f", report.mean_loss_pct());
  out << "mean_loss_pct=" << buffer << '\n';
  return out.str();
}

}  // namespace lingdist
