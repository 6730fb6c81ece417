#include "lingdist/cli.hpp"

#include <cstdio>
#include <fstream>
#include <cstdlib>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "lingdist/engine.hpp"
#include "lingdist/errors.hpp"
#include "lingdist/io.hpp"

namespace lingdist {
namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("LINGDIST_SEED")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return value;
  }
  return 42;
}

std::string format_fixed(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

struct EnginePaths {
  EngineConfig config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--speakers", config.speakers_path,
                    "speaker distribution CSV");
    cmd->add_option("--embeddings", config.embeddings_path,
                    "trained embedding file");
    cmd->add_option("--features", config.features_path,
                    "typological feature CSV");
    cmd->add_option("--islands", config.islands_path,
                    "island model JSON");
    cmd->add_option("--weights", config.weights_path,
                    "modality weights file (uniform when omitted)");
  }
};

std::vector<std::string> parse_lang_list(const std::string& csv,
                                         const std::string& file) {
  std::vector<std::string> langs;
  if (!csv.empty()) {
    std::string::size_type start = 0;
    while (start <= csv.size()) {
      const auto comma = csv.find(',', start);
      const auto token = csv.substr(
          start, comma == std::string::npos ? std::string::npos
                                            : comma - start);
      if (!token.empty()) langs.push_back(token);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) langs.push_back(line);
    }
  }
  if (langs.empty()) throw Error("no languages given (--langs or --lang-file)");
  return langs;
}

// All-pairs distances, optionally chunked over a worker pool. Each cell is
// independent and written to a fixed slot, so the output does not depend on
// the thread count.
std::vector<std::vector<double>> pairwise_distances(
    const Engine& engine, Modality modality,
    const std::vector<std::string>& langs, int threads) {
  const std::size_t n = langs.size();
  std::vector<std::vector<double>> result(n, std::vector<double>(n, 0.0));
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) cells.emplace_back(i, j);
  }
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const auto [i, j] = cells[c];
      const double d = engine.distance(modality, langs[i], langs[j]);
      result[i][j] = d;
      result[j][i] = d;
    }
  };
  if (threads <= 1) {
    worker(0, cells.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (cells.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(cells.size(), t * chunk);
      const std::size_t end = std::min(cells.size(), begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& thread : pool) thread.join();
  }
  return result;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"lingdist: modality-matched language distances"};
  app.require_subcommand(1);
  const std::uint64_t seed0 = default_seed();

  // train-genetic
  auto* train_cmd = app.add_subcommand(
      "train-genetic", "train genealogy embeddings from a tree file");
  std::string train_tree;
  std::string train_out;
  std::string train_geometry = "hyperboloid";
  TrainConfig train_config;
  train_config.rng_seed = seed0;
  bool bare_ratio = false;
  train_cmd->add_option("--tree", train_tree, "edge list CSV")->required();
  train_cmd->add_option("--out", train_out, "output embedding file")
      ->required();
  train_cmd->add_option("--geometry", train_geometry,
                        "poincare|hyperboloid|euclidean");
  train_cmd->add_option("--dim", train_config.dim, "embedding dimension");
  train_cmd->add_option("--epochs", train_config.epochs, "training epochs");
  train_cmd->add_option("--lr", train_config.learning_rate, "learning rate");
  train_cmd->add_option("--burn-in-epochs", train_config.burn_in_epochs,
                        "epochs at the reduced burn-in rate");
  train_cmd->add_option("--burn-in-factor", train_config.burn_in_factor,
                        "burn-in learning-rate factor");
  train_cmd->add_option("--negatives", train_config.negatives,
                        "negative samples per positive pair");
  train_cmd->add_option("--epsilon", train_config.epsilon,
                        "numerical clamp");
  train_cmd->add_option("--grad-clip", train_config.grad_clip,
                        "Lorentz gradient-norm clip");
  train_cmd->add_option("--spatial-clip", train_config.spatial_clip,
                        "hyperboloid spatial-norm clip");
  train_cmd->add_option("--seed", train_config.rng_seed, "rng seed");
  train_cmd->add_flag("--bare-ratio-loss", bare_ratio,
                      "softmax denominator over negatives only");

  // build-islands
  auto* islands_cmd = app.add_subcommand(
      "build-islands", "group typological features into latent islands");
  std::string islands_features;
  std::string islands_out;
  IslandBuildConfig island_config;
  std::uint64_t islands_seed = seed0;
  islands_cmd->add_option("--features", islands_features, "feature CSV")
      ->required();
  islands_cmd->add_option("--out", islands_out, "output island JSON")
      ->required();
  islands_cmd->add_option("--restarts", island_config.restarts,
                          "EM restarts per fit");
  islands_cmd->add_option("--max-active", island_config.max_active,
                          "active-set growth cap");
  islands_cmd->add_option("--seed", islands_seed, "rng seed");

  // dist
  auto* dist_cmd =
      app.add_subcommand("dist", "distance between two languages");
  std::string dist_modality = "composite";
  std::string dist_a;
  std::string dist_b;
  EnginePaths dist_paths;
  dist_cmd->add_option("--modality", dist_modality,
                       "geo|gen|typ|composite");
  dist_cmd->add_option("--a", dist_a, "first language id")->required();
  dist_cmd->add_option("--b", dist_b, "second language id")->required();
  dist_paths.attach(dist_cmd);

  // matrix
  auto* matrix_cmd =
      app.add_subcommand("matrix", "all-pairs distances for a language list");
  std::string matrix_modality = "composite";
  std::string matrix_langs;
  std::string matrix_lang_file;
  std::string matrix_out;
  int matrix_threads = 1;
  EnginePaths matrix_paths;
  matrix_cmd->add_option("--modality", matrix_modality,
                         "geo|gen|typ|composite");
  matrix_cmd->add_option("--langs", matrix_langs, "comma-separated ids");
  matrix_cmd->add_option("--lang-file", matrix_lang_file, "ids, one per line");
  matrix_cmd->add_option("--out", matrix_out, "output CSV")->required();
  matrix_cmd->add_option("--threads", matrix_threads, "worker pool size");
  matrix_paths.attach(matrix_cmd);

  // eval-recon
  auto* recon_cmd = app.add_subcommand(
      "eval-recon", "ancestor-retrieval MR/MAP of an embedding");
  std::string recon_embeddings;
  std::string recon_tree;
  recon_cmd->add_option("--embeddings", recon_embeddings, "embedding file")
      ->required();
  recon_cmd->add_option("--tree", recon_tree, "edge list CSV")->required();

  // fit-weights
  auto* fit_cmd = app.add_subcommand(
      "fit-weights", "fit modality weights from distance/loss rows");
  std::string fit_rows;
  std::string fit_out;
  std::string fit_transform = "logistic";
  fit_cmd->add_option("--rows", fit_rows, "CSV d_geo,d_gen,d_typ,loss")
      ->required();
  fit_cmd->add_option("--out", fit_out, "output weights file")->required();
  fit_cmd->add_option("--transform", fit_transform, "logistic|relu");

  // select
  auto* select_cmd = app.add_subcommand(
      "select", "nearest-source selection scored against a task matrix");
  std::string select_scores;
  std::string select_distances;
  std::string select_modality = "composite";
  std::string select_out;
  EnginePaths select_paths;
  select_cmd->add_option("--scores", select_scores, "score matrix CSV")
      ->required();
  select_cmd->add_option("--distances", select_distances,
                         "precomputed distance matrix CSV");
  select_cmd->add_option("--modality", select_modality,
                         "geo|gen|typ|composite");
  select_cmd->add_option("--out", select_out, "write report here");
  select_paths.attach(select_cmd);

  std::vector<const char*> argv;
  argv.push_back("lingdist");
  for (const auto& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    for (const auto* sub : app.get_subcommands()) {
      err << sub->help();
    }
    if (app.get_subcommands().empty()) err << app.help();
    return 1;
  }

  try {
    if (app.got_subcommand(train_cmd)) {
      train_config.geometry = geometry_from_name(train_geometry);
      train_config.loss_includes_positive = !bare_ratio;
      const GenealogyGraph graph = load_tree(train_tree);
      out << "nodes=" << graph.node_count() << " edges=" << graph.edge_count()
          << "\n";
      TrainResult trained = train_embeddings(graph, train_config);
      save_embeddings(trained.table, train_out);
      out << "epochs=" << train_config.epochs << " final_mean_loss="
          << format_fixed(trained.epoch_mean_loss.empty()
                              ? 0.0
                              : trained.epoch_mean_loss.back())
          << " d_max=" << format_fixed(trained.table.dmax()) << "\n";
      out << "wrote " << train_out << "\n";
    } else if (app.got_subcommand(islands_cmd)) {
      const FeatureMatrix features = load_features(islands_features);
      out << "languages=" << features.language_count()
          << " features=" << features.feature_count() << " missing_rate="
          << format_fixed(features.missing_rate()) << "\n";
      Rng rng(islands_seed);
      const IslandModel model =
          greedy_island_build(features, rng, island_config);
      save_islands(model, islands_out);
      out << "islands=" << model.islands.size() << " sizes=";
      for (std::size_t i = 0; i < model.islands.size(); ++i) {
        out << (i > 0 ? "," : "") << model.islands[i].feature_ids.size();
      }
      out << "\n";
      out << "wrote " << islands_out << "\n";
    } else if (app.got_subcommand(dist_cmd)) {
      const Engine engine = Engine::load(dist_paths.config);
      const double d = engine.distance(modality_from_name(dist_modality),
                                       dist_a, dist_b);
      out << format_fixed(d) << "\n";
    } else if (app.got_subcommand(matrix_cmd)) {
      const Engine engine = Engine::load(matrix_paths.config);
      const auto langs = parse_lang_list(matrix_langs, matrix_lang_file);
      const auto distances =
          pairwise_distances(engine, modality_from_name(matrix_modality),
                             langs, matrix_threads);
      save_distance_matrix(langs, distances, matrix_out);
      out << "wrote " << matrix_out << " (" << langs.size() << "x"
          << langs.size() << ")\n";
    } else if (app.got_subcommand(recon_cmd)) {
      const GenealogyGraph graph = load_tree(recon_tree);
      const EmbeddingTable table =
          align_embeddings(load_embeddings(recon_embeddings), graph.nodes());
      const ClosureIndex closure = build_closure(graph);
      const ReconstructionMetrics metrics = eval_reconstruction(table, closure);
      out << "MR=" << format_fixed(metrics.mean_rank)
          << " MAP=" << format_fixed(metrics.mean_average_precision) << "\n";
    } else if (app.got_subcommand(fit_cmd)) {
      const auto rows = load_weight_rows(fit_rows);
      WeightTransform transform;
      if (fit_transform == "logistic") {
        transform = WeightTransform::logistic;
      } else if (fit_transform == "relu") {
        transform = WeightTransform::relu;
      } else {
        throw Error("unknown transform: " + fit_transform);
      }
      const ModalityWeights weights = fit_weights(rows, transform);
      save_weights(weights, fit_out);
      out << "geo=" << format_fixed(weights.geo)
          << " gen=" << format_fixed(weights.gen)
          << " typ=" << format_fixed(weights.typ) << "\n";
      out << "wrote " << fit_out << "\n";
    } else if (app.got_subcommand(select_cmd)) {
      const ScoreMatrix scores = load_score_matrix(select_scores);
      SelectionReport report;
      if (!select_distances.empty()) {
        const DistanceMatrix matrix = load_distance_matrix(select_distances);
        report = harness_run(scores, [&](const std::string& a,
                                         const std::string& b) {
          return matrix.lookup(a, b);
        });
      } else {
        const Engine engine = Engine::load(select_paths.config);
        const Modality modality = modality_from_name(select_modality);
        report = harness_run(scores, [&](const std::string& a,
                                         const std::string& b) {
          return engine.distance(modality, a, b);
        });
      }
      const std::string text = format_report(report);
      if (select_out.empty()) {
        out << text;
      } else {
        atomic_write(select_out, text);
        out << "wrote " << select_out << "\n";
        out << "mean_loss_pct=" << format_fixed(report.mean_loss_pct())
            << "\n";
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace lingdist
