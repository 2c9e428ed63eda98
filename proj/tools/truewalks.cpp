// Command-line front end. Precedence for every setting:
// flag > config file > TRUEWALKS_SEED (seed only) > built-in default.

#include <truewalks/pipeline.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"truewalks: polarity-aware knowledge-graph embeddings"};
  app.get_formatter()->column_width(28);

  std::string command;
  app.add_option("command", command, "synth|walk|train|fuse|classify|rank|pipeline")
      ->required();

  std::string config_path;
  app.add_option("--config", config_path, "flat key=value config file");

  std::string ontology, annotations, pairs, out, mode;
  std::uint64_t seed = 0;
  std::size_t walks = 0, depth = 0, dim = 0, window = 0, epochs = 0, neg_k = 0, workers = 0;
  bool order_aware = false, deterministic = false;

  auto* f_ontology = app.add_option("--ontology", ontology, "ontology N-Triples file");
  auto* f_annotations = app.add_option("--annotations", annotations, "annotation TSV file");
  auto* f_pairs = app.add_option("--pairs", pairs, "pair TSV file");
  auto* f_out = app.add_option("--out", out, "output directory");
  auto* f_seed = app.add_option("--seed", seed, "master random seed");
  auto* f_walks = app.add_option("--walks", walks, "walks per entity and polarity");
  auto* f_depth = app.add_option("--depth", depth, "maximum walk depth in nodes");
  auto* f_dim = app.add_option("--dim", dim, "embedding dimension per polarity");
  auto* f_window = app.add_option("--window", window, "skip-gram context window");
  auto* f_epochs = app.add_option("--epochs", epochs, "training epochs");
  auto* f_neg_k = app.add_option("--neg-k", neg_k, "negative samples per context");
  auto* f_order_aware = app.add_flag("--order-aware", order_aware,
                                     "order-aware skip-gram (one matrix per offset)");
  auto* f_mode = app.add_option("--mode", mode, "truewalks|positive_only|merged_polarity");
  auto* f_workers = app.add_option("--workers", workers, "worker threads for walks/eval");
  auto* f_deterministic = app.add_flag("--deterministic", deterministic,
                                       "force single-worker training (always on)");

  CLI11_PARSE(app, argc, argv);

  try {
    truewalks::PipelineConfig cfg;
    if (const auto s = truewalks::env_seed()) cfg.seed = *s;
    if (!config_path.empty()) {
      truewalks::apply_config(
          cfg, truewalks::parse_config_text(truewalks::read_file(config_path)));
    }
    if (f_ontology->count() > 0) cfg.ontology = ontology;
    if (f_annotations->count() > 0) cfg.annotations = annotations;
    if (f_pairs->count() > 0) cfg.pairs = pairs;
    if (f_out->count() > 0) cfg.out = out;
    if (f_seed->count() > 0) cfg.seed = seed;
    if (f_walks->count() > 0) cfg.walk.max_walks = walks;
    if (f_depth->count() > 0) cfg.walk.max_depth = depth;
    if (f_dim->count() > 0) cfg.embedding.dim = dim;
    if (f_window->count() > 0) cfg.embedding.window = window;
    if (f_epochs->count() > 0) cfg.embedding.epochs = epochs;
    if (f_neg_k->count() > 0) cfg.embedding.noise_k = neg_k;
    if (f_order_aware->count() > 0) cfg.embedding.order_aware = order_aware;
    if (f_mode->count() > 0) cfg.mode = mode;
    if (f_workers->count() > 0) cfg.workers = workers;
    if (f_deterministic->count() > 0) cfg.deterministic = deterministic;

    for (const auto& path : truewalks::run(command, cfg)) {
      std::printf("wrote %s\n", path.c_str());
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
