#pragma once

// Batch orchestration of the full method: synth, walk, train, fuse, classify,
// rank, or the whole pipeline in one run. Every stage writes its artifacts
// plus a timestamp-free manifest (seed, flat config, content hashes), so
// re-running a stage from the same inputs reproduces byte-identical files.
//
// Baseline modes beside the full method:
//  - positive_only: one model trained on the positive walks alone, at twice
//    the embedding width so the final dimensionality matches;
//  - merged_polarity: negative statements become ordinary positive edges
//    under a "not:"-prefixed predicate (no direction flipping), again one
//    double-width model.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "truewalks/embedding.hpp"
#include "truewalks/eval.hpp"
#include "truewalks/fuse.hpp"
#include "truewalks/ingest.hpp"
#include "truewalks/kg.hpp"
#include "truewalks/rng.hpp"
#include "truewalks/synth.hpp"
#include "truewalks/walks.hpp"

namespace truewalks {

inline constexpr std::string_view kVersion = "0.1.0";

struct PipelineConfig {
  std::string ontology;
  std::string annotations;
  std::string pairs;
  std::string out = "out";
  std::string mode = "truewalks";  // truewalks | positive_only | merged_polarity
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool deterministic = true;  // reserved: every stage is already deterministic
  WalkConfig walk;
  SkipGramConfig embedding;
  EvalConfig eval;
  SynthConfig synth;

  void validate() const {
    if (mode != "truewalks" && mode != "positive_only" && mode != "merged_polarity") {
      throw std::invalid_argument(
          "mode must be one of truewalks|positive_only|merged_polarity");
    }
    if (out.empty()) throw std::invalid_argument("output directory must be set");
    walk.validate();
    embedding.validate();
    eval.validate();
    synth.validate();
  }
};

// ---------------------------------------------------------------------------
// Flat key=value config file with section prefixes (`walk.max_depth=4`).

inline std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::size_t pos = 0, line_no = 0;
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
      s.remove_suffix(1);
    }
    return s;
  };
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = trim(text.substr(pos, eol - pos));
    ++line_no;
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    }
    kv[std::string(key)] = std::string(value);
  }
  return kv;
}

namespace detail {

inline std::uint64_t parse_config_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": expected unsigned integer, got '" +
                                v + "'");
  }
}

inline double parse_config_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": expected number, got '" + v + "'");
  }
}

inline bool parse_config_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config key " + key + ": expected true/false, got '" + v + "'");
}

}  // namespace detail

inline void apply_config(PipelineConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    auto u64 = [&] { return detail::parse_config_u64(key, value); };
    auto size = [&] { return static_cast<std::size_t>(detail::parse_config_u64(key, value)); };
    auto real = [&] { return detail::parse_config_double(key, value); };
    auto flag = [&] { return detail::parse_config_bool(key, value); };
    if (key == "ontology") {
      cfg.ontology = value;
    } else if (key == "annotations") {
      cfg.annotations = value;
    } else if (key == "pairs") {
      cfg.pairs = value;
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "mode") {
      cfg.mode = value;
    } else if (key == "seed") {
      cfg.seed = u64();
    } else if (key == "workers") {
      cfg.workers = size();
    } else if (key == "deterministic") {
      cfg.deterministic = flag();
    } else if (key == "walk.max_walks") {
      cfg.walk.max_walks = size();
    } else if (key == "walk.max_depth") {
      cfg.walk.max_depth = size();
    } else if (key == "embedding.dim") {
      cfg.embedding.dim = size();
    } else if (key == "embedding.window") {
      cfg.embedding.window = size();
    } else if (key == "embedding.epochs") {
      cfg.embedding.epochs = size();
    } else if (key == "embedding.noise_k") {
      cfg.embedding.noise_k = size();
    } else if (key == "embedding.learning_rate") {
      cfg.embedding.learning_rate = real();
    } else if (key == "embedding.min_count") {
      cfg.embedding.min_count = size();
    } else if (key == "embedding.order_aware") {
      cfg.embedding.order_aware = flag();
    } else if (key == "eval.mccv") {
      cfg.eval.mccv_repetitions = size();
    } else if (key == "eval.beta") {
      cfg.eval.beta = real();
    } else if (key == "eval.alpha") {
      cfg.eval.alpha = real();
    } else if (key == "synth.n_classes") {
      cfg.synth.n_classes = size();
    } else if (key == "synth.branching") {
      cfg.synth.branching = size();
    } else if (key == "synth.depth") {
      cfg.synth.depth = size();
    } else if (key == "synth.n_entities") {
      cfg.synth.n_entities = size();
    } else if (key == "synth.n_annotations") {
      cfg.synth.n_annotations = size();
    } else if (key == "synth.n_pairs") {
      cfg.synth.n_pairs = size();
    } else if (key == "synth.signal") {
      cfg.synth.signal = real();
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
}

// Every effective key, sorted, in the same flat format the config file uses.
inline std::map<std::string, std::string> canonical_config(const PipelineConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["ontology"] = cfg.ontology;
  kv["annotations"] = cfg.annotations;
  kv["pairs"] = cfg.pairs;
  kv["out"] = cfg.out;
  kv["mode"] = cfg.mode;
  kv["seed"] = std::to_string(cfg.seed);
  kv["workers"] = std::to_string(cfg.workers);
  kv["deterministic"] = cfg.deterministic ? "true" : "false";
  kv["walk.max_walks"] = std::to_string(cfg.walk.max_walks);
  kv["walk.max_depth"] = std::to_string(cfg.walk.max_depth);
  kv["embedding.dim"] = std::to_string(cfg.embedding.dim);
  kv["embedding.window"] = std::to_string(cfg.embedding.window);
  kv["embedding.epochs"] = std::to_string(cfg.embedding.epochs);
  kv["embedding.noise_k"] = std::to_string(cfg.embedding.noise_k);
  kv["embedding.learning_rate"] = detail::format_double(cfg.embedding.learning_rate);
  kv["embedding.min_count"] = std::to_string(cfg.embedding.min_count);
  kv["embedding.order_aware"] = cfg.embedding.order_aware ? "true" : "false";
  kv["eval.mccv"] = std::to_string(cfg.eval.mccv_repetitions);
  kv["eval.beta"] = detail::format_double(cfg.eval.beta);
  kv["eval.alpha"] = detail::format_double(cfg.eval.alpha);
  kv["synth.n_classes"] = std::to_string(cfg.synth.n_classes);
  kv["synth.branching"] = std::to_string(cfg.synth.branching);
  kv["synth.depth"] = std::to_string(cfg.synth.depth);
  kv["synth.n_entities"] = std::to_string(cfg.synth.n_entities);
  kv["synth.n_annotations"] = std::to_string(cfg.synth.n_annotations);
  kv["synth.n_pairs"] = std::to_string(cfg.synth.n_pairs);
  kv["synth.signal"] = detail::format_double(cfg.synth.signal);
  return kv;
}

inline std::string config_hash(const PipelineConfig& cfg) {
  std::string flat;
  for (const auto& [k, v] : canonical_config(cfg)) flat += k + "=" + v + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(flat)));
  return buf;
}

inline std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("TRUEWALKS_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  const std::string s(v);
  try {
    std::size_t used = 0;
    const auto x = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("TRUEWALKS_SEED must be an unsigned integer, got '" + s + "'");
  }
}

// ---------------------------------------------------------------------------
// Stage plumbing

namespace detail {

inline std::string content_hash(std::string_view content) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(content)));
  return buf;
}

struct StageIo {
  std::map<std::string, std::string> inputs;   // path -> content hash
  std::map<std::string, std::string> outputs;  // file name -> content hash
  std::vector<std::string> written;            // full paths, write order
};

inline std::string read_input(const std::string& path, StageIo& io) {
  auto text = read_file(path);
  io.inputs[path] = content_hash(text);
  return text;
}

inline void write_output(const PipelineConfig& cfg, const std::string& name,
                         std::string_view content, StageIo& io) {
  const auto path = (std::filesystem::path(cfg.out) / name).string();
  write_file(path, content);
  io.outputs[name] = content_hash(content);
  io.written.push_back(path);
}

inline void write_manifest(const PipelineConfig& cfg, const std::string& stage, StageIo& io) {
  nlohmann::json j;
  j["stage"] = stage;
  j["mode"] = cfg.mode;
  j["seed"] = cfg.seed;
  j["config_hash"] = config_hash(cfg);
  j["config"] = canonical_config(cfg);
  j["inputs"] = io.inputs;
  j["outputs"] = io.outputs;
  j["versions"] = {{"truewalks", std::string(kVersion)}, {"manifest", 1}};
  write_output(cfg, "manifest_" + stage + ".json", j.dump(2) + "\n", io);
}

inline void raise_parse_errors(const std::string& path, const std::vector<ParseError>& errors) {
  if (errors.empty()) return;
  const auto& e = errors.front();
  auto msg = path + ":" + std::to_string(e.line) + ":" + std::to_string(e.column) + ": " +
             e.message;
  if (errors.size() > 1) msg += " (+" + std::to_string(errors.size() - 1) + " more)";
  throw std::runtime_error(msg);
}

// merged_polarity: a negative statement becomes a positive edge under a
// "not:"-prefixed predicate; subclass direction flipping never applies.
inline std::vector<Statement> merge_polarity(std::vector<Statement> statements) {
  for (auto& st : statements) {
    if (st.polarity == Polarity::Negative) {
      st.predicate.predicate = "not:" + st.predicate.predicate;
      st.polarity = Polarity::Positive;
    }
  }
  return statements;
}

inline std::vector<AnnotationRecord> merge_polarity(std::vector<AnnotationRecord> records) {
  for (auto& r : records) {
    if (r.polarity == Polarity::Negative) {
      r.property = "not:" + r.property;
      r.polarity = Polarity::Positive;
    }
  }
  return records;
}

inline AssembledKg load_inputs(const PipelineConfig& cfg, StageIo& io) {
  if (cfg.ontology.empty() || cfg.annotations.empty()) {
    throw std::invalid_argument("ontology and annotations paths must be set");
  }
  const auto onto_text = read_input(cfg.ontology, io);
  const auto ann_text = read_input(cfg.annotations, io);
  auto parsed = parse_ntriples(onto_text);
  raise_parse_errors(cfg.ontology, parsed.errors);
  auto folded = fold_negative_assertions(parsed.triples);
  raise_parse_errors(cfg.ontology, folded.errors);
  auto ann = parse_annotations(ann_text);
  raise_parse_errors(cfg.annotations, ann.errors);
  if (cfg.mode == "merged_polarity") {
    return assemble_kg(merge_polarity(std::move(folded.statements)),
                       merge_polarity(std::move(ann.records)));
  }
  return assemble_kg(folded.statements, ann.records);
}

inline EmbeddingModel model_from_rows(const ParsedEmbeddings& parsed) {
  EmbeddingModel m;
  m.dim = parsed.dim;
  for (const auto& row : parsed.rows) {
    m.vocab.index.emplace(row.token, m.vocab.tokens.size());
    m.vocab.tokens.push_back(row.token);
    m.vocab.counts.push_back(1);
    m.input.insert(m.input.end(), row.values.begin(), row.values.end());
  }
  return m;
}

inline std::vector<std::string> annotation_entities(const std::vector<AnnotationRecord>& recs) {
  std::vector<std::string> entities;
  std::set<std::string> seen;
  for (const auto& r : recs) {
    if (seen.insert(r.entity).second) entities.push_back(r.entity);
  }
  return entities;
}

inline EntityEmbeddingTable table_from_text(std::string_view text) {
  const auto parsed = parse_embedding_text(text);
  EntityEmbeddingTable table;
  table.dim_pos = parsed.dim;
  table.dim_neg = 0;
  for (const auto& row : parsed.rows) table.vectors.emplace(row.token, row.values);
  return table;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stages. Each returns the full paths it wrote, manifest included.

inline std::vector<std::string> run_synth(const PipelineConfig& cfg) {
  detail::StageIo io;
  SynthConfig sc = cfg.synth;
  sc.seed = cfg.seed;
  const auto data = gen_benchmark(sc);
  detail::write_output(cfg, "ontology.nt", write_ntriples(data.ontology), io);
  detail::write_output(cfg, "annotations.tsv", write_annotations(data.annotations), io);
  detail::write_output(cfg, "pairs.tsv", write_pairs(data.pairs), io);
  detail::write_manifest(cfg, "synth", io);
  return io.written;
}

inline std::vector<std::string> run_walk(const PipelineConfig& cfg) {
  detail::StageIo io;
  const auto assembled = detail::load_inputs(cfg, io);
  WalkConfig wc = cfg.walk;
  wc.seed = cfg.seed;
  const auto corpus = build_corpus(assembled.kg, wc, cfg.workers);
  detail::write_output(cfg, "walks.txt", write_corpus(corpus), io);
  detail::write_manifest(cfg, "walk", io);
  return io.written;
}

inline std::vector<std::string> run_train(const PipelineConfig& cfg) {
  detail::StageIo io;
  const auto corpus_path = (std::filesystem::path(cfg.out) / "walks.txt").string();
  const auto corpus = parse_corpus(detail::read_input(corpus_path, io));
  SkipGramConfig ec = cfg.embedding;
  ec.seed = cfg.seed;
  if (cfg.mode == "truewalks") {
    const auto dual = train_dual(corpus, ec);
    detail::write_output(cfg, "embedding_positive.txt",
                         write_embedding_text(embedding_rows(dual.positive), ec.dim), io);
    detail::write_output(cfg, "embedding_negative.txt",
                         write_embedding_text(embedding_rows(dual.negative), ec.dim), io);
  } else {
    // single model over the positive corpus at twice the width, so the final
    // dimensionality matches the fused representation
    ec.dim *= 2;
    ec.seed = mix_seed(cfg.seed, std::string_view("positive"));
    const auto model = train(to_sentences(corpus.positive), ec);
    detail::write_output(cfg, "embedding_positive.txt",
                         write_embedding_text(embedding_rows(model), ec.dim), io);
  }
  detail::write_manifest(cfg, "train", io);
  return io.written;
}

inline std::vector<std::string> run_fuse(const PipelineConfig& cfg) {
  detail::StageIo io;
  if (cfg.annotations.empty()) {
    throw std::invalid_argument("annotations path must be set to name the root entities");
  }
  auto ann = parse_annotations(detail::read_input(cfg.annotations, io));
  detail::raise_parse_errors(cfg.annotations, ann.errors);
  if (cfg.mode == "merged_polarity") ann.records = detail::merge_polarity(std::move(ann.records));
  const auto entities = detail::annotation_entities(ann.records);

  const auto pos_path = (std::filesystem::path(cfg.out) / "embedding_positive.txt").string();
  const auto pos = detail::model_from_rows(
      parse_embedding_text(detail::read_input(pos_path, io)));

  EntityEmbeddingTable table;
  if (cfg.mode == "truewalks") {
    const auto neg_path = (std::filesystem::path(cfg.out) / "embedding_negative.txt").string();
    const auto neg = detail::model_from_rows(
        parse_embedding_text(detail::read_input(neg_path, io)));
    table = combine(pos, neg, entities, FusionStrategy::Concat);
  } else {
    std::string missing;
    for (const auto& e : entities) {
      if (auto v = pos.vector_of(e)) {
        table.vectors.emplace(e, std::move(*v));
      } else {
        missing += missing.empty() ? e : ", " + e;
      }
    }
    if (!missing.empty()) {
      throw std::runtime_error("entities missing from the embedding: " + missing);
    }
    table.dim_pos = pos.dim;
    table.dim_neg = 0;
  }
  detail::write_output(cfg, "embeddings.tsv", write_table(table), io);
  detail::write_manifest(cfg, "fuse", io);
  return io.written;
}

namespace detail {

struct EvalInputs {
  EntityEmbeddingTable table;
  std::vector<PairRecord> pairs;
};

inline EvalInputs load_eval_inputs(const PipelineConfig& cfg, StageIo& io) {
  if (cfg.pairs.empty()) throw std::invalid_argument("pairs path must be set");
  const auto table_path = (std::filesystem::path(cfg.out) / "embeddings.tsv").string();
  EvalInputs in;
  in.table = table_from_text(read_input(table_path, io));
  auto parsed = parse_pairs(read_input(cfg.pairs, io));
  raise_parse_errors(cfg.pairs, parsed.errors);
  in.pairs = std::move(parsed.pairs);
  return in;
}

inline RankingReport rank_core(const EvalInputs& in) {
  std::vector<std::pair<std::string, std::string>> positives;
  for (const auto& p : in.pairs) {
    if (p.label == 1) positives.emplace_back(p.a, p.b);
  }
  if (positives.empty()) throw std::invalid_argument("rank: no label-1 pairs");
  std::vector<std::string> candidates;
  candidates.reserve(in.table.vectors.size());
  for (const auto& [entity, vec] : in.table.vectors) candidates.push_back(entity);
  return rank_eval(in.table, positives, candidates);
}

inline EvalConfig eval_config(const PipelineConfig& cfg) {
  EvalConfig ec = cfg.eval;
  ec.seed = cfg.seed;
  ec.workers = cfg.workers;
  return ec;
}

}  // namespace detail

inline std::vector<std::string> run_classify(const PipelineConfig& cfg) {
  detail::StageIo io;
  const auto in = detail::load_eval_inputs(cfg, io);
  const auto report = classify_eval(in.table, in.pairs, detail::eval_config(cfg));
  detail::write_output(cfg, "report.json", report_to_json(report).dump(2) + "\n", io);
  detail::write_output(cfg, "similarity.csv",
                       export_similarity_distribution(in.table, in.pairs), io);
  detail::write_manifest(cfg, "classify", io);
  return io.written;
}

inline std::vector<std::string> run_rank(const PipelineConfig& cfg) {
  detail::StageIo io;
  const auto in = detail::load_eval_inputs(cfg, io);
  EvalReport report;
  report.ranking = detail::rank_core(in);
  nlohmann::json j;
  j["ranking"] = report_to_json(report)["ranking"];
  detail::write_output(cfg, "ranking.json", j.dump(2) + "\n", io);
  detail::write_manifest(cfg, "rank", io);
  return io.written;
}

inline std::vector<std::string> run_pipeline(const PipelineConfig& cfg) {
  std::vector<std::string> written;
  auto append = [&](std::vector<std::string> more) {
    written.insert(written.end(), more.begin(), more.end());
  };
  append(run_walk(cfg));
  append(run_train(cfg));
  append(run_fuse(cfg));

  detail::StageIo io;
  const auto in = detail::load_eval_inputs(cfg, io);
  auto report = classify_eval(in.table, in.pairs, detail::eval_config(cfg));
  report.ranking = detail::rank_core(in);
  detail::write_output(cfg, "report.json", report_to_json(report).dump(2) + "\n", io);
  detail::write_output(cfg, "similarity.csv",
                       export_similarity_distribution(in.table, in.pairs), io);
  detail::write_manifest(cfg, "pipeline", io);
  append(std::move(io.written));
  return written;
}

// Dispatch by subcommand name; creates the output directory first.
inline std::vector<std::string> run(const std::string& command, const PipelineConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out);
  if (command == "synth") return run_synth(cfg);
  if (command == "walk") return run_walk(cfg);
  if (command == "train") return run_train(cfg);
  if (command == "fuse") return run_fuse(cfg);
  if (command == "classify") return run_classify(cfg);
  if (command == "rank") return run_rank(cfg);
  if (command == "pipeline") return run_pipeline(cfg);
  throw std::invalid_argument("unknown command: " + command);
}

}  // namespace truewalks
