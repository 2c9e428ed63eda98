#pragma once

// Skip-gram with negative sampling over walk corpora, in plain and
// order-aware (structured) variants. The entity vector is the input-matrix
// row. Training is single-threaded and fully deterministic given the config
// seed; the loss per step is
//   -log sigmoid(u_ctx . v_c) - sum_n log sigmoid(-u_n . v_c)
// with noise rows drawn from the unigram distribution raised to 0.75. The
// order-aware variant keeps one output matrix per signed window offset
// (2c matrices); the plain variant shares a single matrix.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "truewalks/rng.hpp"
#include "truewalks/walks.hpp"

namespace truewalks {

using TokenCorpus = std::vector<std::vector<std::string>>;

inline TokenCorpus to_sentences(const std::vector<Walk>& walks) {
  TokenCorpus out;
  out.reserve(walks.size());
  for (const auto& w : walks) out.push_back(w.tokens);
  return out;
}

struct SkipGramConfig {
  std::size_t dim = 100;
  std::size_t window = 5;  // c
  std::size_t epochs = 5;
  std::size_t noise_k = 5;
  double learning_rate = 0.025;  // decayed linearly to learning_rate/10000
  std::size_t min_count = 1;
  bool order_aware = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (learning_rate <= 0) throw std::invalid_argument("learning_rate must be > 0");
  }
};

struct Vocab {
  std::map<std::string, std::size_t> index;
  std::vector<std::string> tokens;        // id -> token
  std::vector<std::uint64_t> counts;      // id -> corpus frequency

  std::size_t size() const { return tokens.size(); }
  std::optional<std::size_t> lookup(std::string_view token) const {
    auto it = index.find(std::string(token));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

// Indices run by descending frequency, ties broken lexicographically.
inline Vocab build_vocab(const TokenCorpus& corpus, std::size_t min_count) {
  std::map<std::string, std::uint64_t> freq;
  for (const auto& sentence : corpus) {
    for (const auto& tok : sentence) ++freq[tok];
  }
  std::vector<std::pair<std::string, std::uint64_t>> order(freq.begin(), freq.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab v;
  for (auto& [tok, count] : order) {
    if (count < min_count) continue;
    v.index.emplace(tok, v.tokens.size());
    v.tokens.push_back(tok);
    v.counts.push_back(count);
  }
  return v;
}

struct EmbeddingModel {
  Vocab vocab;
  std::size_t dim = 0;
  std::size_t window = 0;
  bool order_aware = false;
  std::vector<double> input;                 // |V| x dim, row-major
  std::vector<std::vector<double>> output;   // 1 matrix, or 2c when order-aware
  std::vector<double> epoch_mean_loss;

  // Offset j in [-c,-1] maps to matrix j+c, j in [1,c] to c+j-1.
  std::size_t matrix_for_offset(int j) const {
    if (!order_aware) return 0;
    const int c = static_cast<int>(window);
    if (j == 0 || j < -c || j > c) throw std::invalid_argument("offset out of window");
    return static_cast<std::size_t>(j < 0 ? j + c : c + j - 1);
  }

  const double* row(std::size_t idx) const { return &input[idx * dim]; }
  std::optional<std::vector<double>> vector_of(std::string_view token) const {
    auto idx = vocab.lookup(token);
    if (!idx) return std::nullopt;
    return std::vector<double>(row(*idx), row(*idx) + dim);
  }
};

// ---------------------------------------------------------------------------
// Noise distribution

struct NoiseDistribution {
  std::vector<double> cumulative;

  explicit NoiseDistribution(const Vocab& vocab) {
    cumulative.reserve(vocab.size());
    double acc = 0;
    for (auto c : vocab.counts) {
      acc += std::pow(static_cast<double>(c), 0.75);
      cumulative.push_back(acc);
    }
  }

  std::size_t sample(Rng& rng) const {
    const double u = rng.next_double() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;  // u == total mass edge
    return static_cast<std::size_t>(it - cumulative.begin());
  }
};

constexpr std::size_t kNoForbidden = static_cast<std::size_t>(-1);

// A draw equal to `forbidden` (the current context token) is redrawn, at most
// 100 times, then kept; a single-token vocabulary therefore still yields k
// samples.
inline void sample_noise_into(const NoiseDistribution& dist, std::size_t k, Rng& rng,
                              std::size_t forbidden, std::vector<std::size_t>& out) {
  out.clear();
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t s = dist.sample(rng);
    for (int tries = 0; s == forbidden && tries < 100; ++tries) s = dist.sample(rng);
    out.push_back(s);
  }
}

inline std::vector<std::size_t> sample_noise(const NoiseDistribution& dist, std::size_t k,
                                             Rng& rng, std::size_t forbidden = kNoForbidden) {
  std::vector<std::size_t> out;
  sample_noise_into(dist, k, rng, forbidden, out);
  return out;
}

// ---------------------------------------------------------------------------
// One skip-gram step

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + e^x) without overflow; -log sigmoid(x) = softplus(-x).
inline double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace detail

struct SgStep {
  double loss = 0;
  std::vector<double> grad_center;
  // Aggregated per unique output row of the offset's matrix, ascending index.
  std::vector<std::pair<std::size_t, std::vector<double>>> grad_output;
};

// Pure loss and exact analytic gradients for one (center, context, noise)
// step. Duplicate noise indices aggregate into a single output-row gradient.
inline SgStep sg_step_loss_grad(const EmbeddingModel& m, std::size_t center, std::size_t context,
                                const std::vector<std::size_t>& noise, int offset = 1) {
  const auto& M = m.output[m.matrix_for_offset(offset)];
  const double* v = m.row(center);
  const std::size_t dim = m.dim;

  SgStep step;
  step.grad_center.assign(dim, 0.0);
  std::map<std::size_t, double> coeff;  // row -> d(loss)/d(u_row . v)

  auto accumulate = [&](std::size_t r, bool is_context) {
    const double* u = &M[r * dim];
    double x = 0;
    for (std::size_t d = 0; d < dim; ++d) x += u[d] * v[d];
    const double s = detail::sigmoid(x);
    step.loss += is_context ? detail::softplus(-x) : detail::softplus(x);
    const double g = is_context ? s - 1.0 : s;
    coeff[r] += g;
    for (std::size_t d = 0; d < dim; ++d) step.grad_center[d] += g * u[d];
  };
  accumulate(context, true);
  for (auto n : noise) accumulate(n, false);

  for (const auto& [r, g] : coeff) {
    std::vector<double> grad(dim);
    for (std::size_t d = 0; d < dim; ++d) grad[d] = g * v[d];
    step.grad_output.emplace_back(r, std::move(grad));
  }
  return step;
}

namespace detail {

struct SgScratch {
  std::vector<double> grad_center;
  std::vector<double> coeff;
  std::vector<std::size_t> noise;
};

// Fused compute-and-update: all dot products run against pre-update rows, so
// the applied update equals -lr times the gradients of sg_step_loss_grad.
inline double sg_step_apply(EmbeddingModel& m, std::size_t center, std::size_t context,
                            const std::vector<std::size_t>& noise, int offset, double lr,
                            SgScratch& sc) {
  auto& M = m.output[m.matrix_for_offset(offset)];
  double* v = &m.input[center * m.dim];
  const std::size_t dim = m.dim;

  sc.grad_center.assign(dim, 0.0);
  sc.coeff.assign(noise.size() + 1, 0.0);
  double loss = 0;

  auto score = [&](std::size_t slot, std::size_t r, bool is_context) {
    const double* u = &M[r * dim];
    double x = 0;
    for (std::size_t d = 0; d < dim; ++d) x += u[d] * v[d];
    const double s = sigmoid(x);
    loss += is_context ? softplus(-x) : softplus(x);
    const double g = is_context ? s - 1.0 : s;
    sc.coeff[slot] = g;
    for (std::size_t d = 0; d < dim; ++d) sc.grad_center[d] += g * u[d];
  };
  score(0, context, true);
  for (std::size_t i = 0; i < noise.size(); ++i) score(i + 1, noise[i], false);

  auto update_row = [&](std::size_t slot, std::size_t r) {
    double* u = &M[r * dim];
    const double g = lr * sc.coeff[slot];
    for (std::size_t d = 0; d < dim; ++d) u[d] -= g * v[d];
  };
  update_row(0, context);
  for (std::size_t i = 0; i < noise.size(); ++i) update_row(i + 1, noise[i]);
  for (std::size_t d = 0; d < dim; ++d) v[d] -= lr * sc.grad_center[d];
  return loss;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Training

inline EmbeddingModel train(const TokenCorpus& corpus, const SkipGramConfig& cfg) {
  cfg.validate();
  EmbeddingModel m;
  m.vocab = build_vocab(corpus, cfg.min_count);
  m.dim = cfg.dim;
  m.window = cfg.window;
  m.order_aware = cfg.order_aware;

  const std::size_t V = m.vocab.size();
  const double bound = 0.5 / static_cast<double>(cfg.dim);
  Rng init_rng(mix_seed(cfg.seed, std::string_view("sg-init")));
  m.input.resize(V * cfg.dim);
  for (auto& x : m.input) x = init_rng.uniform(-bound, bound);
  m.output.assign(cfg.order_aware ? 2 * cfg.window : 1,
                  std::vector<double>(V * cfg.dim, 0.0));
  if (V == 0) return m;

  std::vector<std::vector<std::size_t>> seqs;
  std::size_t total_positions = 0;
  for (const auto& sentence : corpus) {
    std::vector<std::size_t> seq;
    seq.reserve(sentence.size());
    for (const auto& tok : sentence) {
      if (auto idx = m.vocab.lookup(tok)) seq.push_back(*idx);
    }
    if (seq.empty()) continue;
    total_positions += seq.size();
    seqs.push_back(std::move(seq));
  }
  if (total_positions == 0) return m;

  const NoiseDistribution dist(m.vocab);
  Rng rng(mix_seed(cfg.seed, std::string_view("sg-train")));
  detail::SgScratch scratch;
  const double total_steps = static_cast<double>(cfg.epochs * total_positions);
  const int c = static_cast<int>(cfg.window);
  std::size_t t = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0;
    std::size_t steps = 0;
    for (const auto& seq : seqs) {
      const int len = static_cast<int>(seq.size());
      for (int l = 0; l < len; ++l) {
        const double lr = cfg.learning_rate *
                          std::max(1.0 - static_cast<double>(t) / total_steps, 1e-4);
        ++t;
        for (int j = -c; j <= c; ++j) {
          if (j == 0 || l + j < 0 || l + j >= len) continue;
          const std::size_t context = seq[static_cast<std::size_t>(l + j)];
          sample_noise_into(dist, cfg.noise_k, rng, context, scratch.noise);
          loss_sum += detail::sg_step_apply(m, seq[static_cast<std::size_t>(l)], context,
                                            scratch.noise, j, lr, scratch);
          ++steps;
        }
      }
    }
    m.epoch_mean_loss.push_back(steps ? loss_sum / static_cast<double>(steps) : 0.0);
  }
  return m;
}

// Output-row score of (center -> context at signed offset j); the quantity
// the trained softmax approximates, exposed for order-sensitivity checks.
inline double predict_score(const EmbeddingModel& m, std::size_t center, std::size_t context,
                            int offset) {
  const auto& M = m.output[m.matrix_for_offset(offset)];
  const double* v = m.row(center);
  const double* u = &M[context * m.dim];
  double x = 0;
  for (std::size_t d = 0; d < m.dim; ++d) x += u[d] * v[d];
  return x;
}

struct DualModels {
  EmbeddingModel positive;
  EmbeddingModel negative;
};

// Independent models over the two polarity corpora, on disjoint seed streams.
inline DualModels train_dual(const WalkCorpus& corpus, const SkipGramConfig& cfg) {
  SkipGramConfig pos_cfg = cfg;
  pos_cfg.seed = mix_seed(cfg.seed, std::string_view("positive"));
  SkipGramConfig neg_cfg = cfg;
  neg_cfg.seed = mix_seed(cfg.seed, std::string_view("negative"));
  return {train(to_sentences(corpus.positive), pos_cfg),
          train(to_sentences(corpus.negative), neg_cfg)};
}

// ---------------------------------------------------------------------------
// Embedding text format: "<count> <dim>" header, then one token per line
// followed by its components at full round-trip precision.

struct EmbeddingTextRow {
  std::string token;
  std::vector<double> values;

  bool operator==(const EmbeddingTextRow&) const = default;
};

namespace detail {

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline std::string write_embedding_text(const std::vector<EmbeddingTextRow>& rows,
                                        std::size_t dim) {
  std::string out = std::to_string(rows.size()) + " " + std::to_string(dim) + "\n";
  for (const auto& r : rows) {
    out += r.token;
    for (double x : r.values) {
      out.push_back(' ');
      out += detail::format_double(x);
    }
    out.push_back('\n');
  }
  return out;
}

inline std::vector<EmbeddingTextRow> embedding_rows(const EmbeddingModel& m) {
  std::vector<EmbeddingTextRow> rows;
  rows.reserve(m.vocab.size());
  for (std::size_t i = 0; i < m.vocab.size(); ++i) {
    rows.push_back({m.vocab.tokens[i], std::vector<double>(m.row(i), m.row(i) + m.dim)});
  }
  return rows;
}

struct ParsedEmbeddings {
  std::vector<EmbeddingTextRow> rows;
  std::size_t dim = 0;
};

// Throws std::runtime_error on malformed content; this format is produced by
// this library, not adversarial input.
inline ParsedEmbeddings parse_embedding_text(std::string_view text) {
  ParsedEmbeddings out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::size_t declared_count = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("embedding text line " + std::to_string(line_no) + ": " + what);
  };
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line(text.substr(pos, eol - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    pos = eol + 1;
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::size_t p = 0;
    while (p < line.size()) {
      std::size_t sp = line.find(' ', p);
      if (sp == std::string::npos) sp = line.size();
      if (sp > p) fields.push_back(line.substr(p, sp - p));
      p = sp + 1;
    }
    if (line_no == 1) {
      if (fields.size() != 2) fail("header must be '<count> <dim>'");
      declared_count = std::strtoull(fields[0].c_str(), nullptr, 10);
      out.dim = std::strtoull(fields[1].c_str(), nullptr, 10);
      continue;
    }
    if (fields.size() != out.dim + 1) fail("expected " + std::to_string(out.dim + 1) + " fields");
    EmbeddingTextRow row;
    row.token = fields[0];
    row.values.reserve(out.dim);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      char* end = nullptr;
      const double x = std::strtod(fields[i].c_str(), &end);
      if (end == fields[i].c_str() || *end != '\0') fail("bad number '" + fields[i] + "'");
      row.values.push_back(x);
    }
    out.rows.push_back(std::move(row));
  }
  if (line_no == 0) throw std::runtime_error("embedding text: empty input");
  if (out.rows.size() != declared_count) {
    throw std::runtime_error("embedding text: declared " + std::to_string(declared_count) +
                             " rows, found " + std::to_string(out.rows.size()));
  }
  return out;
}

}  // namespace truewalks
