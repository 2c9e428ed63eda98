#pragma once

// Polarity-aware random walk generation. Each root entity yields two walk
// sets: positive-rooted walks that may climb subclass edges (`subClassOf`
// tokens) and negative-rooted walks that may descend them (`superClassOf`
// tokens). The first hop fixes the walk's status by selecting only among
// assertion statements of that polarity.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "truewalks/kg.hpp"
#include "truewalks/rng.hpp"

namespace truewalks {

struct WalkConfig {
  std::size_t max_walks = 100;  // w
  std::size_t max_depth = 4;    // d, counted in nodes along the path
  std::uint64_t seed = 0;

  void validate() const {
    if (max_walks < 1) throw std::invalid_argument("max_walks must be >= 1");
    if (max_depth < 2) throw std::invalid_argument("max_depth must be >= 2");
  }
};

// tokens = [v_r, e_1, v_1, e_2, v_2, ...]; at most max_depth-1 hop pairs.
struct Walk {
  std::vector<std::string> tokens;
  Polarity status = Polarity::Positive;

  auto operator<=>(const Walk&) const = default;
};

struct EntityWalkIndex {
  std::vector<std::size_t> positive;  // indices into WalkCorpus::positive
  std::vector<std::size_t> negative;
};

struct WalkCorpus {
  std::vector<Walk> positive;
  std::vector<Walk> negative;
  std::map<std::string, EntityWalkIndex> by_entity;  // keyed by root token
};

// Samples up to w walks for one entity and status. Visited-neighbor memory is
// keyed by (edge token, node token, position of the edge token in the walk)
// and persists across the attempts for this entity, so each emitted walk is
// new. When every raw candidate at some step is memory-filtered the attempt
// is discarded; when the node has no candidates at all the partial walk is a
// maximal path and is emitted. Either way the last hop is marked visited so
// later attempts unwind further back. Walks shorter than one hop are never
// emitted.
inline std::vector<Walk> get_random_walks(const KnowledgeGraph& kg, const NodeId& entity,
                                          Polarity status, const WalkConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<Walk> walks;
  std::set<std::tuple<std::string, std::string, std::size_t>> visited;
  const std::string root = entity.token();

  const std::size_t fail_bound = 10 * cfg.max_walks;
  std::size_t failures = 0;
  while (walks.size() < cfg.max_walks && failures < fail_bound) {
    Walk walk{{root}, status};
    NodeId current = entity;
    std::size_t depth = 1;
    bool emitted = false;
    bool dead_at_root = false;

    while (depth < cfg.max_depth) {
      const auto raw = depth == 1 ? kg.assertion_hops(entity, status) : kg.neighbors(current, status);
      std::vector<const Hop*> candidates;
      candidates.reserve(raw.size());
      for (const auto& h : raw) {
        if (!visited.count({h.edge_token, h.node.token(), walk.tokens.size()})) {
          candidates.push_back(&h);
        }
      }
      if (candidates.empty()) {
        if (raw.empty() && walk.tokens.size() >= 3) {
          // Structural dead end: the partial walk is maximal, keep it.
          visited.insert({walk.tokens[walk.tokens.size() - 2], walk.tokens.back(),
                          walk.tokens.size() - 2});
          walks.push_back(walk);
          emitted = true;
        } else if (walk.tokens.size() > 2) {
          // Memory exhaustion: drop the attempt, unwind one hop.
          visited.insert({walk.tokens[walk.tokens.size() - 2], walk.tokens.back(),
                          walk.tokens.size() - 2});
        } else {
          // No first hop left; no later attempt can do better.
          dead_at_root = true;
        }
        break;
      }
      const Hop& hop = *candidates[rng.below(candidates.size())];
      walk.tokens.push_back(hop.edge_token);
      walk.tokens.push_back(hop.node.token());
      current = hop.node;
      ++depth;
      if (depth == cfg.max_depth) {
        // Full-length walk: mark the terminal hop.
        visited.insert({hop.edge_token, hop.node.token(), walk.tokens.size() - 2});
        walks.push_back(walk);
        emitted = true;
      }
    }
    if (dead_at_root) break;
    if (emitted) {
      failures = 0;
    } else {
      ++failures;
    }
  }

  // Memory marks only terminal hops, so near-duplicates can still slip in
  // through shared prefixes; drop exact repeats, keeping first emission order.
  std::vector<Walk> unique;
  unique.reserve(walks.size());
  std::set<std::vector<std::string>> seen;
  for (auto& w : walks) {
    if (seen.insert(w.tokens).second) unique.push_back(std::move(w));
  }
  return unique;
}

// Positive and negative walks for one entity, each from its own seed-derived
// stream so corpus output is independent of scheduling.
struct TrueWalks {
  std::vector<Walk> positive;
  std::vector<Walk> negative;
};

inline Rng walk_stream(std::uint64_t seed, const NodeId& entity, Polarity status) {
  std::uint64_t s = mix_seed(seed, entity.token());
  return Rng(mix_seed(s, status == Polarity::Positive ? 1u : 2u));
}

inline TrueWalks get_truewalks(const KnowledgeGraph& kg, const NodeId& entity,
                               const WalkConfig& cfg) {
  TrueWalks out;
  Rng pos_rng = walk_stream(cfg.seed, entity, Polarity::Positive);
  out.positive = get_random_walks(kg, entity, Polarity::Positive, cfg, pos_rng);
  Rng neg_rng = walk_stream(cfg.seed, entity, Polarity::Negative);
  out.negative = get_random_walks(kg, entity, Polarity::Negative, cfg, neg_rng);
  return out;
}

// Exhaustive enumeration of every direction-legal walk with 1..max_depth-1
// hops, visited memory ignored. Superset of any sampled output; testing
// oracle for small graphs.
inline std::set<Walk> enumerate_valid_walks(const KnowledgeGraph& kg, const NodeId& entity,
                                            Polarity status, std::size_t max_depth) {
  std::set<Walk> out;
  struct Frame {
    NodeId node;
    std::vector<std::string> tokens;
    std::size_t depth;
  };
  std::vector<Frame> stack;
  for (const auto& h : kg.assertion_hops(entity, status)) {
    stack.push_back({h.node, {entity.token(), h.edge_token, h.node.token()}, 2});
  }
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    out.insert({f.tokens, status});
    if (f.depth >= max_depth) continue;
    for (const auto& h : kg.neighbors(f.node, status)) {
      Frame next{h.node, f.tokens, f.depth + 1};
      next.tokens.push_back(h.edge_token);
      next.tokens.push_back(h.node.token());
      stack.push_back(std::move(next));
    }
  }
  return out;
}

// Walks for every root entity. Entities are processed in their sorted order
// and each carries its own PRNG stream, so the corpus is identical for any
// worker count.
inline WalkCorpus build_corpus(const KnowledgeGraph& kg, const WalkConfig& cfg,
                               std::size_t workers = 1) {
  cfg.validate();
  std::vector<NodeId> roots(kg.root_entities().begin(), kg.root_entities().end());
  std::vector<TrueWalks> per_entity(roots.size());

  if (workers <= 1 || roots.size() <= 1) {
    for (std::size_t i = 0; i < roots.size(); ++i) {
      per_entity[i] = get_truewalks(kg, roots[i], cfg);
    }
  } else {
    const std::size_t n_threads = std::min(workers, roots.size());
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < roots.size(); i += n_threads) {
          per_entity[i] = get_truewalks(kg, roots[i], cfg);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  WalkCorpus corpus;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    auto& index = corpus.by_entity[roots[i].token()];
    for (auto& w : per_entity[i].positive) {
      index.positive.push_back(corpus.positive.size());
      corpus.positive.push_back(std::move(w));
    }
    for (auto& w : per_entity[i].negative) {
      index.negative.push_back(corpus.negative.size());
      corpus.negative.push_back(std::move(w));
    }
  }
  return corpus;
}

// Debug dump: one walk per line, tokens space-separated, `P|`/`N|` prefix.
inline std::string write_corpus(const WalkCorpus& corpus) {
  std::string out;
  auto emit = [&](const std::vector<Walk>& walks, const char* prefix) {
    for (const auto& w : walks) {
      out += prefix;
      for (std::size_t i = 0; i < w.tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += w.tokens[i];
      }
      out.push_back('\n');
    }
  };
  emit(corpus.positive, "P|");
  emit(corpus.negative, "N|");
  return out;
}

// Inverse of write_corpus; rebuilds the per-entity index from first tokens.
// Throws std::runtime_error on a line without a P|/N| prefix.
inline WalkCorpus parse_corpus(std::string_view text) {
  WalkCorpus corpus;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    pos = eol + 1;
    if (line.empty()) continue;
    if (line.size() < 2 || (line[0] != 'P' && line[0] != 'N') || line[1] != '|') {
      throw std::runtime_error("corpus line " + std::to_string(line_no) +
                               ": missing P|/N| prefix");
    }
    Walk w;
    w.status = line[0] == 'P' ? Polarity::Positive : Polarity::Negative;
    std::size_t p = 2;
    while (p < line.size()) {
      std::size_t sp = line.find(' ', p);
      if (sp == std::string_view::npos) sp = line.size();
      if (sp > p) w.tokens.emplace_back(line.substr(p, sp - p));
      p = sp + 1;
    }
    if (w.tokens.empty()) {
      throw std::runtime_error("corpus line " + std::to_string(line_no) + ": empty walk");
    }
    auto& bucket = w.status == Polarity::Positive ? corpus.positive : corpus.negative;
    auto& index = corpus.by_entity[w.tokens.front()];
    (w.status == Polarity::Positive ? index.positive : index.negative)
        .push_back(bucket.size());
    bucket.push_back(std::move(w));
  }
  return corpus;
}

}  // namespace truewalks
