#pragma once

// Synthetic benchmark generator. Builds a rooted subclass tree (BFS-filled
// b-ary, plus a few extra deeper-to-shallower subclass edges so the hierarchy
// is a DAG rather than a tree), assigns entities round-robin to the disjoint
// subtrees under the root's children, and plants the pair-label signal in the
// NEGATIVE annotations only: same-group entities share negative-closure
// classes, while positive annotations are drawn uniformly for every entity.
// A method that ignores negative statements is therefore blind to the labels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "truewalks/ingest.hpp"
#include "truewalks/kg.hpp"
#include "truewalks/rng.hpp"

namespace truewalks {

struct SynthConfig {
  std::size_t n_classes = 31;
  std::size_t branching = 2;
  std::size_t depth = 4;        // deepest allowed tree level, root at 0
  std::size_t n_entities = 40;
  std::size_t n_annotations = 3;  // per entity, per polarity
  std::size_t n_pairs = 60;
  double signal = 1.0;  // probability a positive pair shares a group
  std::uint64_t seed = 0;

  void validate() const {
    if (n_classes < 1 || branching < 1 || depth < 1 || n_entities < 1 || n_annotations < 1 ||
        n_pairs < 1) {
      throw std::invalid_argument("synth: all counts must be >= 1");
    }
    if (!(signal >= 0.0 && signal <= 1.0)) {
      throw std::invalid_argument("synth: signal must be in [0,1]");
    }
  }
};

struct SynthSummary {
  std::size_t classes = 0;
  std::size_t subclass_edges = 0;
  std::size_t entities = 0;
  std::size_t positive_annotations = 0;
  std::size_t negative_annotations = 0;
  std::size_t positive_pairs = 0;
  std::size_t negative_pairs = 0;
};

struct SynthData {
  std::vector<Statement> ontology;  // subclass edges, tree edges first
  std::vector<AnnotationRecord> annotations;
  std::vector<PairRecord> pairs;
  std::vector<std::size_t> entity_group;               // per entity
  std::vector<std::vector<std::size_t>> group_classes; // class ids per group subtree
  SynthSummary summary;
};

inline std::string synth_class_name(std::size_t i) { return "C" + std::to_string(i); }
inline std::string synth_entity_name(std::size_t i) { return "E" + std::to_string(i); }
inline constexpr std::string_view kSynthProperty = "hasFunction";

namespace detail {

// BFS index arithmetic for the complete b-ary tree: parent of node i is
// (i-1)/b, so nodes 0..n-1 fill levels left to right.
inline std::size_t synth_parent(std::size_t i, std::size_t b) { return (i - 1) / b; }

inline std::size_t synth_depth(std::size_t i, std::size_t b) {
  std::size_t d = 0;
  while (i != 0) {
    i = synth_parent(i, b);
    ++d;
  }
  return d;
}

}  // namespace detail

inline SynthData gen_benchmark(const SynthConfig& cfg) {
  cfg.validate();

  // capacity of `depth` levels; accumulate with saturation
  std::size_t capacity = 0, level = 1;
  for (std::size_t d = 0; d <= cfg.depth && capacity < cfg.n_classes; ++d) {
    capacity += level;
    if (level > cfg.n_classes) level = cfg.n_classes;  // avoid overflow
    level *= cfg.branching;
  }
  if (capacity < cfg.n_classes) {
    throw std::invalid_argument("synth: branching/depth cannot hold n_classes");
  }

  const std::size_t n_groups = std::min(cfg.branching, cfg.n_classes - 1);
  if (n_groups < 2) {
    throw std::invalid_argument("synth: need at least two top-level class subtrees");
  }
  if (cfg.n_entities < 2 * n_groups) {
    throw std::invalid_argument("synth: need at least two entities per group");
  }
  if (cfg.n_pairs > cfg.n_entities * (cfg.n_entities - 1) / 2) {
    throw std::invalid_argument("synth: more pairs than distinct entity pairs");
  }
  if (cfg.n_annotations > cfg.n_classes) {
    throw std::invalid_argument("synth: more annotations than classes");
  }

  SynthData out;
  Rng rng(mix_seed(cfg.seed, std::string_view("synth")));

  std::vector<std::size_t> depth_of(cfg.n_classes);
  for (std::size_t i = 0; i < cfg.n_classes; ++i) {
    depth_of[i] = detail::synth_depth(i, cfg.branching);
  }

  // group of a class: which root child it descends from (tree parentage)
  std::vector<std::size_t> class_group(cfg.n_classes, static_cast<std::size_t>(-1));
  out.group_classes.assign(n_groups, {});
  for (std::size_t i = 1; i < cfg.n_classes; ++i) {
    std::size_t a = i;
    while (detail::synth_parent(a, cfg.branching) != 0) a = detail::synth_parent(a, cfg.branching);
    class_group[i] = a - 1;
    out.group_classes[a - 1].push_back(i);
  }
  for (std::size_t g = 0; g < n_groups; ++g) {
    if (out.group_classes[g].size() < cfg.n_annotations) {
      throw std::invalid_argument("synth: group subtree too small for negative annotations");
    }
  }

  auto subclass = [](std::size_t child, std::size_t parent) {
    return Statement{NodeId::iri(synth_class_name(child)),
                     EdgeLabel{std::string(vocab::kSubClassOf)},
                     NodeId::iri(synth_class_name(parent)), Polarity::Positive};
  };
  for (std::size_t i = 1; i < cfg.n_classes; ++i) {
    out.ontology.push_back(subclass(i, detail::synth_parent(i, cfg.branching)));
  }

  // extra subclass edges, always deeper -> strictly shallower, so acyclic
  const auto n_extra = static_cast<std::size_t>(
      std::ceil(0.05 * static_cast<double>(cfg.n_classes)));
  std::vector<std::size_t> deep_nodes;
  for (std::size_t i = 0; i < cfg.n_classes; ++i) {
    if (depth_of[i] >= 2) deep_nodes.push_back(i);
  }
  std::set<std::pair<std::size_t, std::size_t>> extra_edges;
  if (!deep_nodes.empty()) {
    std::size_t attempts = 0;
    while (extra_edges.size() < n_extra && attempts < 100 * (n_extra + 1)) {
      ++attempts;
      const std::size_t child = deep_nodes[rng.below(deep_nodes.size())];
      const std::size_t target = rng.below(cfg.n_classes);
      if (depth_of[target] >= depth_of[child]) continue;
      if (target == detail::synth_parent(child, cfg.branching)) continue;
      if (extra_edges.emplace(child, target).second) {
        out.ontology.push_back(subclass(child, target));
      }
    }
  }

  // entities, round-robin across groups
  out.entity_group.resize(cfg.n_entities);
  std::vector<std::vector<std::size_t>> group_members(n_groups);
  for (std::size_t e = 0; e < cfg.n_entities; ++e) {
    out.entity_group[e] = e % n_groups;
    group_members[e % n_groups].push_back(e);
  }

  // annotations: positives uniform over all classes, negatives inside the
  // entity's group subtree; both without replacement per entity
  auto sample_distinct = [&](const std::vector<std::size_t>& pool, std::size_t k) {
    std::vector<std::size_t> copy(pool);
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(copy[i], copy[i + rng.below(copy.size() - i)]);
    }
    copy.resize(k);
    return copy;
  };
  std::vector<std::size_t> all_classes(cfg.n_classes);
  for (std::size_t i = 0; i < cfg.n_classes; ++i) all_classes[i] = i;
  for (std::size_t e = 0; e < cfg.n_entities; ++e) {
    for (auto c : sample_distinct(all_classes, cfg.n_annotations)) {
      out.annotations.push_back({synth_entity_name(e), std::string(kSynthProperty),
                                 synth_class_name(c), Polarity::Positive, 0});
    }
    for (auto c : sample_distinct(out.group_classes[out.entity_group[e]], cfg.n_annotations)) {
      out.annotations.push_back({synth_entity_name(e), std::string(kSynthProperty),
                                 synth_class_name(c), Polarity::Negative, 0});
    }
  }

  // pairs: label-1 shares a group with probability max(signal, 0.05), label-0
  // with the 0.05 coincidence baseline; unique unordered, balanced
  const std::size_t n_neg_pairs = cfg.n_pairs / 2;
  const std::size_t n_pos_pairs = cfg.n_pairs - n_neg_pairs;
  std::set<std::pair<std::size_t, std::size_t>> used;
  auto draw_pair = [&](bool same_group) -> std::pair<std::size_t, std::size_t> {
    if (same_group) {
      const auto& members = group_members[rng.below(n_groups)];
      const std::size_t i = members[rng.below(members.size())];
      std::size_t j = members[rng.below(members.size())];
      while (j == i) j = members[rng.below(members.size())];
      return {std::min(i, j), std::max(i, j)};
    }
    const std::size_t i = rng.below(cfg.n_entities);
    std::size_t j = rng.below(cfg.n_entities);
    while (out.entity_group[j] == out.entity_group[i]) j = rng.below(cfg.n_entities);
    return {std::min(i, j), std::max(i, j)};
  };
  auto place = [&](int label, double p_same, std::size_t want) {
    std::size_t placed = 0, attempts = 0;
    const std::size_t budget = 1000 * (want + 1);
    while (placed < want) {
      if (++attempts > budget) {
        throw std::runtime_error("synth: could not place enough unique pairs");
      }
      const auto [i, j] = draw_pair(rng.bernoulli(p_same));
      if (!used.emplace(i, j).second) continue;
      out.pairs.push_back({synth_entity_name(i), synth_entity_name(j), label, 0});
      ++placed;
    }
  };
  place(1, std::max(cfg.signal, 0.05), n_pos_pairs);
  place(0, 0.05, n_neg_pairs);

  out.summary = {cfg.n_classes,
                 out.ontology.size(),
                 cfg.n_entities,
                 cfg.n_entities * cfg.n_annotations,
                 cfg.n_entities * cfg.n_annotations,
                 n_pos_pairs,
                 n_neg_pairs};
  return out;
}

}  // namespace truewalks
