#pragma once

// Final per-entity representation: the positive-model vector concatenated
// with the negative-model vector. An entity absent from one model gets a
// zero half (and a logged warning); absent from both is an error.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "truewalks/embedding.hpp"

namespace truewalks {

enum class FusionStrategy { Concat };

struct EntityEmbeddingTable {
  std::map<std::string, std::vector<double>> vectors;
  FusionStrategy strategy = FusionStrategy::Concat;
  std::size_t dim_pos = 0;
  std::size_t dim_neg = 0;
  std::vector<std::string> warnings;

  std::size_t dim() const { return dim_pos + dim_neg; }
};

inline EntityEmbeddingTable combine(const EmbeddingModel& pos_model,
                                    const EmbeddingModel& neg_model,
                                    const std::vector<std::string>& entities,
                                    FusionStrategy strategy = FusionStrategy::Concat) {
  if (entities.empty()) throw std::invalid_argument("combine: empty entity list");
  (void)strategy;  // Concat is the only strategy; enum kept extensible

  EntityEmbeddingTable table;
  table.dim_pos = pos_model.dim;
  table.dim_neg = neg_model.dim;

  std::string missing_both;
  for (const auto& e : entities) {
    auto pos = pos_model.vector_of(e);
    auto neg = neg_model.vector_of(e);
    if (!pos && !neg) {
      missing_both += missing_both.empty() ? e : ", " + e;
      continue;
    }
    if (!pos) table.warnings.push_back("entity " + e + " has no positive vector, zero-filled");
    if (!neg) table.warnings.push_back("entity " + e + " has no negative vector, zero-filled");
    std::vector<double> fused;
    fused.reserve(table.dim());
    if (pos) {
      fused.insert(fused.end(), pos->begin(), pos->end());
    } else {
      fused.resize(table.dim_pos, 0.0);
    }
    if (neg) {
      fused.insert(fused.end(), neg->begin(), neg->end());
    } else {
      fused.resize(table.dim(), 0.0);
    }
    table.vectors.emplace(e, std::move(fused));
  }
  if (!missing_both.empty()) {
    throw std::runtime_error("entities missing from both models: " + missing_both);
  }
  return table;
}

inline std::vector<EmbeddingTextRow> table_rows(const EntityEmbeddingTable& table) {
  std::vector<EmbeddingTextRow> rows;
  rows.reserve(table.vectors.size());
  for (const auto& [entity, vec] : table.vectors) rows.push_back({entity, vec});
  return rows;
}

inline std::string write_table(const EntityEmbeddingTable& table) {
  return write_embedding_text(table_rows(table), table.dim());
}

}  // namespace truewalks
