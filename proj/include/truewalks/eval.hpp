#pragma once

// Both evaluation protocols over fused entity embeddings:
//  - pair classification: Hadamard pair features into a random forest under
//    Monte Carlo cross-validation, with per-split hyperparameter grid
//    selection on an inner 80/20 split and Wilcoxon signed-rank comparisons;
//  - similarity ranking: cosine rank of the true counterpart among all
//    candidates, with hits@k, mean rank, and a rank-based AUC.
//
// Ranking uses the optimistic tie rule (rank counts strictly-greater
// similarities only); the AUC term uses mid-ranks so fully tied similarity
// lists score 0.5 instead of 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "truewalks/fuse.hpp"
#include "truewalks/ingest.hpp"
#include "truewalks/random_forest.hpp"
#include "truewalks/rng.hpp"

namespace truewalks {

struct EvalConfig {
  std::size_t mccv_repetitions = 30;  // M
  double beta = 0.3;                  // test fraction
  std::vector<std::size_t> rf_estimators = {50, 100, 200};
  std::vector<int> rf_depths = {2, 4, 6, 0};  // 0 = unbounded
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  void validate() const {
    if (mccv_repetitions < 1) throw std::invalid_argument("mccv_repetitions must be >= 1");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must be in (0,1)");
    if (rf_estimators.empty() || rf_depths.empty()) {
      throw std::invalid_argument("rf grid must be nonempty");
    }
  }
};

inline std::vector<double> hadamard_pair(const std::vector<double>& a,
                                         const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hadamard_pair: length mismatch");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo cross-validation

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

inline std::vector<Split> mccv_splits(std::size_t n, std::size_t M, double beta, Rng& rng) {
  if (n < 2) throw std::invalid_argument("mccv_splits: need at least 2 samples");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("mccv_splits: beta in (0,1)");
  const auto test_size = static_cast<std::size_t>(std::llround(beta * static_cast<double>(n)));
  std::vector<Split> out;
  out.reserve(M);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t m = 0; m < M; ++m) {
    rng.shuffle(perm);
    Split sp;
    sp.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(test_size));
    sp.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(test_size), perm.end());
    std::sort(sp.test.begin(), sp.test.end());
    std::sort(sp.train.begin(), sp.train.end());
    out.push_back(std::move(sp));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Precision / recall / weighted F

struct Prf {
  double precision = 0;  // positive class
  double recall = 0;     // positive class
  double f = 0;          // support-weighted across both classes
};

inline Prf prf_weighted(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw std::invalid_argument("prf_weighted: size mismatch or empty");
  }
  // confusion[t][p]
  std::size_t confusion[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++confusion[truth[i] ? 1 : 0][pred[i] ? 1 : 0];
  }
  auto metrics = [&](int cls) {
    const std::size_t c = cls ? 1 : 0;
    const double tp = static_cast<double>(confusion[c][c]);
    const double fp = static_cast<double>(confusion[1 - c][c]);
    const double fn = static_cast<double>(confusion[c][1 - c]);
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    return std::array<double, 3>{p, r, f};
  };
  const auto pos = metrics(1);
  const auto neg = metrics(0);
  const double support1 = static_cast<double>(confusion[1][0] + confusion[1][1]);
  const double support0 = static_cast<double>(confusion[0][0] + confusion[0][1]);
  const double n = support0 + support1;
  return {pos[0], pos[1], (support1 * pos[2] + support0 * neg[2]) / n};
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank test

// Two-sided p-value. Zero differences are dropped; exact sign enumeration for
// effective n <= 12, otherwise the normal approximation with tie-corrected
// variance and a continuity correction.
inline double wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: size mismatch");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const std::size_t n = diffs.size();
  if (n == 0) return 1.0;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });
  std::vector<double> rank(n);
  std::vector<std::size_t> tie_sizes;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(diffs[order[j]]) == std::abs(diffs[order[i]])) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) rank[order[k]] = avg;
    tie_sizes.push_back(j - i);
    i = j;
  }

  double w_plus = 0;
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (diffs[i] > 0) w_plus += rank[i];
  }
  const double w_minus = total - w_plus;

  if (n <= 12) {
    const double w_min = std::min(w_plus, w_minus);
    const std::uint64_t assignments = std::uint64_t{1} << n;
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < assignments; ++mask) {
      double w = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::uint64_t{1} << i)) w += rank[i];
      }
      if (w <= w_min + 1e-9) ++count;
    }
    return std::min(1.0, 2.0 * static_cast<double>(count) / static_cast<double>(assignments));
  }

  const double nd = static_cast<double>(n);
  const double mu = nd * (nd + 1) / 4.0;
  double sigma2 = nd * (nd + 1) * (2 * nd + 1) / 24.0;
  for (auto t : tie_sizes) {
    const double td = static_cast<double>(t);
    sigma2 -= (td * td * td - td) / 48.0;
  }
  double z = w_plus - mu;
  if (z > 0.5) {
    z -= 0.5;
  } else if (z < -0.5) {
    z += 0.5;
  } else {
    z = 0;
  }
  z /= std::sqrt(sigma2);
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

// ---------------------------------------------------------------------------
// Similarity ranking

struct RankingReport {
  double hits10 = 0;
  double hits100 = 0;
  double mean_rank = 0;
  double auc = 0;
  bool degenerate = false;  // every pair's similarity list fully tied
};

namespace detail {

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline const std::vector<double>& table_vector(const EntityEmbeddingTable& table,
                                               const std::string& entity) {
  auto it = table.vectors.find(entity);
  if (it == table.vectors.end()) {
    throw std::runtime_error("entity missing from embedding table: " + entity);
  }
  return it->second;
}

}  // namespace detail

inline RankingReport rank_eval(const EntityEmbeddingTable& table,
                               const std::vector<std::pair<std::string, std::string>>& pairs,
                               const std::vector<std::string>& candidates) {
  if (candidates.size() < 2) throw std::invalid_argument("rank_eval: need >= 2 candidates");
  if (pairs.empty()) throw std::invalid_argument("rank_eval: no pairs");

  RankingReport rep;
  std::size_t fully_tied = 0;
  double hits10 = 0, hits100 = 0, rank_sum = 0, auc_sum = 0;
  for (const auto& [e1, e2] : pairs) {
    const auto& v1 = detail::table_vector(table, e1);
    const auto& v2 = detail::table_vector(table, e2);
    const double target = detail::cosine(v1, v2);
    std::size_t greater = 0, ties = 0, others = 0;
    bool saw_e2 = false;
    for (const auto& c : candidates) {
      if (c == e1) continue;
      ++others;
      if (c == e2) {
        saw_e2 = true;
        continue;
      }
      const double s = detail::cosine(v1, detail::table_vector(table, c));
      if (s > target) {
        ++greater;
      } else if (s == target) {
        ++ties;
      }
    }
    if (!saw_e2) throw std::runtime_error("rank_eval: pair target not in candidates: " + e2);
    const double n_cand = static_cast<double>(others);
    const double rank_opt = 1.0 + static_cast<double>(greater);
    const double rank_mid = rank_opt + static_cast<double>(ties) / 2.0;
    hits10 += rank_opt <= 10 ? 1 : 0;
    hits100 += rank_opt <= 100 ? 1 : 0;
    rank_sum += rank_opt;
    auc_sum += n_cand > 1 ? (n_cand - rank_mid) / (n_cand - 1) : 1.0;
    if (ties == others - 1) ++fully_tied;
  }
  const double m = static_cast<double>(pairs.size());
  rep.hits10 = hits10 / m;
  rep.hits100 = hits100 / m;
  rep.mean_rank = rank_sum / m;
  rep.auc = auc_sum / m;
  rep.degenerate = fully_tied == pairs.size();
  return rep;
}

// CSV rows `entityA,entityB,label,cosine`, full float precision.
inline std::string export_similarity_distribution(const EntityEmbeddingTable& table,
                                                  const std::vector<PairRecord>& pairs) {
  std::string out = "entityA,entityB,label,cosine\n";
  for (const auto& p : pairs) {
    const double s = detail::cosine(detail::table_vector(table, p.a),
                                    detail::table_vector(table, p.b));
    out += p.a + "," + p.b + "," + std::to_string(p.label) + "," + detail::format_double(s) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification protocol

struct SplitResult {
  double precision = 0;
  double recall = 0;
  double f = 0;
  std::size_t n_estimators = 0;  // grid choice for this split
  int max_depth = 0;
};

struct EvalReport {
  double precision_median = 0;
  double recall_median = 0;
  double f_median = 0;
  std::vector<SplitResult> per_split;
  std::optional<RankingReport> ranking;
  std::map<std::string, std::map<std::string, double>> wilcoxon;  // metric -> baseline -> p
};

namespace detail {

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

template <typename T>
inline std::vector<T> take(const std::vector<T>& xs, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(xs[i]);
  return out;
}

}  // namespace detail

// One MCCV repetition: grid-select hyperparameters on an inner 80/20 split of
// the training fold by weighted F, refit on the whole fold, score the test
// fold. All randomness comes from this split's own stream.
inline SplitResult run_mccv_split(const std::vector<std::vector<double>>& features,
                                  const std::vector<int>& labels, const Split& split,
                                  const EvalConfig& cfg, std::uint64_t split_index) {
  Rng rng(mix_seed(mix_seed(cfg.seed, std::string_view("rf-split")), split_index));

  RfHyper best{cfg.rf_estimators[0], cfg.rf_depths[0], 2, 1};
  std::vector<std::size_t> inner(split.train);
  rng.shuffle(inner);
  auto val_n = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(inner.size())));
  if (val_n < 1) val_n = 1;
  if (val_n + 2 > inner.size()) val_n = inner.size() > 2 ? inner.size() - 2 : 0;

  if (val_n >= 1) {
    const std::vector<std::size_t> val_idx(inner.begin(),
                                           inner.begin() + static_cast<std::ptrdiff_t>(val_n));
    const std::vector<std::size_t> fit_idx(inner.begin() + static_cast<std::ptrdiff_t>(val_n),
                                           inner.end());
    const auto fit_rows = detail::take(features, fit_idx);
    const auto fit_labels = detail::take(labels, fit_idx);
    const auto val_rows = detail::take(features, val_idx);
    const auto val_labels = detail::take(labels, val_idx);
    double best_f = -1;
    for (auto est : cfg.rf_estimators) {
      for (auto depth : cfg.rf_depths) {
        const RfHyper hyper{est, depth, 2, 1};
        auto model = rf_fit(fit_rows, fit_labels, hyper, rng);
        const auto prf = prf_weighted(rf_predict(model, val_rows), val_labels);
        if (prf.f > best_f) {
          best_f = prf.f;
          best = hyper;
        }
      }
    }
  }

  auto model = rf_fit(detail::take(features, split.train), detail::take(labels, split.train),
                      best, rng);
  const auto prf = prf_weighted(rf_predict(model, detail::take(features, split.test)),
                                detail::take(labels, split.test));
  return {prf.precision, prf.recall, prf.f, best.n_estimators, best.max_depth};
}

inline EvalReport classify_eval(const EntityEmbeddingTable& table,
                                const std::vector<PairRecord>& pairs, const EvalConfig& cfg) {
  cfg.validate();
  if (pairs.size() < 4) throw std::invalid_argument("classify_eval: need >= 4 pairs");

  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  features.reserve(pairs.size());
  for (const auto& p : pairs) {
    features.push_back(hadamard_pair(detail::table_vector(table, p.a),
                                     detail::table_vector(table, p.b)));
    labels.push_back(p.label);
  }

  Rng split_rng(mix_seed(cfg.seed, std::string_view("mccv")));
  const auto splits = mccv_splits(pairs.size(), cfg.mccv_repetitions, cfg.beta, split_rng);

  std::vector<SplitResult> results(splits.size());
  auto run_range = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t m = begin; m < splits.size(); m += stride) {
      results[m] = run_mccv_split(features, labels, splits[m], cfg, m);
    }
  };
  if (cfg.workers <= 1) {
    run_range(0, 1);
  } else {
    const std::size_t n_threads = std::min(cfg.workers, splits.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(run_range, t, n_threads);
    for (auto& th : pool) th.join();
  }

  EvalReport report;
  report.per_split = std::move(results);
  std::vector<double> ps, rs, fs;
  for (const auto& r : report.per_split) {
    ps.push_back(r.precision);
    rs.push_back(r.recall);
    fs.push_back(r.f);
  }
  report.precision_median = detail::median(ps);
  report.recall_median = detail::median(rs);
  report.f_median = detail::median(fs);
  return report;
}

// Wilcoxon comparison of per-split metrics against a named baseline report.
inline void add_wilcoxon(EvalReport& report, const std::string& baseline_name,
                         const EvalReport& baseline) {
  auto column = [](const EvalReport& r, int which) {
    std::vector<double> xs;
    for (const auto& s : r.per_split) {
      xs.push_back(which == 0 ? s.precision : which == 1 ? s.recall : s.f);
    }
    return xs;
  };
  const char* names[3] = {"precision", "recall", "f"};
  for (int k = 0; k < 3; ++k) {
    report.wilcoxon[names[k]][baseline_name] =
        wilcoxon_signed_rank(column(report, k), column(baseline, k));
  }
}

inline nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["precision_median"] = report.precision_median;
  j["recall_median"] = report.recall_median;
  j["f_median"] = report.f_median;
  j["per_split"] = nlohmann::json::array();
  for (const auto& s : report.per_split) {
    j["per_split"].push_back({{"precision", s.precision},
                              {"recall", s.recall},
                              {"f", s.f},
                              {"n_estimators", s.n_estimators},
                              {"max_depth", s.max_depth}});
  }
  if (report.ranking) {
    j["ranking"] = {{"hits10", report.ranking->hits10},
                    {"hits100", report.ranking->hits100},
                    {"mean_rank", report.ranking->mean_rank},
                    {"auc", report.ranking->auc},
                    {"degenerate", report.ranking->degenerate}};
  } else {
    j["ranking"] = nullptr;
  }
  j["wilcoxon"] = nlohmann::json::object();
  for (const auto& [metric, baselines] : report.wilcoxon) {
    for (const auto& [name, p] : baselines) j["wilcoxon"][metric][name] = p;
  }
  return j;
}

}  // namespace truewalks
