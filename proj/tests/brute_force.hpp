#pragma once

// Exhaustive reference scorer for the neighborhood predictors. Implements the
// pinned formulas directly on the SessionSet: no inverted index, no sampling
// shortcuts, no shared ItemStats. Kept test-only so the implementation under
// test cannot leak into its own oracle.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "sbr/knn.hpp"
#include "sbr/ranking.hpp"
#include "sbr/types.hpp"

namespace sbr::test {

enum class KnnVariant { kSknn, kVsknn, kStan, kVstan };

inline Recommendation brute_force_predict(const SessionSet& train,
                                          const Session& prefix, KnnVariant variant,
                                          const KnnConfig& cfg, int k, Timestamp now) {
  // variant semantics
  PositionWeighting weighting = cfg.weighting;
  if (variant == KnnVariant::kSknn) weighting = PositionWeighting::kConstant;
  if (variant == KnnVariant::kStan) weighting = PositionWeighting::kExponential;
  const bool use_recency = (variant == KnnVariant::kStan || variant == KnnVariant::kVstan) &&
                           std::isfinite(cfg.lambda_recency_days);
  const bool use_gap = (variant == KnnVariant::kStan || variant == KnnVariant::kVstan) &&
                       std::isfinite(cfg.lambda_neighbor_pos);
  const bool use_idf = (variant == KnnVariant::kVsknn || variant == KnnVariant::kVstan) &&
                       cfg.idf_enabled;

  // current-session profile: last 1-based position per distinct item
  std::map<ItemId, int> prefix_pos;
  for (std::size_t i = 0; i < prefix.events.size(); ++i) {
    prefix_pos[prefix.events[i].item] = static_cast<int>(i + 1);
  }
  const double prefix_length = static_cast<double>(prefix.events.size());
  const double prefix_distinct = static_cast<double>(prefix_pos.size());

  const auto item_weight = [&](int pos) {
    switch (weighting) {
      case PositionWeighting::kConstant:
        return 1.0;
      case PositionWeighting::kLinear:
        return static_cast<double>(pos) / prefix_length;
      case PositionWeighting::kExponential:
        return std::exp((static_cast<double>(pos) - prefix_length) /
                        cfg.lambda_position);
    }
    return 1.0;
  };

  struct Candidate {
    const Session* session;
    std::set<ItemId> items;
    std::map<ItemId, int> positions;
    double similarity;
  };

  // candidate pool: every session sharing an item, most recent first
  std::vector<Candidate> pool;
  for (const Session& s : train.sessions()) {
    Candidate c;
    c.session = &s;
    for (std::size_t i = 0; i < s.events.size(); ++i) {
      c.items.insert(s.events[i].item);
      c.positions[s.events[i].item] = static_cast<int>(i + 1);
    }
    bool shares = false;
    for (const auto& [item, pos] : prefix_pos) {
      if (c.items.count(item)) shares = true;
    }
    if (shares) pool.push_back(std::move(c));
  }
  std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    if (a.session->end_time() != b.session->end_time()) {
      return a.session->end_time() > b.session->end_time();
    }
    return a.session->id > b.session->id;  // matches the index recency order
  });
  if (pool.size() > cfg.sample_size) pool.resize(cfg.sample_size);

  // similarity per candidate
  std::vector<Candidate> neighbors;
  for (Candidate& c : pool) {
    double overlap = 0.0;
    for (const auto& [item, pos] : prefix_pos) {
      if (c.items.count(item)) overlap += item_weight(pos);
    }
    double sim = overlap;
    if (cfg.similarity == Similarity::kCosine) {
      sim /= std::sqrt(prefix_distinct * static_cast<double>(c.items.size()));
    }
    if (use_recency) {
      const double age_days =
          static_cast<double>(std::max<Timestamp>(0, now - c.session->end_time())) /
          static_cast<double>(kMillisPerDay);
      sim *= std::exp(-age_days / cfg.lambda_recency_days);
    }
    if (sim > 0.0) {
      c.similarity = sim;
      neighbors.push_back(std::move(c));
    }
  }
  std::sort(neighbors.begin(), neighbors.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.similarity != b.similarity) return a.similarity > b.similarity;
              if (a.session->end_time() != b.session->end_time()) {
                return a.session->end_time() > b.session->end_time();
              }
              return a.session->id < b.session->id;
            });
  if (neighbors.size() > cfg.k_neighbors) neighbors.resize(cfg.k_neighbors);

  // item scores
  const ItemId anchor = prefix.events.back().item;
  std::map<ItemId, double> scores;
  for (const Candidate& c : neighbors) {
    const auto anchor_it = c.positions.find(anchor);
    const bool anchored = use_gap && anchor_it != c.positions.end();
    for (const auto& [item, pos] : c.positions) {
      double f = 1.0;
      if (anchored) {
        f = std::exp(-std::abs(static_cast<double>(pos) -
                               static_cast<double>(anchor_it->second)) /
                     cfg.lambda_neighbor_pos);
      }
      scores[item] += c.similarity * f;
    }
  }

  if (use_idf) {
    const double n_sessions = static_cast<double>(train.size());
    for (auto& [item, score] : scores) {
      std::int64_t containing = 0;
      for (const Session& s : train.sessions()) {
        for (const Event& ev : s.events) {
          if (ev.item == item) {
            ++containing;
            break;
          }
        }
      }
      score *= std::log(n_sessions / static_cast<double>(containing));
    }
  }

  // rank: score desc, item asc, keep positive scores, truncate at k
  std::vector<ScoredItem> ranked;
  for (const auto& [item, score] : scores) {
    if (score > 0.0) ranked.push_back({item, score});
  }
  std::sort(ranked.begin(), ranked.end(), [](const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  });
  if (ranked.size() > static_cast<std::size_t>(k)) {
    ranked.resize(static_cast<std::size_t>(k));
  }
  return ranked;
}

inline Recommendation run_variant(const NeighborIndex& index, const Session& prefix,
                                  KnnVariant variant, const KnnConfig& cfg, int k,
                                  Timestamp now) {
  switch (variant) {
    case KnnVariant::kSknn:
      return predict_sknn(index, prefix, cfg, k);
    case KnnVariant::kVsknn:
      return predict_vsknn(index, prefix, cfg, k);
    case KnnVariant::kStan:
      return predict_stan(index, prefix, cfg, k, now);
    case KnnVariant::kVstan:
      return predict_vstan(index, prefix, cfg, k, now);
  }
  return {};
}

}  // namespace sbr::test
