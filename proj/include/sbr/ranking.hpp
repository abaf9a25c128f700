#pragma once

#include <vector>

#include "sbr/types.hpp"

namespace sbr {

struct ScoredItem {
  ItemId item = 0;
  double score = 0.0;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

// Ranked, duplicate-free item list; scores non-increasing, ties by
// ascending item id.
using Recommendation = std::vector<ScoredItem>;

// Keeps items with score > 0, orders by (score desc, item asc) and truncates
// to k entries. The shared tie rule of every predictor.
Recommendation rank_topk(std::vector<ScoredItem> scores, int k);

}  // namespace sbr
