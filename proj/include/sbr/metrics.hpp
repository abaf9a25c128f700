#pragma once

#include <map>
#include <span>
#include <vector>

#include "sbr/knn.hpp"
#include "sbr/ranking.hpp"
#include "sbr/recommender.hpp"
#include "sbr/types.hpp"

namespace sbr {

// One step of the incremental-reveal protocol: everything revealed so far,
// the immediate next item, and the distinct items still to come.
struct PredictionEvent {
  Session prefix;
  ItemId next_item = 0;
  std::vector<ItemId> remaining;  // distinct, ascending; contains next_item
};

// For each test session of length L, the prediction events for prefix
// lengths 1..L-1, in order.
std::vector<PredictionEvent> enumerate_events(const SessionSet& test);

struct EventScores {
  double hit = 0;
  double reciprocal_rank = 0;
  double precision = 0;
  double recall = 0;
  double average_precision = 0;
};

// Scores one ranked list against one prediction event at the given cut-off.
EventScores score_event(const Recommendation& rec, const PredictionEvent& ev,
                        int cutoff);

struct CutoffMetrics {
  double hit_rate = 0;
  double mrr = 0;
  double precision = 0;
  double recall = 0;
  double map = 0;
  double coverage = 0;
  double popularity = 0;
};

struct MetricsReport {
  std::map<int, CutoffMetrics> at;  // by cut-off
  std::size_t event_count = 0;
};

// Runs the incremental-reveal protocol over the test set. catalog_size is
// the training vocabulary size (coverage denominator); stats supplies the
// normalized popularity of emitted items.
MetricsReport evaluate(const Recommender& model, const SessionSet& test,
                       std::span<const int> cutoffs, std::size_t catalog_size,
                       const ItemStats& stats);

}  // namespace sbr
