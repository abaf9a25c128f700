#pragma once

#include <span>
#include <vector>

#include "sbr/recommender.hpp"
#include "sbr/types.hpp"

namespace sbr {

enum class StabilityMode { kRetraining, kNoRetraining };

const char* stability_mode_name(StabilityMode mode);

struct DayMetrics {
  int day = 0;  // position in the day sequence, 0-based
  std::size_t events = 0;
  double hr20 = 0.0;
  double mrr20 = 0.0;
  bool empty = false;  // no prediction events after the vocabulary restriction
};

struct StabilityRun {
  StabilityMode mode = StabilityMode::kNoRetraining;
  std::vector<DayMetrics> days;
};

// Groups sessions into calendar-day buckets by end time, ascending.
std::vector<SessionSet> partition_by_day(const SessionSet& data);

// Day-by-day evaluation. In retraining mode the model scored on day i was
// fitted on initial_train plus all earlier days; in no-retraining mode every
// day uses the model fitted on initial_train alone. Test events are always
// restricted to the initial training vocabulary.
StabilityRun run_stability(Algorithm algorithm, const AlgoParams& params,
                           const SessionSet& initial_train,
                           std::span<const SessionSet> days, StabilityMode mode);

struct MetricDrop {
  double percent = 0.0;  // negative = degradation without retraining
  int days_used = 0;
  int days_excluded = 0;  // retraining value was 0 that day
};

struct DropReport {
  MetricDrop hr20;
  MetricDrop mrr20;
};

// Mean over days of (no_retraining - retraining) / retraining, in percent,
// per metric. Days where both runs are empty are skipped; days with a zero
// retraining value are excluded and counted.
DropReport relative_drop(const StabilityRun& retrain, const StabilityRun& noretrain);

}  // namespace sbr
