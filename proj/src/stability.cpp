#include "sbr/stability.hpp"

#include <algorithm>
#include <map>

#include "sbr/metrics.hpp"

namespace sbr {

const char* stability_mode_name(StabilityMode mode) {
  return mode == StabilityMode::kRetraining ? "retraining" : "no_retraining";
}

std::vector<SessionSet> partition_by_day(const SessionSet& data) {
  std::map<Timestamp, std::vector<Session>> buckets;
  for (const Session& s : data.sessions()) {
    buckets[day_of(s.end_time())].push_back(s);
  }
  std::vector<SessionSet> days;
  days.reserve(buckets.size());
  for (auto& [day, sessions] : buckets) {
    days.push_back(SessionSet::build(std::move(sessions)));
  }
  return days;
}

namespace {

// Keeps only events whose item occurs in the reference vocabulary, dropping
// sessions that fall below two events.
SessionSet restrict_to_vocabulary(const SessionSet& data, const SessionSet& reference) {
  std::vector<Session> kept;
  for (const Session& s : data.sessions()) {
    Session out{s.id, {}};
    for (const Event& ev : s.events) {
      if (reference.contains_item(ev.item)) out.events.push_back(ev);
    }
    if (out.events.size() >= 2) kept.push_back(std::move(out));
  }
  return SessionSet::build(std::move(kept));
}

}  // namespace

StabilityRun run_stability(Algorithm algorithm, const AlgoParams& params,
                           const SessionSet& initial_train,
                           std::span<const SessionSet> days, StabilityMode mode) {
  if (days.size() < 2) throw Error("stability needs at least two test days");
  if (initial_train.empty()) throw Error("stability needs a non-empty training set");

  const ItemStats stats = ItemStats::compute(initial_train);
  const std::size_t catalog = initial_train.vocabulary().size();
  const int cutoffs[] = {20};

  StabilityRun run;
  run.mode = mode;

  std::unique_ptr<Recommender> model = fit_recommender(algorithm, params, initial_train);
  std::vector<Session> accumulated = initial_train.sessions();

  for (std::size_t i = 0; i < days.size(); ++i) {
    if (mode == StabilityMode::kRetraining && i > 0) {
      // extend the training data by the previous day and refit
      const auto& previous = days[i - 1].sessions();
      accumulated.insert(accumulated.end(), previous.begin(), previous.end());
      model = fit_recommender(algorithm, params,
                              SessionSet::build(std::vector<Session>(accumulated)));
    }
    DayMetrics day;
    day.day = static_cast<int>(i);
    const SessionSet restricted = restrict_to_vocabulary(days[i], initial_train);
    if (restricted.empty()) {
      day.empty = true;
    } else {
      const MetricsReport report = evaluate(*model, restricted, cutoffs, catalog, stats);
      day.events = report.event_count;
      day.hr20 = report.at.at(20).hit_rate;
      day.mrr20 = report.at.at(20).mrr;
    }
    run.days.push_back(day);
  }
  return run;
}

namespace {

MetricDrop drop_for(const StabilityRun& retrain, const StabilityRun& noretrain,
                    double DayMetrics::*metric) {
  MetricDrop drop;
  double sum = 0.0;
  for (std::size_t i = 0; i < retrain.days.size(); ++i) {
    const DayMetrics& r = retrain.days[i];
    const DayMetrics& n = noretrain.days[i];
    if (r.empty || n.empty) continue;
    if (r.*metric == 0.0) {
      ++drop.days_excluded;
      continue;
    }
    sum += (n.*metric - r.*metric) / (r.*metric) * 100.0;
    ++drop.days_used;
  }
  drop.percent = drop.days_used == 0 ? 0.0 : sum / drop.days_used;
  return drop;
}

}  // namespace

DropReport relative_drop(const StabilityRun& retrain, const StabilityRun& noretrain) {
  if (retrain.days.size() != noretrain.days.size() || retrain.days.empty()) {
    throw Error("stability runs must cover the same non-empty day sequence");
  }
  DropReport report;
  report.hr20 = drop_for(retrain, noretrain, &DayMetrics::hr20);
  report.mrr20 = drop_for(retrain, noretrain, &DayMetrics::mrr20);
  return report;
}

}  // namespace sbr
