#include "sbr/metrics.hpp"

#include <algorithm>
#include <unordered_set>

namespace sbr {

namespace {

// Distinct items of events[from..], ascending.
std::vector<ItemId> distinct_suffix(const std::vector<Event>& events, std::size_t from) {
  std::vector<ItemId> items;
  items.reserve(events.size() - from);
  for (std::size_t i = from; i < events.size(); ++i) items.push_back(events[i].item);
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

}  // namespace

std::vector<PredictionEvent> enumerate_events(const SessionSet& test) {
  std::vector<PredictionEvent> events;
  for (const Session& s : test.sessions()) {
    if (s.events.size() < 2) {
      throw Error("test session " + std::to_string(s.id) +
                  " is shorter than 2 events");
    }
    for (std::size_t t = 1; t < s.events.size(); ++t) {
      PredictionEvent ev;
      ev.prefix.id = s.id;
      ev.prefix.events.assign(s.events.begin(), s.events.begin() + t);
      ev.next_item = s.events[t].item;
      ev.remaining = distinct_suffix(s.events, t);
      events.push_back(std::move(ev));
    }
  }
  return events;
}

EventScores score_event(const Recommendation& rec, const PredictionEvent& ev,
                        int cutoff) {
  EventScores scores;
  const auto k = static_cast<std::size_t>(cutoff);
  const std::size_t depth = std::min(rec.size(), k);
  const auto relevant = [&](ItemId item) {
    return std::binary_search(ev.remaining.begin(), ev.remaining.end(), item);
  };

  std::size_t inter = 0;
  double ap_sum = 0.0;
  for (std::size_t j = 0; j < depth; ++j) {
    if (rec[j].item == ev.next_item && scores.hit == 0) {
      scores.hit = 1.0;
      scores.reciprocal_rank = 1.0 / static_cast<double>(j + 1);
    }
    if (relevant(rec[j].item)) {
      ++inter;
      ap_sum += static_cast<double>(inter) / static_cast<double>(j + 1);
    }
  }
  scores.precision = static_cast<double>(inter) / static_cast<double>(k);
  scores.recall = static_cast<double>(inter) / static_cast<double>(ev.remaining.size());
  const auto ap_denom = std::min(k, ev.remaining.size());
  scores.average_precision = ap_sum / static_cast<double>(ap_denom);
  return scores;
}

MetricsReport evaluate(const Recommender& model, const SessionSet& test,
                       std::span<const int> cutoffs, std::size_t catalog_size,
                       const ItemStats& stats) {
  if (cutoffs.empty()) throw Error("no cut-offs given");
  int max_cutoff = 0;
  for (int c : cutoffs) {
    if (c < 1) throw Error("cut-offs must be >= 1");
    max_cutoff = std::max(max_cutoff, c);
  }

  struct Accumulator {
    double hit = 0, rr = 0, precision = 0, recall = 0, ap = 0;
    double pop_sum = 0;
    std::size_t slots = 0;
    std::unordered_set<ItemId> emitted;
  };
  std::map<int, Accumulator> acc;
  for (int c : cutoffs) acc.emplace(c, Accumulator{});

  std::size_t n_events = 0;
  for (const Session& s : test.sessions()) {
    if (s.events.size() < 2) {
      throw Error("test session " + std::to_string(s.id) +
                  " is shorter than 2 events");
    }
    PredictionEvent ev;
    ev.prefix.id = s.id;
    for (std::size_t t = 1; t < s.events.size(); ++t) {
      ev.prefix.events.assign(s.events.begin(), s.events.begin() + t);
      ev.next_item = s.events[t].item;
      ev.remaining = distinct_suffix(s.events, t);
      const Recommendation rec = model.predict(ev.prefix, max_cutoff);
      ++n_events;
      for (auto& [cutoff, a] : acc) {
        const EventScores es = score_event(rec, ev, cutoff);
        a.hit += es.hit;
        a.rr += es.reciprocal_rank;
        a.precision += es.precision;
        a.recall += es.recall;
        a.ap += es.average_precision;
        const std::size_t depth = std::min(rec.size(), static_cast<std::size_t>(cutoff));
        for (std::size_t j = 0; j < depth; ++j) {
          a.emitted.insert(rec[j].item);
          a.pop_sum += stats.normalized_popularity(rec[j].item);
          ++a.slots;
        }
      }
    }
  }
  if (n_events == 0) throw Error("no prediction events in the test set");

  MetricsReport report;
  report.event_count = n_events;
  const auto n = static_cast<double>(n_events);
  for (auto& [cutoff, a] : acc) {
    CutoffMetrics m;
    m.hit_rate = a.hit / n;
    m.mrr = a.rr / n;
    m.precision = a.precision / n;
    m.recall = a.recall / n;
    m.map = a.ap / n;
    m.coverage = catalog_size == 0
                     ? 0.0
                     : static_cast<double>(a.emitted.size()) /
                           static_cast<double>(catalog_size);
    m.popularity = a.slots == 0 ? 0.0 : a.pop_sum / static_cast<double>(a.slots);
    report.at.emplace(cutoff, m);
  }
  return report;
}

}  // namespace sbr
