#include "sbr/preprocess.hpp"

#include <algorithm>
#include <unordered_map>

#include "sbr/rng.hpp"

namespace sbr {

void SplitSpec::validate() const {
  if (n_slices < 1) throw Error("n_slices must be >= 1");
  if (test_days < 1) throw Error("test_days must be >= 1");
  if (min_item_support < 1) throw Error("min_item_support must be >= 1");
  if (min_session_length < 2) throw Error("min_session_length must be >= 2");
}

namespace {

SessionSet filter_once(const SessionSet& data, const SplitSpec& spec) {
  std::unordered_map<ItemId, std::int64_t> support;
  for (const Session& s : data.sessions()) {
    for (const Event& ev : s.events) ++support[ev.item];
  }
  std::vector<Session> kept;
  for (const Session& s : data.sessions()) {
    Session out{s.id, {}};
    for (const Event& ev : s.events) {
      if (support[ev.item] >= spec.min_item_support) out.events.push_back(ev);
    }
    if (out.events.size() >= static_cast<std::size_t>(spec.min_session_length)) {
      kept.push_back(std::move(out));
    }
  }
  return SessionSet::build(std::move(kept));
}

}  // namespace

SessionSet filter_dataset(const SessionSet& data, const SplitSpec& spec) {
  spec.validate();
  SessionSet result = filter_once(data, spec);
  if (spec.filter_to_fixpoint) {
    while (true) {
      SessionSet next = filter_once(result, spec);
      if (next.event_count() == result.event_count()) break;
      result = std::move(next);
    }
  }
  if (result.empty()) throw Error("dataset is empty after filtering");
  return result;
}

SessionSet synthesize_timestamps(const SessionSet& data, std::uint64_t seed,
                                 int span_days,
                                 const std::optional<SplitSpec>& spec) {
  if (span_days < 1) throw Error("span_days must be >= 1");
  if (spec) {
    spec->validate();
    const long needed = static_cast<long>(spec->n_slices) * (spec->test_days + 1);
    if (span_days < needed) {
      throw Error("span of " + std::to_string(span_days) +
                  " days is too small for " + std::to_string(spec->n_slices) +
                  " slices with " + std::to_string(spec->test_days) + " test days");
    }
  }
  Rng rng(seed);
  std::vector<Session> sessions = data.sessions();
  for (Session& s : sessions) {
    const Timestamp start = static_cast<Timestamp>(
        rng.uniform_below(static_cast<std::uint64_t>(span_days) * kMillisPerDay));
    for (std::size_t i = 0; i < s.events.size(); ++i) {
      s.events[i].time = start + static_cast<Timestamp>(i) * kMillisPerSecond;
    }
  }
  return SessionSet::build(std::move(sessions));
}

std::vector<SessionSet> make_slices(const SessionSet& data, const SplitSpec& spec) {
  spec.validate();
  const long needed = static_cast<long>(spec.n_slices) * (spec.test_days + 1);
  if (data.span_days() < needed) {
    throw Error("data spans " + std::to_string(data.span_days()) +
                " days; need at least " + std::to_string(needed) + " for " +
                std::to_string(spec.n_slices) + " slices with " +
                std::to_string(spec.test_days) + " test days");
  }
  const Timestamp begin = day_of(data.min_time()) * kMillisPerDay;
  const Timestamp end = (day_of(data.max_time()) + 1) * kMillisPerDay;
  const Timestamp width = (end - begin) / spec.n_slices;

  std::vector<std::vector<Session>> buckets(spec.n_slices);
  for (const Session& s : data.sessions()) {
    auto idx = static_cast<std::size_t>((s.end_time() - begin) / width);
    if (idx >= buckets.size()) idx = buckets.size() - 1;
    buckets[idx].push_back(s);
  }
  std::vector<SessionSet> slices;
  slices.reserve(buckets.size());
  for (auto& bucket : buckets) slices.push_back(SessionSet::build(std::move(bucket)));
  return slices;
}

TrainTestSplit split_slice(const SessionSet& slice, const SplitSpec& spec) {
  spec.validate();
  if (slice.empty()) throw Error("cannot split an empty slice");
  const Timestamp last_day = day_of(slice.max_time());
  const Timestamp boundary = (last_day - spec.test_days + 1) * kMillisPerDay;

  std::vector<Session> train, test;
  for (const Session& s : slice.sessions()) {
    (s.end_time() < boundary ? train : test).push_back(s);
  }
  if (train.empty()) {
    throw Error("empty training set: every session ends within the last " +
                std::to_string(spec.test_days) + " test days");
  }
  if (test.empty()) throw Error("empty test set after the time split");
  return TrainTestSplit{SessionSet::build(std::move(train)),
                        SessionSet::build(std::move(test)), boundary};
}

TrainTestSplit restrict_test_to_known_items(TrainTestSplit split,
                                            int min_session_length) {
  std::vector<Session> kept;
  for (const Session& s : split.test.sessions()) {
    Session out{s.id, {}};
    for (const Event& ev : s.events) {
      if (split.train.contains_item(ev.item)) out.events.push_back(ev);
    }
    if (out.events.size() >= static_cast<std::size_t>(min_session_length)) {
      kept.push_back(std::move(out));
    }
  }
  if (kept.empty()) {
    throw Error("empty test set after restricting to items known from training");
  }
  split.test = SessionSet::build(std::move(kept));
  return split;
}

}  // namespace sbr
