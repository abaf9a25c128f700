#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbr {

inline constexpr const char* kVersion = "0.1.0";

// Dense, non-negative identifiers assigned at load time.
using ItemId = std::int32_t;
using SessionId = std::int32_t;

// Milliseconds since epoch. Input files carry (possibly fractional) seconds;
// anything finer than a millisecond is truncated on load.
using Timestamp = std::int64_t;

inline constexpr Timestamp kMillisPerSecond = 1000;
inline constexpr Timestamp kMillisPerDay = 86'400'000;

inline Timestamp day_of(Timestamp t) { return t / kMillisPerDay; }

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct Event {
  SessionId session = 0;
  ItemId item = 0;
  Timestamp time = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

// One user session: events sorted by timestamp, ties keeping input order.
struct Session {
  SessionId id = 0;
  std::vector<Event> events;

  std::size_t size() const { return events.size(); }
  Timestamp start_time() const { return events.front().time; }
  Timestamp end_time() const { return events.back().time; }
  ItemId last_item() const { return events.back().item; }

  friend bool operator==(const Session&, const Session&) = default;
};

// An ordered collection of sessions (end_time ascending, ties by session id)
// with the vocabulary of distinct items. Construct through build() so the
// ordering invariants always hold.
class SessionSet {
 public:
  SessionSet() = default;

  // Sorts each session's events (stable), orders sessions by end time and
  // computes the vocabulary.
  static SessionSet build(std::vector<Session> sessions);

  const std::vector<Session>& sessions() const { return sessions_; }
  const std::vector<ItemId>& vocabulary() const { return vocabulary_; }

  bool empty() const { return sessions_.empty(); }
  std::size_t size() const { return sessions_.size(); }
  std::size_t event_count() const { return event_count_; }

  // Earliest event time / latest event time across all sessions.
  Timestamp min_time() const { return min_time_; }
  Timestamp max_time() const { return max_time_; }

  // Number of calendar days covered (first event day .. last event day).
  int span_days() const;

  bool contains_item(ItemId item) const;

  friend bool operator==(const SessionSet&, const SessionSet&) = default;

 private:
  std::vector<Session> sessions_;
  std::vector<ItemId> vocabulary_;
  std::size_t event_count_ = 0;
  Timestamp min_time_ = 0;
  Timestamp max_time_ = 0;
};

}  // namespace sbr
