#include "sbr/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_map>

namespace sbr {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::int64_t parse_id(std::string_view field, std::size_t line_no,
                      const std::string& what) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || value < 0) {
    throw Error("line " + std::to_string(line_no) + ": cannot parse " + what +
                " '" + std::string(field) + "' as a non-negative integer");
  }
  return value;
}

// Accepts integer or fractional seconds; truncates to whole milliseconds.
// Done digit-wise so large epoch values never round through a double.
Timestamp parse_time_ms(std::string_view field, std::size_t line_no) {
  const auto fail = [&]() -> Timestamp {
    throw Error("line " + std::to_string(line_no) + ": cannot parse time '" +
                std::string(field) + "' as seconds");
  };
  if (field.empty()) return fail();
  std::size_t dot = field.find('.');
  std::string_view whole = field.substr(0, dot);
  std::int64_t seconds = 0;
  auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), seconds);
  if (ec != std::errc{} || ptr != whole.data() + whole.size() || seconds < 0) {
    return fail();
  }
  std::int64_t millis = 0;
  if (dot != std::string_view::npos) {
    std::string_view frac = field.substr(dot + 1);
    if (frac.empty()) return fail();
    int scale = 100;
    for (std::size_t i = 0; i < frac.size(); ++i) {
      char c = frac[i];
      if (c < '0' || c > '9') return fail();
      if (i < 3) millis += (c - '0') * scale;
      scale /= 10;
    }
  }
  return seconds * kMillisPerSecond + millis;
}

class DenseIdMap {
 public:
  std::int32_t map(std::int64_t original) {
    auto [it, inserted] = index_.try_emplace(original, static_cast<std::int32_t>(originals_.size()));
    if (inserted) originals_.push_back(original);
    return it->second;
  }
  std::vector<std::int64_t> take() { return std::move(originals_); }

 private:
  std::unordered_map<std::int64_t, std::int32_t> index_;
  std::vector<std::int64_t> originals_;
};

}  // namespace

EventLog load_event_log(const std::string& path, const ColumnSpec& spec) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open event log: " + path);

  std::size_t session_col = 0, item_col = 0, time_col = 0;
  std::string line;
  std::size_t line_no = 0;

  if (spec.header) {
    if (!std::getline(in, line)) throw Error("empty file: " + path);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_fields(line, spec.delimiter);
    auto find_col = [&](const std::string& name) -> std::size_t {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == name) return i;
      }
      throw Error("column '" + name + "' not found in header of " + path);
    };
    session_col = find_col(spec.session_column);
    item_col = find_col(spec.item_column);
    time_col = find_col(spec.time_column);
  } else {
    auto parse_index = [&](const std::string& name) -> std::size_t {
      std::size_t idx = 0;
      auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), idx);
      if (ec != std::errc{} || ptr != name.data() + name.size()) {
        throw Error("without a header, column spec '" + name +
                    "' must be a 0-based column index");
      }
      return idx;
    };
    session_col = parse_index(spec.session_column);
    item_col = parse_index(spec.item_column);
    time_col = parse_index(spec.time_column);
  }

  const std::size_t needed = std::max({session_col, item_col, time_col}) + 1;

  EventLog log;
  DenseIdMap items;
  DenseIdMap sessions;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line, spec.delimiter);
    if (fields.size() < needed) {
      throw Error("line " + std::to_string(line_no) + ": expected at least " +
                  std::to_string(needed) + " fields, got " +
                  std::to_string(fields.size()));
    }
    Event ev;
    ev.session = sessions.map(parse_id(fields[session_col], line_no, "session id"));
    ev.item = items.map(parse_id(fields[item_col], line_no, "item id"));
    ev.time = parse_time_ms(fields[time_col], line_no);
    log.events.push_back(ev);
  }
  log.item_originals = items.take();
  log.session_originals = sessions.take();
  return log;
}

SessionSet sessionize(std::span<const Event> events) {
  std::unordered_map<SessionId, std::size_t> index;
  std::vector<Session> sessions;
  for (const Event& ev : events) {
    auto [it, inserted] = index.try_emplace(ev.session, sessions.size());
    if (inserted) sessions.push_back(Session{ev.session, {}});
    sessions[it->second].events.push_back(ev);
  }
  return SessionSet::build(std::move(sessions));
}

SessionSet SessionSet::build(std::vector<Session> sessions) {
  SessionSet set;
  for (Session& s : sessions) {
    if (s.events.empty()) throw Error("session " + std::to_string(s.id) + " has no events");
    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
  }
  std::sort(sessions.begin(), sessions.end(), [](const Session& a, const Session& b) {
    if (a.events.back().time != b.events.back().time) {
      return a.events.back().time < b.events.back().time;
    }
    return a.id < b.id;
  });

  std::vector<ItemId> vocab;
  std::size_t count = 0;
  for (const Session& s : sessions) {
    count += s.events.size();
    for (const Event& ev : s.events) vocab.push_back(ev.item);
  }
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());

  set.event_count_ = count;
  set.vocabulary_ = std::move(vocab);
  if (!sessions.empty()) {
    set.min_time_ = sessions.front().start_time();
    for (const Session& s : sessions) {
      set.min_time_ = std::min(set.min_time_, s.start_time());
    }
    set.max_time_ = sessions.back().end_time();
  }
  set.sessions_ = std::move(sessions);
  return set;
}

int SessionSet::span_days() const {
  if (sessions_.empty()) return 0;
  return static_cast<int>(day_of(max_time_) - day_of(min_time_)) + 1;
}

bool SessionSet::contains_item(ItemId item) const {
  return std::binary_search(vocabulary_.begin(), vocabulary_.end(), item);
}

}  // namespace sbr
