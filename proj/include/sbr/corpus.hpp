#pragma once

#include <span>
#include <string>
#include <vector>

#include "sbr/types.hpp"

namespace sbr {

// Which columns of a delimited interaction log hold the session, item and
// time fields. With header=true the three names are matched against the
// header row; with header=false they must be 0-based column indices.
struct ColumnSpec {
  std::string session_column = "SessionId";
  std::string item_column = "ItemId";
  std::string time_column = "Time";
  char delimiter = ',';
  bool header = true;
};

// Parsed log with the dense-id remapping tables. item_originals[dense] and
// session_originals[dense] recover the identifiers found in the file.
struct EventLog {
  std::vector<Event> events;
  std::vector<std::int64_t> item_originals;
  std::vector<std::int64_t> session_originals;
};

// Reads one event per data row, in file order. Any unparseable row aborts
// with an error naming the line; rows are never silently dropped.
EventLog load_event_log(const std::string& path, const ColumnSpec& spec);

// Groups events by session, sorts each session by timestamp (stable) and
// orders sessions by end time.
SessionSet sessionize(std::span<const Event> events);

}  // namespace sbr
