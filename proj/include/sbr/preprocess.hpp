#pragma once

#include <optional>
#include <vector>

#include "sbr/types.hpp"

namespace sbr {

// Filtering and temporal-splitting parameters.
struct SplitSpec {
  int n_slices = 5;
  int test_days = 1;
  int min_item_support = 5;
  int min_session_length = 2;
  // Re-apply the two-pass filter until nothing changes instead of the
  // default single sweep.
  bool filter_to_fixpoint = false;

  void validate() const;
};

struct TrainTestSplit {
  SessionSet train;
  SessionSet test;
  // Train sessions end strictly before this time, test sessions at or after.
  Timestamp boundary_time = 0;
};

// Two-pass sweep: drop every event whose item occurs fewer than
// min_item_support times across the whole input, then drop sessions left
// with fewer than min_session_length events. Repeated items in a session are
// kept. Throws when the result is empty.
SessionSet filter_dataset(const SessionSet& data, const SplitSpec& spec);

// Assigns every session a start time drawn uniformly over span_days and
// spaces its events one second apart, for logs without usable timestamps.
// When a SplitSpec is given, checks that the span can accommodate it.
SessionSet synthesize_timestamps(const SessionSet& data, std::uint64_t seed,
                                 int span_days,
                                 const std::optional<SplitSpec>& spec = std::nullopt);

// Partitions the covered time span into n_slices windows of equal calendar
// length; a session belongs to the window containing its end time.
std::vector<SessionSet> make_slices(const SessionSet& data, const SplitSpec& spec);

// The last test_days calendar days of the slice become the test set.
TrainTestSplit split_slice(const SessionSet& slice, const SplitSpec& spec);

// Removes test events whose item never occurs in the training data, then
// test sessions that fell below min_session_length.
TrainTestSplit restrict_test_to_known_items(TrainTestSplit split,
                                            int min_session_length = 2);

}  // namespace sbr
