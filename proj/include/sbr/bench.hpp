#pragma once

#include <memory>
#include <string>

#include "sbr/recommender.hpp"
#include "sbr/types.hpp"

namespace sbr {

struct TimingReport {
  double train_seconds = 0.0;
  double predict_ms_mean = 0.0;
  double predict_ms_median = 0.0;
  double predict_ms_p95 = 0.0;
  std::size_t prediction_count = 0;
  std::string hardware;
};

struct TimedFit {
  std::unique_ptr<Recommender> model;
  double seconds = 0.0;
};

// Wall clock around the fit call only (monotonic clock).
TimedFit time_training(Algorithm algorithm, const AlgoParams& params,
                       const SessionSet& train);

// Per-call latency over up to sample_limit prediction events. The first
// `warmup` predictions run unmeasured when enough events remain to fill the
// sample afterwards.
TimingReport time_prediction(const Recommender& model, const SessionSet& test,
                             std::size_t sample_limit, int k = 20,
                             std::size_t warmup = 100);

// Free-text CPU descriptor for timing reports.
std::string hardware_descriptor();

}  // namespace sbr
