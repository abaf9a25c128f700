#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbr/corpus.hpp"
#include "sbr/preprocess.hpp"
#include "sbr/recommender.hpp"

namespace sbr {

struct DatasetConfig {
  std::string name = "dataset";
  std::string path;
  ColumnSpec columns;
};

struct SyntheticTimestampsConfig {
  bool enabled = false;  // for logs without usable timestamps
  int span_days = 90;
};

struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::kAr;
  ParamAssignment params;  // fixed values; tuned values replace them
  bool tune = false;
};

struct StagesConfig {
  bool evaluate = true;
  bool tune = false;
  bool stability = false;
  bool bench = false;
};

struct TuningConfig {
  int n_iter = 100;
};

struct StabilityConfig {
  int slice = 0;  // which slice's split drives the day-by-day protocol
};

struct BenchConfig {
  std::size_t sample_limit = 1000;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  SplitSpec split;
  SyntheticTimestampsConfig synthetic_timestamps;
  std::vector<AlgorithmConfig> algorithms;
  std::vector<int> cutoffs{5, 10, 20};
  std::uint64_t seed = 42;
  StagesConfig stages;
  TuningConfig tuning;
  StabilityConfig stability;
  BenchConfig bench;
  std::string output_dir = "results";

  void validate() const;
};

// Reads a JSON experiment configuration. Unknown keys are rejected so typos
// never silently fall back to defaults.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

}  // namespace sbr
