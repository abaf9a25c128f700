#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sbr/config.hpp"
#include "sbr/types.hpp"

namespace sbr {

// The pinned scoring and protocol formulas, as recorded in every result
// directory, plus a stable fingerprint over them. Results are only
// comparable when the fingerprints match.
const std::map<std::string, std::string>& formula_decisions();
std::string formula_fingerprint();

// Error with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error("[stage:" + stage + "] " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct ExperimentResult {
  std::filesystem::path output_dir;
  int slices = 0;
};

// Runs the configured stages per slice and algorithm and writes the result
// files (summary.csv, details.csv, metadata.json and per-stage outputs).
// Output is byte-for-byte reproducible under a fixed seed, except for the
// wall-clock columns written by the tune and bench stages.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace sbr
