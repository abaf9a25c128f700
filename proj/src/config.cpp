#include "sbr/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace sbr {

namespace {

using nlohmann::json;

void expect_keys(const json& obj, const std::string& where,
                 const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw Error("unknown key '" + key + "' in " + where);
    }
  }
}

std::string param_to_string(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
  if (value.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", value.get<double>());
    return buf;
  }
  throw Error("parameter values must be scalars");
}

}  // namespace

void ExperimentConfig::validate() const {
  split.validate();
  if (algorithms.empty()) throw Error("config lists no algorithms");
  if (cutoffs.empty()) throw Error("config lists no cutoffs");
  for (int c : cutoffs) {
    if (c < 1) throw Error("cutoffs must be >= 1");
  }
  if (stages.evaluate || stages.tune || stages.stability || stages.bench) {
    if (dataset.path.empty()) throw Error("dataset.path is required");
  }
  if (stages.tune && tuning.n_iter < 1) throw Error("tuning.n_iter must be >= 1");
  if (stages.stability &&
      (stability.slice < 0 || stability.slice >= split.n_slices)) {
    throw Error("stability.slice out of range");
  }
  if (stages.bench && bench.sample_limit < 1) {
    throw Error("bench.sample_limit must be >= 1");
  }
  if (output_dir.empty()) throw Error("output_dir is required");
  for (const AlgorithmConfig& algo : algorithms) {
    resolve_params(algo.algorithm, algo.params);  // throws on bad params
  }
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json root = json::parse(json_text);
  ExperimentConfig cfg;

  expect_keys(root, "config",
              {"dataset", "split", "algorithms", "cutoffs", "seed", "stages",
               "tuning", "stability", "bench", "output_dir"});

  if (!root.contains("dataset")) throw Error("config needs a 'dataset' section");
  {
    const json& d = root["dataset"];
    expect_keys(d, "dataset",
                {"name", "path", "session_column", "item_column", "time_column",
                 "delimiter", "header", "synthesize_timestamps", "synthetic_span_days"});
    cfg.dataset.name = d.value("name", cfg.dataset.name);
    cfg.dataset.path = d.value("path", std::string{});
    cfg.dataset.columns.session_column =
        d.value("session_column", cfg.dataset.columns.session_column);
    cfg.dataset.columns.item_column =
        d.value("item_column", cfg.dataset.columns.item_column);
    cfg.dataset.columns.time_column =
        d.value("time_column", cfg.dataset.columns.time_column);
    const std::string delim = d.value("delimiter", std::string(1, ','));
    if (delim == "\\t" || delim == "tab") {
      cfg.dataset.columns.delimiter = '\t';
    } else if (delim.size() == 1) {
      cfg.dataset.columns.delimiter = delim[0];
    } else {
      throw Error("dataset.delimiter must be a single character or 'tab'");
    }
    cfg.dataset.columns.header = d.value("header", true);
    cfg.synthetic_timestamps.enabled = d.value("synthesize_timestamps", false);
    cfg.synthetic_timestamps.span_days =
        d.value("synthetic_span_days", cfg.synthetic_timestamps.span_days);
  }

  if (root.contains("split")) {
    const json& s = root["split"];
    expect_keys(s, "split",
                {"n_slices", "test_days", "min_item_support", "min_session_length",
                 "filter_to_fixpoint"});
    cfg.split.n_slices = s.value("n_slices", cfg.split.n_slices);
    cfg.split.test_days = s.value("test_days", cfg.split.test_days);
    cfg.split.min_item_support = s.value("min_item_support", cfg.split.min_item_support);
    cfg.split.min_session_length =
        s.value("min_session_length", cfg.split.min_session_length);
    cfg.split.filter_to_fixpoint =
        s.value("filter_to_fixpoint", cfg.split.filter_to_fixpoint);
  }

  if (!root.contains("algorithms")) throw Error("config needs an 'algorithms' list");
  for (const json& a : root["algorithms"]) {
    expect_keys(a, "algorithms[]", {"name", "params", "tune"});
    AlgorithmConfig algo;
    if (!a.contains("name")) throw Error("every algorithm entry needs a name");
    algo.algorithm = algorithm_from_name(a["name"].get<std::string>());
    if (a.contains("params")) {
      for (const auto& [key, value] : a["params"].items()) {
        algo.params.emplace_back(key, param_to_string(value));
      }
    }
    algo.tune = a.value("tune", false);
    cfg.algorithms.push_back(std::move(algo));
  }

  if (root.contains("cutoffs")) {
    cfg.cutoffs = root["cutoffs"].get<std::vector<int>>();
  }
  cfg.seed = root.value("seed", cfg.seed);

  if (root.contains("stages")) {
    const json& s = root["stages"];
    expect_keys(s, "stages", {"evaluate", "tune", "stability", "bench"});
    cfg.stages.evaluate = s.value("evaluate", cfg.stages.evaluate);
    cfg.stages.tune = s.value("tune", cfg.stages.tune);
    cfg.stages.stability = s.value("stability", cfg.stages.stability);
    cfg.stages.bench = s.value("bench", cfg.stages.bench);
  }
  if (root.contains("tuning")) {
    const json& t = root["tuning"];
    expect_keys(t, "tuning", {"n_iter"});
    cfg.tuning.n_iter = t.value("n_iter", cfg.tuning.n_iter);
  }
  if (root.contains("stability")) {
    const json& s = root["stability"];
    expect_keys(s, "stability", {"slice"});
    cfg.stability.slice = s.value("slice", cfg.stability.slice);
  }
  if (root.contains("bench")) {
    const json& b = root["bench"];
    expect_keys(b, "bench", {"sample_limit"});
    cfg.bench.sample_limit = b.value("sample_limit", cfg.bench.sample_limit);
  }
  cfg.output_dir = root.value("output_dir", cfg.output_dir);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return parse_experiment_config(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config " + path + ": " + e.what());
  }
}

}  // namespace sbr
