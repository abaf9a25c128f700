#include "sbr/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "sbr/bench.hpp"
#include "sbr/metrics.hpp"
#include "sbr/rng.hpp"
#include "sbr/stability.hpp"
#include "sbr/tuning.hpp"

namespace sbr {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double value, const char* format = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

std::string join_params(const ParamAssignment& params) {
  std::string out;
  for (const auto& [key, value] : params) {
    if (!out.empty()) out += ';';
    out += key + '=' + value;
  }
  return out;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << header << '\n';
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

struct DetailRow {
  int slice = 0;
  int algo_index = 0;  // position in the config's algorithm list
  std::string algorithm;
  std::string params;
  int cutoff = 0;
  std::size_t events = 0;
  CutoffMetrics metrics;
  std::optional<TimingReport> timing;
};

struct StabilityRowGroup {
  std::string algorithm;
  StabilityRun retrain;
  StabilityRun noretrain;
  DropReport drops;
};

}  // namespace

const std::map<std::string, std::string>& formula_decisions() {
  static const std::map<std::string, std::string> decisions{
      {"ar_counting",
       "every position pair of distinct items in a session adds 1 to both directions"},
      {"sr_decay", "weight(i->j) += 1/distance for ordered position pairs; "
                   "'step' option counts adjacent pairs only"},
      {"session_similarity",
       "sum of current-session weights over shared items, divided by "
       "sqrt(|prefix distinct| * |neighbor distinct|) for cosine; dot skips the "
       "normalization; repeated items use their last occurrence position"},
      {"session_weighting",
       "constant w=1; linear w=p/L; exponential w=exp((p-L)/lambda_position), "
       "p = 1-based last position, L = prefix length"},
      {"recency_factor",
       "similarity *= exp(-max(0, now - neighbor_end)/lambda_recency_days), ages in "
       "days, now = last revealed prefix event"},
      {"neighbor_position_factor",
       "per item contribution *= exp(-|item_pos - anchor_pos|/lambda_neighbor_pos) "
       "using last occurrences; factor 1 when the anchor item is absent"},
      {"idf", "ln(training sessions / sessions containing the item); applied as a "
              "per-item score multiplier when enabled"},
      {"tie_breaking", "items: score desc then item id asc; neighbor sessions: "
                       "similarity desc, end time desc, session id asc"},
      {"prefix_items", "items already seen in the prefix stay recommendable"},
      {"remaining_items", "distinct items of the unrevealed rest of the session"},
      {"map_denominator", "min(cutoff, |remaining items|)"},
      {"precision_denominator", "always the cutoff, even for shorter lists"},
      {"popularity_normalization",
       "min-max over training occurrence counts; all-equal counts give 0"},
      {"popularity_metric", "mean normalized popularity over emitted list slots"},
      {"coverage_metric", "distinct emitted items / training vocabulary size"},
      {"filter_rule", "single two-pass sweep applied globally before slicing: "
                      "event-count item support, then session length; optional "
                      "fixpoint iteration off by default"},
      {"slice_rule", "equal calendar-length windows over whole days; sessions "
                     "belong to the window containing their end time"},
      {"test_split_rule", "test = sessions ending within the last test_days "
                          "calendar days of the slice"},
      {"validation_split", "last test_days calendar days of the training data"},
      {"stability_drop",
       "mean over days of per-day percentage change (no_retraining vs retraining)"},
      {"timestamp_precision", "file seconds truncated to whole milliseconds"},
      {"synthesized_timestamps",
       "uniform session starts over the span, events one second apart"},
      {"latency_warmup", "first 100 predictions excluded when enough events remain"},
      {"tuning_inf_sentinel",
       "log-uniform decay parameters draw 'inf' with probability 0.2"},
  };
  return decisions;
}

std::string formula_fingerprint() {
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&h](const std::string& s) {
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    h ^= 0x1f;
    h *= 1099511628211ull;
  };
  for (const auto& [key, value] : formula_decisions()) {
    mix(key);
    mix(value);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void write_metadata(const ExperimentConfig& config, const fs::path& dir) {
  json meta;
  meta["version"] = kVersion;
  meta["seed"] = config.seed;
  meta["dataset"] = {{"name", config.dataset.name},
                     {"path", config.dataset.path},
                     {"session_column", config.dataset.columns.session_column},
                     {"item_column", config.dataset.columns.item_column},
                     {"time_column", config.dataset.columns.time_column},
                     {"header", config.dataset.columns.header},
                     {"delimiter", std::string(1, config.dataset.columns.delimiter)},
                     {"synthesize_timestamps", config.synthetic_timestamps.enabled},
                     {"synthetic_span_days", config.synthetic_timestamps.span_days}};
  meta["split"] = {{"n_slices", config.split.n_slices},
                   {"test_days", config.split.test_days},
                   {"min_item_support", config.split.min_item_support},
                   {"min_session_length", config.split.min_session_length},
                   {"filter_to_fixpoint", config.split.filter_to_fixpoint}};
  meta["cutoffs"] = config.cutoffs;
  meta["stages"] = {{"evaluate", config.stages.evaluate},
                    {"tune", config.stages.tune},
                    {"stability", config.stages.stability},
                    {"bench", config.stages.bench}};
  json algos = json::array();
  for (const AlgorithmConfig& algo : config.algorithms) {
    json a;
    a["name"] = algorithm_name(algo.algorithm);
    a["tune"] = algo.tune;
    a["params"] = join_params(algo.params);
    if (algo.tune) {
      json space = json::array();
      for (const ParamSpec& spec : default_param_space(algo.algorithm)) {
        json p;
        p["name"] = spec.name;
        switch (spec.kind) {
          case ParamKind::kCategorical:
            p["kind"] = "categorical";
            p["choices"] = spec.choices;
            break;
          case ParamKind::kIntRange:
            p["kind"] = "int_range";
            p["lo"] = spec.int_lo;
            p["hi"] = spec.int_hi;
            break;
          case ParamKind::kLogUniform:
            p["kind"] = "log_uniform";
            p["lo"] = spec.real_lo;
            p["hi"] = spec.real_hi;
            p["inf_probability"] = spec.inf_probability;
            break;
        }
        space.push_back(p);
      }
      a["search_space"] = space;
    }
    algos.push_back(a);
  }
  meta["algorithms"] = algos;
  meta["formulas"] = formula_decisions();
  meta["formula_fingerprint"] = formula_fingerprint();

  std::ofstream out(dir / "metadata.json");
  if (!out) throw Error("cannot write metadata.json");
  out << meta.dump(2) << '\n';
}

void write_id_map(const fs::path& path, const std::vector<std::int64_t>& originals) {
  CsvWriter csv(path, "dense,original");
  for (std::size_t i = 0; i < originals.size(); ++i) {
    csv.row({std::to_string(i), std::to_string(originals[i])});
  }
}

std::vector<std::string> metric_fields(const CutoffMetrics& m) {
  return {fmt(m.hit_rate), fmt(m.mrr),      fmt(m.precision), fmt(m.recall),
          fmt(m.map),      fmt(m.coverage), fmt(m.popularity)};
}

constexpr const char* kDetailHeader =
    "dataset,slice,algorithm,params,cutoff,events,hr,mrr,precision,recall,map,"
    "coverage,popularity,train_minutes,predict_ms_mean,predict_ms_median,"
    "predict_ms_p95,version,fingerprint";

// One detail file per slice, next to the cross-slice summary.
void write_details(const ExperimentConfig& config, const fs::path& dir,
                   const std::vector<DetailRow>& rows) {
  const std::string fingerprint = formula_fingerprint();
  std::map<int, std::vector<const DetailRow*>> by_slice;
  for (const DetailRow& row : rows) by_slice[row.slice].push_back(&row);
  for (const auto& [slice, slice_rows] : by_slice) {
    CsvWriter csv(dir / ("details_slice_" + std::to_string(slice) + ".csv"),
                  kDetailHeader);
    for (const DetailRow* row : slice_rows) {
      std::vector<std::string> fields{config.dataset.name, std::to_string(row->slice),
                                      row->algorithm,      row->params,
                                      std::to_string(row->cutoff),
                                      std::to_string(row->events)};
      for (std::string& f : metric_fields(row->metrics)) fields.push_back(std::move(f));
      if (row->timing) {
        fields.push_back(fmt(row->timing->train_seconds / 60.0, "%.4f"));
        fields.push_back(fmt(row->timing->predict_ms_mean, "%.4f"));
        fields.push_back(fmt(row->timing->predict_ms_median, "%.4f"));
        fields.push_back(fmt(row->timing->predict_ms_p95, "%.4f"));
      } else {
        fields.insert(fields.end(), {"", "", "", ""});
      }
      fields.push_back(kVersion);
      fields.push_back(fingerprint);
      csv.row(fields);
    }
  }
}

void write_summary(const ExperimentConfig& config, const fs::path& dir,
                   const std::vector<DetailRow>& rows) {
  // arithmetic mean over slices per (algorithm entry, cutoff)
  struct Key {
    std::pair<int, int> id;  // (algorithm entry, cutoff)
    std::string algorithm;
    std::string params;
    int cutoff;
  };
  std::vector<Key> order;
  std::map<std::pair<int, int>, std::pair<CutoffMetrics, int>> sums;
  std::map<std::pair<int, int>, std::size_t> event_sums;
  for (const DetailRow& row : rows) {
    const auto key = std::make_pair(row.algo_index, row.cutoff);
    auto [it, inserted] = sums.try_emplace(key, std::make_pair(CutoffMetrics{}, 0));
    if (inserted) order.push_back({key, row.algorithm, row.params, row.cutoff});
    CutoffMetrics& m = it->second.first;
    m.hit_rate += row.metrics.hit_rate;
    m.mrr += row.metrics.mrr;
    m.precision += row.metrics.precision;
    m.recall += row.metrics.recall;
    m.map += row.metrics.map;
    m.coverage += row.metrics.coverage;
    m.popularity += row.metrics.popularity;
    it->second.second += 1;
    event_sums[key] += row.events;
  }
  CsvWriter csv(dir / "summary.csv",
                "dataset,algorithm,params,cutoff,slices,events,hr,mrr,precision,"
                "recall,map,coverage,popularity,version,fingerprint");
  const std::string fingerprint = formula_fingerprint();
  for (const Key& key : order) {
    const auto map_key = key.id;
    const auto& [sum, n] = sums.at(map_key);
    CutoffMetrics mean = sum;
    mean.hit_rate /= n;
    mean.mrr /= n;
    mean.precision /= n;
    mean.recall /= n;
    mean.map /= n;
    mean.coverage /= n;
    mean.popularity /= n;
    std::vector<std::string> fields{config.dataset.name,
                                    key.algorithm,
                                    key.params,
                                    std::to_string(key.cutoff),
                                    std::to_string(n),
                                    std::to_string(event_sums.at(map_key))};
    for (std::string& f : metric_fields(mean)) fields.push_back(std::move(f));
    fields.push_back(kVersion);
    fields.push_back(fingerprint);
    csv.row(fields);
  }
}

void write_tuning_log(const fs::path& dir, const std::string& algorithm,
                      const SearchResult& result) {
  CsvWriter csv(dir / ("tuning_" + algorithm + ".csv"),
                "trial,params,mrr20,seconds,failed,error");
  for (const Trial& t : result.trials) {
    csv.row({std::to_string(t.index), join_params(t.params), fmt(t.mrr20),
             fmt(t.seconds, "%.3f"), t.failed ? "true" : "false", t.error});
  }
}

void write_stability(const fs::path& dir, const std::vector<StabilityRowGroup>& groups) {
  CsvWriter days_csv(dir / "stability.csv", "algorithm,mode,day,events,hr20,mrr20,empty");
  for (const StabilityRowGroup& g : groups) {
    for (const StabilityRun* run : {&g.retrain, &g.noretrain}) {
      for (const DayMetrics& d : run->days) {
        days_csv.row({g.algorithm, stability_mode_name(run->mode), std::to_string(d.day),
                      std::to_string(d.events), fmt(d.hr20), fmt(d.mrr20),
                      d.empty ? "true" : "false"});
      }
    }
  }
  CsvWriter drops_csv(dir / "stability_drops.csv",
                      "algorithm,metric,drop_percent,days_used,days_excluded");
  for (const StabilityRowGroup& g : groups) {
    drops_csv.row({g.algorithm, "hr20", fmt(g.drops.hr20.percent, "%.4f"),
                   std::to_string(g.drops.hr20.days_used),
                   std::to_string(g.drops.hr20.days_excluded)});
    drops_csv.row({g.algorithm, "mrr20", fmt(g.drops.mrr20.percent, "%.4f"),
                   std::to_string(g.drops.mrr20.days_used),
                   std::to_string(g.drops.mrr20.days_excluded)});
  }
}

void write_timing(const fs::path& dir, const ExperimentConfig& config,
                  const std::vector<DetailRow>& rows) {
  CsvWriter csv(dir / "timing.csv",
                "dataset,slice,algorithm,train_minutes,predict_ms_mean,"
                "predict_ms_median,predict_ms_p95,predictions,hardware");
  for (const DetailRow& row : rows) {
    if (!row.timing || row.cutoff != config.cutoffs.front()) continue;
    csv.row({config.dataset.name, std::to_string(row.slice), row.algorithm,
             fmt(row.timing->train_seconds / 60.0, "%.4f"),
             fmt(row.timing->predict_ms_mean, "%.4f"),
             fmt(row.timing->predict_ms_median, "%.4f"),
             fmt(row.timing->predict_ms_p95, "%.4f"),
             std::to_string(row.timing->prediction_count), row.timing->hardware});
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);
  write_metadata(config, out_dir);

  // ---- load ----
  SessionSet data;
  try {
    EventLog log = load_event_log(config.dataset.path, config.dataset.columns);
    data = sessionize(log.events);
    write_id_map(out_dir / "item_map.csv", log.item_originals);
    write_id_map(out_dir / "session_map.csv", log.session_originals);
  } catch (const std::exception& e) {
    throw StageError("load", e.what());
  }

  // ---- preprocess ----
  std::vector<TrainTestSplit> splits;
  try {
    if (config.synthetic_timestamps.enabled) {
      data = synthesize_timestamps(data, config.seed,
                                   config.synthetic_timestamps.span_days, config.split);
    }
    data = filter_dataset(data, config.split);
    for (SessionSet& slice : make_slices(data, config.split)) {
      TrainTestSplit split = split_slice(slice, config.split);
      splits.push_back(restrict_test_to_known_items(std::move(split),
                                                    config.split.min_session_length));
    }
  } catch (const std::exception& e) {
    throw StageError("preprocess", e.what());
  }

  // ---- tune (once per dataset, on the first slice's training data) ----
  std::vector<ParamAssignment> chosen_params;
  for (const AlgorithmConfig& algo : config.algorithms) chosen_params.push_back(algo.params);
  if (config.stages.tune) {
    for (std::size_t ai = 0; ai < config.algorithms.size(); ++ai) {
      const AlgorithmConfig& algo = config.algorithms[ai];
      if (!algo.tune) continue;
      try {
        const TrainTestSplit validation = make_validation_split(
            splits.front().train, config.split.test_days, config.split.min_session_length);
        const ParamSpace space = default_param_space(algo.algorithm);
        const std::uint64_t seed =
            derive_seed(config.seed, "tune", static_cast<std::uint64_t>(ai));
        const SearchResult search =
            random_search(algo.algorithm, space, config.tuning.n_iter, seed,
                          validation.train, validation.test);
        write_tuning_log(out_dir, algorithm_name(algo.algorithm), search);
        chosen_params[ai] = search.best_params;
      } catch (const std::exception& e) {
        throw StageError("tune", e.what());
      }
    }
  }

  // ---- evaluate / bench per slice and algorithm ----
  std::vector<DetailRow> rows;
  if (config.stages.evaluate || config.stages.bench) {
    for (std::size_t si = 0; si < splits.size(); ++si) {
      const TrainTestSplit& split = splits[si];
      const ItemStats stats = ItemStats::compute(split.train);
      const std::size_t catalog = split.train.vocabulary().size();
      for (std::size_t ai = 0; ai < config.algorithms.size(); ++ai) {
        const AlgorithmConfig& algo = config.algorithms[ai];
        const AlgoParams params = resolve_params(algo.algorithm, chosen_params[ai]);
        const std::string params_text =
            join_params(param_snapshot(algo.algorithm, params));
        try {
          std::optional<TimingReport> timing;
          std::unique_ptr<Recommender> model;
          if (config.stages.bench) {
            TimedFit timed = time_training(algo.algorithm, params, split.train);
            model = std::move(timed.model);
            TimingReport report = time_prediction(
                *model, split.test, config.bench.sample_limit,
                *std::max_element(config.cutoffs.begin(), config.cutoffs.end()));
            report.train_seconds = timed.seconds;
            timing = std::move(report);
          } else {
            model = fit_recommender(algo.algorithm, params, split.train);
          }
          if (config.stages.evaluate) {
            const MetricsReport report =
                evaluate(*model, split.test, config.cutoffs, catalog, stats);
            for (int cutoff : config.cutoffs) {
              DetailRow row;
              row.slice = static_cast<int>(si);
              row.algo_index = static_cast<int>(ai);
              row.algorithm = algorithm_name(algo.algorithm);
              row.params = params_text;
              row.cutoff = cutoff;
              row.events = report.event_count;
              row.metrics = report.at.at(cutoff);
              row.timing = timing;
              rows.push_back(std::move(row));
            }
          } else if (timing) {
            DetailRow row;
            row.slice = static_cast<int>(si);
            row.algo_index = static_cast<int>(ai);
            row.algorithm = algorithm_name(algo.algorithm);
            row.params = params_text;
            row.cutoff = config.cutoffs.front();
            row.timing = timing;
            rows.push_back(std::move(row));
          }
        } catch (const std::exception& e) {
          // flush what we have before aborting
          write_details(config, out_dir, rows);
          write_summary(config, out_dir, rows);
          throw StageError(config.stages.evaluate ? "evaluate" : "bench", e.what());
        }
      }
    }
    if (config.stages.evaluate) {
      write_details(config, out_dir, rows);
      write_summary(config, out_dir, rows);
    }
    if (config.stages.bench) write_timing(out_dir, config, rows);
  }

  // ---- stability ----
  if (config.stages.stability) {
    std::vector<StabilityRowGroup> groups;
    try {
      const TrainTestSplit& split = splits.at(static_cast<std::size_t>(config.stability.slice));
      const std::vector<SessionSet> days = partition_by_day(split.test);
      for (std::size_t ai = 0; ai < config.algorithms.size(); ++ai) {
        const AlgorithmConfig& algo = config.algorithms[ai];
        const AlgoParams params = resolve_params(algo.algorithm, chosen_params[ai]);
        StabilityRowGroup group;
        group.algorithm = algorithm_name(algo.algorithm);
        group.retrain = run_stability(algo.algorithm, params, split.train, days,
                                      StabilityMode::kRetraining);
        group.noretrain = run_stability(algo.algorithm, params, split.train, days,
                                        StabilityMode::kNoRetraining);
        group.drops = relative_drop(group.retrain, group.noretrain);
        groups.push_back(std::move(group));
      }
      write_stability(out_dir, groups);
    } catch (const std::exception& e) {
      write_stability(out_dir, groups);  // flush whatever completed
      throw StageError("stability", e.what());
    }
  }

  ExperimentResult result;
  result.output_dir = out_dir;
  result.slices = static_cast<int>(splits.size());
  return result;
}

}  // namespace sbr
