#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdio>

#include "sbr/bench.hpp"
#include "sbr/config.hpp"
#include "sbr/corpus.hpp"
#include "sbr/experiment.hpp"
#include "sbr/metrics.hpp"
#include "sbr/preprocess.hpp"
#include "sbr/recommender.hpp"
#include "sbr/stability.hpp"
#include "sbr/synthetic.hpp"
#include "sbr/tuning.hpp"

namespace py = pybind11;
using namespace sbr;

namespace {

ParamAssignment params_from_dict(const py::dict& params) {
  ParamAssignment assignment;
  for (const auto& item : params) {
    const std::string key = py::cast<std::string>(item.first);
    std::string value;
    if (py::isinstance<py::bool_>(item.second)) {
      value = py::cast<bool>(item.second) ? "true" : "false";
    } else if (py::isinstance<py::int_>(item.second)) {
      value = std::to_string(py::cast<std::int64_t>(item.second));
    } else if (py::isinstance<py::float_>(item.second)) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", py::cast<double>(item.second));
      value = buf;
    } else {
      value = py::cast<std::string>(item.second);
    }
    assignment.emplace_back(key, value);
  }
  return assignment;
}

Session session_from_lists(const std::vector<ItemId>& items,
                           const std::vector<Timestamp>& times) {
  if (items.empty()) throw Error("prefix needs at least one item");
  if (!times.empty() && times.size() != items.size()) {
    throw Error("times must match items in length");
  }
  Session s{0, {}};
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Timestamp t =
        times.empty() ? static_cast<Timestamp>(i) * kMillisPerSecond : times[i];
    s.events.push_back({0, items[i], t});
  }
  return s;
}

SplitSpec make_split_spec(int n_slices, int test_days, int min_item_support,
                          int min_session_length, bool filter_to_fixpoint) {
  SplitSpec spec;
  spec.n_slices = n_slices;
  spec.test_days = test_days;
  spec.min_item_support = min_item_support;
  spec.min_session_length = min_session_length;
  spec.filter_to_fixpoint = filter_to_fixpoint;
  return spec;
}

py::dict metrics_to_dict(const MetricsReport& report) {
  py::dict out;
  out["events"] = report.event_count;
  py::dict per_cutoff;
  for (const auto& [cutoff, m] : report.at) {
    py::dict entry;
    entry["hr"] = m.hit_rate;
    entry["mrr"] = m.mrr;
    entry["precision"] = m.precision;
    entry["recall"] = m.recall;
    entry["map"] = m.map;
    entry["coverage"] = m.coverage;
    entry["popularity"] = m.popularity;
    per_cutoff[py::int_(cutoff)] = entry;
  }
  out["at"] = per_cutoff;
  return out;
}

py::list stability_days(const StabilityRun& run) {
  py::list days;
  for (const DayMetrics& d : run.days) {
    py::dict entry;
    entry["day"] = d.day;
    entry["events"] = d.events;
    entry["hr20"] = d.hr20;
    entry["mrr20"] = d.mrr20;
    entry["empty"] = d.empty;
    days.append(entry);
  }
  return days;
}

}  // namespace

PYBIND11_MODULE(_sbr, m) {
  m.doc() = "session-based recommendation benchmark core";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "SbrError", PyExc_RuntimeError);

  py::class_<SessionSet>(m, "SessionSet")
      .def(py::init<>())
      .def_property_readonly("num_sessions", &SessionSet::size)
      .def_property_readonly("num_events", &SessionSet::event_count)
      .def_property_readonly(
          "vocabulary_size",
          [](const SessionSet& s) { return s.vocabulary().size(); })
      .def_property_readonly("span_days", &SessionSet::span_days)
      .def("vocabulary", [](const SessionSet& s) { return s.vocabulary(); })
      .def("to_list",
           [](const SessionSet& s) {
             py::list sessions;
             for (const Session& session : s.sessions()) {
               py::list events;
               for (const Event& ev : session.events) {
                 events.append(py::make_tuple(ev.item, ev.time));
               }
               sessions.append(py::make_tuple(session.id, events));
             }
             return sessions;
           })
      .def("__len__", &SessionSet::size)
      .def("__eq__", [](const SessionSet& a, const SessionSet& b) { return a == b; });

  m.def(
      "make_session_set",
      [](const std::vector<std::pair<SessionId, std::vector<std::pair<ItemId, Timestamp>>>>&
             sessions) {
        std::vector<Session> built;
        for (const auto& [sid, events] : sessions) {
          Session s{sid, {}};
          for (const auto& [item, time] : events) s.events.push_back({sid, item, time});
          built.push_back(std::move(s));
        }
        return SessionSet::build(std::move(built));
      },
      py::arg("sessions"),
      "Build a SessionSet from [(session_id, [(item, time_ms), ...]), ...].");

  m.def(
      "load_sessions",
      [](const std::string& path, const std::string& session_column,
         const std::string& item_column, const std::string& time_column,
         const std::string& delimiter, bool header) {
        ColumnSpec spec;
        spec.session_column = session_column;
        spec.item_column = item_column;
        spec.time_column = time_column;
        if (delimiter.size() != 1) throw Error("delimiter must be one character");
        spec.delimiter = delimiter[0];
        spec.header = header;
        EventLog log = load_event_log(path, spec);
        SessionSet sessions = sessionize(log.events);
        return py::make_tuple(sessions, log.item_originals, log.session_originals);
      },
      py::arg("path"), py::arg("session_column") = "SessionId",
      py::arg("item_column") = "ItemId", py::arg("time_column") = "Time",
      py::arg("delimiter") = ",", py::arg("header") = true,
      "Load a delimited interaction log; returns (sessions, item_map, session_map).");

  m.def(
      "generate_synthetic_corpus",
      [](std::int32_t items, std::int32_t sessions, int span_days, double rule_strength,
         std::uint64_t seed, int min_session_length, int max_session_length) {
        SyntheticSpec spec;
        spec.n_items = items;
        spec.n_sessions = sessions;
        spec.span_days = span_days;
        spec.rule_strength = rule_strength;
        spec.seed = seed;
        spec.min_session_length = min_session_length;
        spec.max_session_length = max_session_length;
        return generate_synthetic_corpus(spec);
      },
      py::arg("items"), py::arg("sessions"), py::arg("span_days") = 30,
      py::arg("rule_strength") = 0.0, py::arg("seed") = 1,
      py::arg("min_session_length") = 2, py::arg("max_session_length") = 10);

  m.def(
      "filter_dataset",
      [](const SessionSet& data, int min_item_support, int min_session_length,
         bool fixpoint) {
        return filter_dataset(
            data, make_split_spec(1, 1, min_item_support, min_session_length, fixpoint));
      },
      py::arg("data"), py::arg("min_item_support") = 5,
      py::arg("min_session_length") = 2, py::arg("fixpoint") = false);

  m.def(
      "synthesize_timestamps",
      [](const SessionSet& data, std::uint64_t seed, int span_days) {
        return synthesize_timestamps(data, seed, span_days);
      },
      py::arg("data"), py::arg("seed"), py::arg("span_days"));

  m.def(
      "make_slices",
      [](const SessionSet& data, int n_slices, int test_days) {
        return make_slices(data, make_split_spec(n_slices, test_days, 1, 2, false));
      },
      py::arg("data"), py::arg("n_slices"), py::arg("test_days"));

  py::class_<TrainTestSplit>(m, "TrainTestSplit")
      .def_readonly("train", &TrainTestSplit::train)
      .def_readonly("test", &TrainTestSplit::test)
      .def_readonly("boundary_time", &TrainTestSplit::boundary_time);

  m.def(
      "split_slice",
      [](const SessionSet& slice, int test_days, int min_session_length) {
        return split_slice(slice,
                           make_split_spec(1, test_days, 1, min_session_length, false));
      },
      py::arg("slice"), py::arg("test_days"), py::arg("min_session_length") = 2);

  m.def("restrict_test_to_known_items", &restrict_test_to_known_items,
        py::arg("split"), py::arg("min_session_length") = 2);

  m.def("make_validation_split", &make_validation_split, py::arg("train"),
        py::arg("test_days"), py::arg("min_session_length") = 2);

  py::class_<Recommender>(m, "Recommender")
      .def_property_readonly(
          "algorithm",
          [](const Recommender& r) { return std::string(algorithm_name(r.algorithm())); })
      .def(
          "predict",
          [](const Recommender& r, const std::vector<ItemId>& items,
             const std::vector<Timestamp>& times, int k) {
            const Session prefix = session_from_lists(items, times);
            py::list out;
            for (const ScoredItem& s : r.predict(prefix, k)) {
              out.append(py::make_tuple(s.item, s.score));
            }
            return out;
          },
          py::arg("items"), py::arg("times") = std::vector<Timestamp>{},
          py::arg("k") = 20,
          "Ranked (item, score) list for a revealed prefix. Times are epoch "
          "milliseconds; omitted times fall back to one-second spacing.");

  m.def(
      "fit",
      [](const std::string& algorithm, const SessionSet& train, const py::dict& params) {
        const Algorithm algo = algorithm_from_name(algorithm);
        return fit_recommender(algo, resolve_params(algo, params_from_dict(params)),
                               train);
      },
      py::arg("algorithm"), py::arg("train"), py::arg("params") = py::dict(),
      "Fit one of: ar, sr, sknn, vsknn, stan, vstan.");

  m.def(
      "evaluate",
      [](const Recommender& model, const SessionSet& test, const std::vector<int>& cutoffs,
         const SessionSet& train) {
        const ItemStats stats = ItemStats::compute(train);
        return metrics_to_dict(
            evaluate(model, test, cutoffs, train.vocabulary().size(), stats));
      },
      py::arg("model"), py::arg("test"), py::arg("cutoffs"), py::arg("train"),
      "Incremental-reveal evaluation; coverage and popularity come from train.");

  m.def(
      "random_search",
      [](const std::string& algorithm, int n_iter, std::uint64_t seed,
         const SessionSet& subtrain, const SessionSet& validation) {
        const Algorithm algo = algorithm_from_name(algorithm);
        const SearchResult result =
            random_search(algo, default_param_space(algo), n_iter, seed, subtrain,
                          validation);
        py::dict out;
        out["best_index"] = result.best_index;
        out["best_mrr20"] = result.best_mrr20;
        py::dict best;
        for (const auto& [key, value] : result.best_params) best[py::str(key)] = value;
        out["best_params"] = best;
        py::list trials;
        for (const Trial& t : result.trials) {
          py::dict trial;
          trial["index"] = t.index;
          trial["mrr20"] = t.mrr20;
          trial["seconds"] = t.seconds;
          trial["failed"] = t.failed;
          py::dict p;
          for (const auto& [key, value] : t.params) p[py::str(key)] = value;
          trial["params"] = p;
          trials.append(trial);
        }
        out["trials"] = trials;
        return out;
      },
      py::arg("algorithm"), py::arg("n_iter"), py::arg("seed"), py::arg("subtrain"),
      py::arg("validation"));

  py::class_<StabilityRun>(m, "StabilityRun")
      .def_property_readonly(
          "mode",
          [](const StabilityRun& r) { return std::string(stability_mode_name(r.mode)); })
      .def_property_readonly("days", &stability_days);

  m.def(
      "run_stability",
      [](const std::string& algorithm, const py::dict& params, const SessionSet& t0,
         const std::vector<SessionSet>& days, const std::string& mode) {
        const Algorithm algo = algorithm_from_name(algorithm);
        StabilityMode stability_mode;
        if (mode == "retraining") {
          stability_mode = StabilityMode::kRetraining;
        } else if (mode == "no_retraining") {
          stability_mode = StabilityMode::kNoRetraining;
        } else {
          throw Error("mode must be 'retraining' or 'no_retraining'");
        }
        return run_stability(algo, resolve_params(algo, params_from_dict(params)), t0,
                             days, stability_mode);
      },
      py::arg("algorithm"), py::arg("params"), py::arg("initial_train"), py::arg("days"),
      py::arg("mode"));

  m.def("partition_by_day", &partition_by_day, py::arg("data"));

  m.def(
      "relative_drop",
      [](const StabilityRun& retrain, const StabilityRun& noretrain) {
        const DropReport report = relative_drop(retrain, noretrain);
        py::dict out;
        py::dict hr, mrr;
        hr["percent"] = report.hr20.percent;
        hr["days_used"] = report.hr20.days_used;
        hr["days_excluded"] = report.hr20.days_excluded;
        mrr["percent"] = report.mrr20.percent;
        mrr["days_used"] = report.mrr20.days_used;
        mrr["days_excluded"] = report.mrr20.days_excluded;
        out["hr20"] = hr;
        out["mrr20"] = mrr;
        return out;
      },
      py::arg("retrain"), py::arg("noretrain"));

  m.def(
      "time_prediction",
      [](const Recommender& model, const SessionSet& test, std::size_t sample_limit,
         int k) {
        const TimingReport report = time_prediction(model, test, sample_limit, k);
        py::dict out;
        out["predict_ms_mean"] = report.predict_ms_mean;
        out["predict_ms_median"] = report.predict_ms_median;
        out["predict_ms_p95"] = report.predict_ms_p95;
        out["prediction_count"] = report.prediction_count;
        out["hardware"] = report.hardware;
        return out;
      },
      py::arg("model"), py::arg("test"), py::arg("sample_limit") = 1000,
      py::arg("k") = 20);

  m.def(
      "run_experiment",
      [](const std::string& config_path) {
        const ExperimentResult result = run_experiment(load_experiment_config(config_path));
        return result.output_dir.string();
      },
      py::arg("config_path"), "Run the configured stages; returns the output directory.");

  m.def("formula_fingerprint", &formula_fingerprint,
        "Stable fingerprint of the pinned scoring formulas.");
}
