"""End-to-end smoke tests for the python bindings."""

import json

import pytest

import sbr


@pytest.fixture(scope="module")
def corpus():
    return sbr.generate_synthetic_corpus(
        items=40, sessions=800, span_days=12, rule_strength=0.8, seed=7
    )


@pytest.fixture(scope="module")
def split(corpus):
    filtered = sbr.filter_dataset(corpus, min_item_support=2)
    slices = sbr.make_slices(filtered, n_slices=2, test_days=2)
    assert len(slices) == 2
    return sbr.restrict_test_to_known_items(sbr.split_slice(slices[0], test_days=2))


def test_corpus_shape(corpus):
    assert corpus.num_sessions == 800
    assert corpus.vocabulary_size <= 40
    assert corpus.span_days <= 12
    assert corpus.num_events >= 2 * corpus.num_sessions


def test_generator_is_deterministic():
    a = sbr.generate_synthetic_corpus(items=20, sessions=50, seed=3)
    b = sbr.generate_synthetic_corpus(items=20, sessions=50, seed=3)
    assert a == b


def test_split_is_temporal(split):
    assert split.train.num_sessions > 0
    assert split.test.num_sessions > 0
    train_max = max(t for _, events in split.train.to_list() for _, t in events)
    assert train_max < split.boundary_time


@pytest.mark.parametrize("algorithm", ["ar", "sr", "sknn", "vsknn", "stan", "vstan"])
def test_fit_and_predict(split, algorithm):
    model = sbr.fit(algorithm, split.train, {})
    assert model.algorithm == algorithm
    vocab = split.train.vocabulary()
    ranked = model.predict([vocab[0], vocab[1]], k=10)
    assert len(ranked) <= 10
    scores = [score for _, score in ranked]
    assert scores == sorted(scores, reverse=True)
    assert all(score > 0 for score in scores)
    items = [item for item, _ in ranked]
    assert len(items) == len(set(items))


def test_evaluate_reports_metrics(split):
    model = sbr.fit("sknn", split.train, {"k_neighbors": 50, "sample_size": 500})
    report = sbr.evaluate(model, split.test, [5, 10, 20], split.train)
    assert report["events"] > 0
    for cutoff in (5, 10, 20):
        entry = report["at"][cutoff]
        for name in ("hr", "mrr", "precision", "recall", "map", "coverage", "popularity"):
            assert 0.0 <= entry[name] <= 1.0
        assert entry["hr"] >= entry["mrr"]
    assert report["at"][20]["hr"] >= report["at"][5]["hr"]


def test_planted_rules_are_learned(split):
    model = sbr.fit("sr", split.train, {})
    report = sbr.evaluate(model, split.test, [20], split.train)
    assert report["at"][20]["hr"] > 0.3  # strong planted signal


def test_random_search(split):
    result = sbr.random_search("vsknn", 3, 11, split.train, split.test)
    assert len(result["trials"]) == 3
    best = max(t["mrr20"] for t in result["trials"])
    assert result["best_mrr20"] == best


def test_stability_and_drop(corpus):
    filtered = sbr.filter_dataset(corpus, min_item_support=1)
    split = sbr.split_slice(filtered, test_days=3)
    days = sbr.partition_by_day(split.test)
    assert len(days) >= 2
    retrain = sbr.run_stability("ar", {}, split.train, days, "retraining")
    noretrain = sbr.run_stability("ar", {}, split.train, days, "no_retraining")
    assert retrain.days[0]["hr20"] == noretrain.days[0]["hr20"]
    drops = sbr.relative_drop(retrain, noretrain)
    assert "percent" in drops["hr20"]


def test_run_experiment(tmp_path, corpus):
    data = tmp_path / "events.csv"
    with open(data, "w") as fh:
        fh.write("SessionId,ItemId,Time\n")
        for sid, events in corpus.to_list():
            for item, time_ms in events:
                fh.write(f"{sid},{item},{time_ms / 1000:.3f}\n")

    config = {
        "dataset": {"name": "smoke", "path": str(data)},
        "split": {"n_slices": 2, "test_days": 2, "min_item_support": 2},
        "algorithms": [{"name": "ar"}, {"name": "sknn", "params": {"k_neighbors": 50}}],
        "cutoffs": [5, 20],
        "seed": 5,
        "output_dir": str(tmp_path / "out"),
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))

    out_dir = sbr.run_experiment(str(config_path))
    assert (tmp_path / "out" / "summary.csv").exists()
    assert (tmp_path / "out" / "details_slice_0.csv").exists()
    assert (tmp_path / "out" / "details_slice_1.csv").exists()
    metadata = json.loads((tmp_path / "out" / "metadata.json").read_text())
    assert metadata["formula_fingerprint"] == sbr.formula_fingerprint()
    assert out_dir == str(tmp_path / "out")
