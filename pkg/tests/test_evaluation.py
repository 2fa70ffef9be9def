import json

import numpy as np
import pytest

from depscreen import evaluation as ev
from depscreen import pipeline
from depscreen.config import RunConfig
from depscreen.corpus import Corpus, LabeledDocument, SplitSpec
from depscreen.errors import DataError

from synth import keyword_corpus


class TestConfusion:
    def test_perfect_predictions(self):
        cm = ev.confusion([1, 0, 1], [1, 0, 1])
        assert cm.tp == 2 and cm.tn == 1 and cm.fp == 0 and cm.fn == 0

    def test_all_missed(self):
        cm = ev.confusion([1, 1, 1], [0, 0, 0])
        assert cm.fn == 3 and cm.tp == 0 and cm.fp == 0 and cm.tn == 0

    def test_hand_tabulation(self):
        y_true = [1, 1, 1, 1, 0, 0, 0, 0, 0, 0]
        y_pred = [1, 1, 1, 0, 1, 0, 0, 0, 0, 0]
        cm = ev.confusion(y_true, y_pred)
        assert (cm.tp, cm.fn, cm.fp, cm.tn) == (3, 1, 1, 5)

    def test_errors(self):
        with pytest.raises(DataError, match="length mismatch"):
            ev.confusion([1, 0], [1])
        with pytest.raises(DataError, match="0/1"):
            ev.confusion([2, 0], [1, 0])
        with pytest.raises(DataError, match="empty"):
            ev.confusion([], [])


class TestMetrics:
    def test_hand_formulas(self):
        cm = ev.confusion([1, 1, 1, 1, 0, 0, 0, 0, 0, 0],
                          [1, 1, 1, 0, 1, 0, 0, 0, 0, 0])
        report = ev.metrics(cm, model="probe")
        one = report.per_label[1]
        assert one.precision == pytest.approx(0.75)
        assert one.recall == pytest.approx(0.75)
        assert one.f1 == pytest.approx(0.75)
        assert one.support == 4
        assert report.accuracy == pytest.approx(0.8)
        assert not report.zero_division

    def test_perfect(self):
        report = ev.metrics(ev.confusion([0, 1], [0, 1]))
        for label in (0, 1):
            m = report.per_label[label]
            assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)
        assert report.accuracy == 1.0

    def test_zero_division_flagged(self):
        # nothing predicted as class 1: precision(1) has a zero denominator
        report = ev.metrics(ev.confusion([0, 1], [0, 0]))
        assert report.per_label[1].precision == 0.0
        assert report.zero_division

    def test_supports_sum_to_total(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(1, 40))
            y_true = rng.integers(0, 2, n)
            y_pred = rng.integers(0, 2, n)
            report = ev.metrics(ev.confusion(y_true, y_pred))
            assert (report.per_label[0].support + report.per_label[1].support
                    == n)
            assert report.per_label[1].support == int(y_true.sum())

    def test_accuracy_and_micro_identities(self):
        # exact identities on random confusion matrices
        rng = np.random.default_rng(1)
        for _ in range(200):
            cells = rng.integers(0, 50, size=4)
            if cells.sum() == 0:
                cells[0] = 1
            cm = ev.ConfusionMatrix(((int(cells[0]), int(cells[1])),
                                     (int(cells[2]), int(cells[3]))))
            report = ev.metrics(cm)
            assert report.accuracy == cm.trace / cm.total
            assert ev.micro_precision(cm) == ev.micro_recall(cm) == report.accuracy

    def test_report_is_pure_function_of_pairs(self):
        rng = np.random.default_rng(2)
        y_true = rng.integers(0, 2, 30)
        y_pred = rng.integers(0, 2, 30)
        perm = rng.permutation(30)
        a = ev.metrics(ev.confusion(y_true, y_pred))
        b = ev.metrics(ev.confusion(y_true[perm], y_pred[perm]))
        assert a == b


class TestTableFormat:
    def report_like_published_row(self):
        cm = ev.ConfusionMatrix(((494, 46), (29, 553)))
        per = {
            0: ev.ClassMetrics(precision=0.94542254, recall=0.91482112,
                               f1=0.92987013, support=540),
            1: ev.ClassMetrics(precision=0.92125984, recall=0.94967532,
                               f1=0.9352518, support=582),
        }
        return ev.EvalReport(model="Neural Network", accuracy=0.93,
                             per_label=per, confusion=cm)

    def test_columns_and_eight_decimal_rendering(self):
        table = ev.format_report_table([self.report_like_published_row()])
        header = table.splitlines()[0]
        for column in ("Model", "Accuracy", "Label", "Precision", "Recall",
                       "F1-Score", "Support"):
            assert column in header
        row0 = table.splitlines()[2]
        assert "0.94542254" in row0
        assert "0.91482112" in row0
        assert "0.92987013" in row0
        assert row0.rstrip().endswith("540")

    def test_failure_rows_rendered(self):
        table = ev.format_report_table([], {"gnb": "boom"})
        assert "FAILED" in table and "boom" in table

    def test_json_schema(self):
        payload = json.loads(ev.reports_to_json(
            [self.report_like_published_row()]))
        assert isinstance(payload, list)
        doc = payload[0]
        assert set(doc) == {"model", "accuracy", "per_label", "confusion"}
        assert set(doc["per_label"][0]) == {"label", "precision", "recall",
                                            "f1", "support"}
        assert doc["confusion"] == [[494, 46], [29, 553]]


def two_blob_corpus(n=40):
    docs = []
    for i in range(n):
        label = i % 2
        word = "mala" if label else "kanda"
        docs.append(LabeledDocument(f"{word}{i % 5} {word}{(i + 1) % 5}",
                                    label))
    return Corpus(tuple(docs))


class TestEvaluate:
    def config(self):
        return RunConfig.from_dict({
            "textprep": {"use_stopwords": False, "use_stemming": False},
            "features": {"min_n": 1, "max_n": 1},
        })

    def test_memorizing_tree_scores_perfectly_on_train(self):
        corpus = two_blob_corpus()
        artifact = pipeline.fit_pipeline(corpus, self.config(), "tree")
        report = ev.evaluate(artifact, corpus)
        assert report.accuracy == 1.0

    def test_empty_corpus_rejected(self):
        corpus = two_blob_corpus()
        artifact = pipeline.fit_pipeline(corpus, self.config(), "mnb")
        with pytest.raises(DataError, match="empty"):
            ev.evaluate(artifact, Corpus(()))

    def test_zero_threshold_forces_positive_class(self):
        corpus = two_blob_corpus()
        artifact = pipeline.fit_pipeline(corpus, self.config(), "mnb")
        report = ev.evaluate(artifact, corpus, threshold=0.0)
        assert report.per_label[0].recall == 0.0
        assert report.per_label[1].recall == 1.0


class TestBenchmark:
    def test_single_model(self):
        corpus = keyword_corpus(n_docs=80, seed=3)
        result = ev.benchmark(corpus, SplitSpec(seed=0),
                              RunConfig.from_dict({"features": {"max_n": 1}}),
                              kinds=("mnb",))
        assert len(result.reports) == 1
        assert not result.failures

    def test_identical_predictions_identical_rows(self):
        # forest fixed to (1 tree, no bootstrap, all features) predicts
        # exactly like the plain tree, so their metric rows must agree
        corpus = keyword_corpus(n_docs=80, seed=4)
        config = RunConfig.from_dict({
            "features": {"max_n": 1},
            "forest": {"n_trees": 1, "bootstrap": False,
                       "features_per_split": "all"},
        })
        result = ev.benchmark(corpus, SplitSpec(seed=1), config,
                              kinds=("tree", "forest"))
        assert not result.failures
        a, b = result.reports
        assert a.accuracy == b.accuracy
        assert a.per_label == b.per_label
        assert a.confusion == b.confusion

    def test_failures_do_not_abort_the_rest(self):
        corpus = keyword_corpus(n_docs=60, seed=5)
        config = RunConfig.from_dict({
            "features": {"max_n": 1},
            "gnb": {"max_dense_cells": 4},  # force a densify failure
        })
        result = ev.benchmark(corpus, SplitSpec(seed=2), config,
                              kinds=("gnb", "mnb"))
        assert "gnb" in result.failures
        assert "cell limit" in result.failures["gnb"]
        assert len(result.reports) == 1

    def test_reports_sorted_by_accuracy(self):
        corpus = keyword_corpus(n_docs=120, seed=6, own_frac=0.55)
        config = RunConfig.from_dict({"features": {"max_n": 1},
                                      "nn": {"epochs": 2}})
        result = ev.benchmark(corpus, SplitSpec(seed=3), config)
        accs = [r.accuracy for r in result.reports]
        assert accs == sorted(accs, reverse=True)
