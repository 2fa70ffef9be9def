"""Confusion matrices, per-class metrics, reports and the benchmark.

The benchmark trains every requested model on one shared split and one
shared fitted feature chain so that accuracy differences isolate the
classifier. Reports render as an aligned text table (Model, Accuracy,
Label, Precision, Recall, F1-Score, Support; two label rows per model)
or as JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import pipeline, vectorize
from .corpus import split as corpus_split
from .errors import DataError

MODEL_DISPLAY = {
    "mnb": "Multinomial Naive Bayes",
    "gnb": "Gaussian Naive Bayes Classifier",
    "logreg": "Logistic Regression",
    "svm": "Support Vector Machines (SVM)",
    "tree": "Decision Trees",
    "forest": "Random Forest Classifier",
    "nn": "Neural Network",
}


@dataclass(frozen=True)
class ConfusionMatrix:
    """2x2 counts indexed cells[true_label][predicted_label]."""

    cells: tuple

    @property
    def tn(self):
        return self.cells[0][0]

    @property
    def fp(self):
        return self.cells[0][1]

    @property
    def fn(self):
        return self.cells[1][0]

    @property
    def tp(self):
        return self.cells[1][1]

    @property
    def total(self):
        return self.tn + self.fp + self.fn + self.tp

    @property
    def trace(self):
        return self.tn + self.tp

    def as_lists(self):
        return [list(self.cells[0]), list(self.cells[1])]


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    model: str
    accuracy: float
    per_label: dict  # label -> ClassMetrics
    confusion: ConfusionMatrix
    zero_division: bool = False

    def to_dict(self):
        return {
            "model": self.model,
            "accuracy": self.accuracy,
            "per_label": [
                {"label": label, "precision": m.precision,
                 "recall": m.recall, "f1": m.f1, "support": m.support}
                for label, m in sorted(self.per_label.items())
            ],
            "confusion": self.confusion.as_lists(),
        }


def confusion(y_true, y_pred):
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if len(y_true) != len(y_pred):
        raise DataError(f"length mismatch: {len(y_true)} true labels vs "
                        f"{len(y_pred)} predictions")
    if len(y_true) == 0:
        raise DataError("cannot tabulate an empty prediction set")
    for name, arr in (("true", y_true), ("predicted", y_pred)):
        if not np.all((arr == 0) | (arr == 1)):
            raise DataError(f"{name} labels must be 0/1")
    cells = [[0, 0], [0, 0]]
    for t, p in zip(y_true.tolist(), y_pred.tolist()):
        cells[t][p] += 1
    return ConfusionMatrix((tuple(cells[0]), tuple(cells[1])))


def _safe_div(num, denom):
    return num / denom if denom > 0 else 0.0


def metrics(cm, model=""):
    """Per-class precision/recall/F1/support plus accuracy.

    Zero denominators report 0 and set the zero_division flag.
    """
    if cm.total < 1:
        raise DataError("confusion matrix is empty")
    per_label = {}
    flagged = False
    for c in (0, 1):
        tp_c = cm.cells[c][c]
        pred_c = cm.cells[0][c] + cm.cells[1][c]
        true_c = cm.cells[c][0] + cm.cells[c][1]
        precision = _safe_div(tp_c, pred_c)
        recall = _safe_div(tp_c, true_c)
        pr = precision + recall
        f1 = 2.0 * precision * recall / pr if pr > 0 else 0.0
        if pred_c == 0 or true_c == 0 or pr == 0:
            flagged = True
        per_label[c] = ClassMetrics(precision=precision, recall=recall,
                                    f1=f1, support=true_c)
    return EvalReport(model=model, accuracy=cm.trace / cm.total,
                      per_label=per_label, confusion=cm,
                      zero_division=flagged)


def micro_precision(cm):
    """Micro-averaged precision (== accuracy for binary single-label)."""
    return _safe_div(cm.cells[0][0] + cm.cells[1][1],
                     (cm.cells[0][0] + cm.cells[1][0])
                     + (cm.cells[0][1] + cm.cells[1][1]))


def micro_recall(cm):
    return _safe_div(cm.cells[0][0] + cm.cells[1][1],
                     (cm.cells[0][0] + cm.cells[0][1])
                     + (cm.cells[1][0] + cm.cells[1][1]))


def evaluate(artifact, test_corpus, threshold=None):
    """Run a fitted pipeline over held-out documents; never refits."""
    if len(test_corpus) == 0:
        raise DataError("cannot evaluate on an empty corpus")
    labels, _, _ = artifact.predict(test_corpus.texts(), threshold)
    cm = confusion(test_corpus.labels(), labels)
    return metrics(cm, model=MODEL_DISPLAY.get(artifact.model_kind,
                                               artifact.model_kind))


@dataclass
class BenchmarkResult:
    reports: list  # EvalReport, sorted by accuracy descending
    failures: dict  # kind -> error message
    split_sizes: tuple  # (train, test)


def benchmark(corpus, split_spec, config, kinds=pipeline.MODEL_KINDS):
    """Train and evaluate every requested model on one shared split and
    feature chain. A failing model becomes a failure row; the rest
    still run."""
    parts = corpus_split(corpus, split_spec)
    chain, counts, tfidf, y_train = pipeline.fit_chain(parts.train, config)
    counts_sel = vectorize.project(counts, chain.selector)
    tfidf_sel = vectorize.project(tfidf, chain.selector)

    reports = []
    failures = {}
    for kind in kinds:
        feed = pipeline.model_input(kind, config)
        X_train = counts_sel if feed == "counts" else tfidf_sel
        try:
            model = pipeline.build_model(kind, config).fit(X_train, y_train)
            artifact = pipeline.PipelineArtifact(
                chain=chain, model=model, model_kind=kind, model_input=feed,
                threshold=config.threshold,
                label_names=dict(corpus.label_names))
            reports.append(evaluate(artifact, parts.test))
        except DataError as exc:
            failures[kind] = str(exc)
        except Exception as exc:  # keep the harness alive per spec
            failures[kind] = f"{type(exc).__name__}: {exc}"
    reports.sort(key=lambda r: -r.accuracy)
    return BenchmarkResult(reports=reports, failures=failures,
                           split_sizes=(len(parts.train), len(parts.test)))


# --- rendering ---------------------------------------------------------------

_HEADER = ("Model", "Accuracy", "Label", "Precision", "Recall", "F1-Score",
           "Support")


def format_report_table(reports, failures=None):
    """Fixed-width table with two label rows per model."""
    rows = []
    for report in reports:
        for i, label in enumerate((0, 1)):
            m = report.per_label[label]
            rows.append((
                report.model if i == 0 else "",
                f"{report.accuracy:.4f}" if i == 0 else "",
                str(label),
                f"{m.precision:.8f}",
                f"{m.recall:.8f}",
                f"{m.f1:.8f}",
                str(m.support),
            ))
    for kind, message in (failures or {}).items():
        rows.append((MODEL_DISPLAY.get(kind, kind), "FAILED", "-",
                     message, "", "", ""))
    widths = [max(len(_HEADER[i]), *(len(r[i]) for r in rows)) if rows
              else len(_HEADER[i]) for i in range(len(_HEADER))]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(_HEADER))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i])
                               for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines)


def reports_to_json(reports):
    """Canonical machine-readable form; stable byte-for-byte per seed."""
    return json.dumps([r.to_dict() for r in reports], indent=2,
                      ensure_ascii=False)
