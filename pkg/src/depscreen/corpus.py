"""Loading, validation and splitting of the labeled tweet corpus.

The on-disk format is a UTF-8 CSV with RFC-4180 quoting and the exact
header ``text,label``. Labels are the integers 0/1 or the canonical
strings "non-depressive"/"depressive".
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field

from .errors import ConfigError, DataError

LABEL_NAMES = {0: "non-depressive", 1: "depressive"}

_STRING_LABELS = {"depressive": 1, "non-depressive": 0}


@dataclass(frozen=True)
class LabeledDocument:
    """One raw text with its binary label."""

    text: str
    label: int


@dataclass(frozen=True)
class Corpus:
    """Ordered, immutable collection of labeled documents."""

    docs: tuple[LabeledDocument, ...]
    label_names: dict[int, str] = field(default_factory=lambda: dict(LABEL_NAMES))

    def __len__(self):
        return len(self.docs)

    def texts(self):
        return [d.text for d in self.docs]

    def labels(self):
        return [d.label for d in self.docs]

    def class_counts(self):
        return class_counts(self)


@dataclass(frozen=True)
class SplitSpec:
    train_ratio: float = 0.8
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_ratio < 1.0:
            raise ConfigError(f"train_ratio must be in (0,1), got {self.train_ratio}")


@dataclass(frozen=True)
class DataSplit:
    train: Corpus
    test: Corpus


def _parse_label(raw, row_num):
    value = raw.strip()
    if value in _STRING_LABELS:
        return _STRING_LABELS[value]
    if value in ("0", "1"):
        return int(value)
    raise DataError(f"row {row_num}: unparseable label {raw!r} "
                    "(expected 0/1 or depressive/non-depressive)")


def load_csv(path, dedupe=False):
    """Read a ``text,label`` CSV into a Corpus, preserving row order.

    With dedupe=True, later rows repeating an earlier (text, label) pair
    are dropped; by default duplicates are kept (tweets repeat).
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open corpus file {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, expected header text,label")
        if [h.strip() for h in header] != ["text", "label"]:
            raise DataError(f"{path}: header must be exactly 'text,label', "
                            f"got {','.join(header)!r}")
        docs = []
        seen = set()
        for row_num, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataError(f"row {row_num}: expected 2 columns, got {len(row)}")
            text = row[0].strip()
            if not text:
                raise DataError(f"row {row_num}: empty text field")
            label = _parse_label(row[1], row_num)
            if dedupe:
                key = (text, label)
                if key in seen:
                    continue
                seen.add(key)
            docs.append(LabeledDocument(text, label))
    if not docs:
        raise DataError(f"{path}: empty corpus")
    return Corpus(tuple(docs))


def save_csv(corpus, path):
    """Write a Corpus back to the same CSV format."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["text", "label"])
        for doc in corpus.docs:
            writer.writerow([doc.text, doc.label])


def class_counts(corpus):
    """Label -> document count for the labels actually present."""
    counts = {}
    for doc in corpus.docs:
        counts[doc.label] = counts.get(doc.label, 0) + 1
    return counts


def split(corpus, spec):
    """Deterministic train/test partition with |train| = floor(N * ratio).

    Stratified mode keeps each class's train fraction within one document
    of the global ratio; both modes preserve original document order
    inside each side.
    """
    n = len(corpus)
    if n < 2:
        raise DataError(f"corpus of {n} document(s) is too small to split")
    train_n = math.floor(n * spec.train_ratio)
    if train_n == 0 or train_n == n:
        raise DataError(
            f"ratio {spec.train_ratio} leaves an empty train or test set for N={n}")

    rng = random.Random(spec.seed)
    if spec.stratified:
        train_idx = _stratified_train_indices(corpus, spec.train_ratio,
                                              train_n, rng)
    else:
        order = list(range(n))
        rng.shuffle(order)
        train_idx = set(order[:train_n])

    train_docs = tuple(corpus.docs[i] for i in range(n) if i in train_idx)
    test_docs = tuple(corpus.docs[i] for i in range(n) if i not in train_idx)
    names = dict(corpus.label_names)
    return DataSplit(Corpus(train_docs, names), Corpus(test_docs, dict(names)))


def _stratified_train_indices(corpus, ratio, train_n, rng):
    by_class = {}
    for i, doc in enumerate(corpus.docs):
        by_class.setdefault(doc.label, []).append(i)

    # Per-class quota: floor(count * ratio), then hand out the shortfall
    # against floor(N * ratio) by largest fractional remainder.
    quotas = {}
    remainders = []
    for label in sorted(by_class):
        exact = len(by_class[label]) * ratio
        quotas[label] = math.floor(exact)
        remainders.append((-(exact - quotas[label]), label))
    shortfall = train_n - sum(quotas.values())
    remainders.sort()
    for _, label in remainders:
        if shortfall <= 0:
            break
        if quotas[label] < len(by_class[label]):
            quotas[label] += 1
            shortfall -= 1

    train_idx = set()
    for label in sorted(by_class):
        members = list(by_class[label])
        rng.shuffle(members)
        train_idx.update(members[:quotas[label]])
    return train_idx
