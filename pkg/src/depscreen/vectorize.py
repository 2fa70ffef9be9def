"""N-gram vocabulary, count/TF-IDF matrices and chi-square selection.

IDF uses the smoothed convention idf(t) = ln((1+N)/(1+df(t))) + 1 with
optional L2 row normalization. Chi-square scores compare per-class
feature mass against the class-independent expectation; the top-k
columns are kept with ties broken toward the lower column index.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError
from .sparse import SparseMatrix


@dataclass(frozen=True)
class NgramSpec:
    min_n: int = 1
    max_n: int = 3
    min_df: int = 1

    def __post_init__(self):
        if not 1 <= self.min_n <= self.max_n <= 3:
            raise ConfigError(
                f"need 1 <= min_n <= max_n <= 3, got {self.min_n}..{self.max_n}")
        if self.min_df < 1:
            raise ConfigError(f"min_df must be >= 1, got {self.min_df}")


@dataclass(frozen=True)
class Vocabulary:
    """Lexicographically sorted n-gram terms with document frequencies."""

    terms: tuple
    df: tuple
    ngram: NgramSpec
    index: dict = field(repr=False, default=None)

    def __post_init__(self):
        if self.index is None:
            object.__setattr__(self, "index",
                               {t: i for i, t in enumerate(self.terms)})

    def __len__(self):
        return len(self.terms)


@dataclass(frozen=True)
class TfidfWeights:
    idf: np.ndarray
    l2_normalize: bool = True


@dataclass(frozen=True)
class Chi2Selector:
    scores: np.ndarray
    selected: np.ndarray  # ascending column indices
    k: int


def _ngrams(tokens, spec):
    for n in range(spec.min_n, spec.max_n + 1):
        for i in range(len(tokens) - n + 1):
            yield " ".join(tokens[i:i + n])


def build_vocab(docs, spec=NgramSpec()):
    """Collect every n-gram with document frequency >= min_df."""
    if not docs:
        raise DataError("cannot build a vocabulary from zero documents")
    df = Counter()
    for tokens in docs:
        df.update(set(_ngrams(tokens, spec)))
    terms = sorted(t for t, c in df.items() if c >= spec.min_df)
    if not terms:
        raise DataError(
            f"empty vocabulary after min_df={spec.min_df} filtering")
    return Vocabulary(tuple(terms), tuple(df[t] for t in terms), spec)


def count_transform(docs, vocab):
    """Document-term occurrence counts; out-of-vocabulary n-grams ignored."""
    index = vocab.index
    rows = []
    for tokens in docs:
        counts = Counter(_ngrams(tokens, vocab.ngram))
        rows.append({index[t]: float(c) for t, c in counts.items()
                     if t in index})
    return SparseMatrix.from_rows(rows, len(vocab))


def fit_idf(counts, l2_normalize=True):
    """Smoothed IDF from a count matrix: ln((1+N)/(1+df)) + 1."""
    if counts.n_rows < 1:
        raise DataError("fit_idf needs at least one document")
    df = counts.column_nnz()
    idf = np.log((1.0 + counts.n_rows) / (1.0 + df)) + 1.0
    return TfidfWeights(idf=idf, l2_normalize=l2_normalize)


def tfidf_transform(counts, weights):
    if counts.n_cols != len(weights.idf):
        raise DataError(
            f"count matrix has {counts.n_cols} columns but idf has "
            f"{len(weights.idf)} entries")
    out = counts.scale_columns(weights.idf)
    if weights.l2_normalize:
        out = out.normalize_rows_l2()
    return out


def chi2_scores(X, y):
    """Per-column chi-square statistic of feature mass vs. class.

    For column t with per-class observed mass O_c and expectation
    E_c = total * P(c): score = sum_c (O_c - E_c)^2 / E_c. Columns with
    zero total mass score 0.
    """
    y = np.asarray(y)
    if len(y) != X.n_rows:
        raise DataError("X and y disagree on the number of rows")
    if not np.all((y == 0) | (y == 1)):
        raise DataError("labels must be 0/1")
    if len(np.unique(y)) < 2:
        raise DataError("chi-square needs both classes present")
    if len(X.data) and X.data.min() < 0:
        raise DataError("chi-square requires nonnegative feature values")

    n = X.n_rows
    rows1 = np.nonzero(y == 1)[0]
    observed1 = X.select_rows(rows1).column_sums()
    total = X.column_sums()
    observed0 = total - observed1
    p1 = len(rows1) / n
    expected1 = total * p1
    expected0 = total * (1.0 - p1)

    scores = np.zeros(X.n_cols)
    nz = total > 0
    scores[nz] = ((observed0[nz] - expected0[nz]) ** 2 / expected0[nz]
                  + (observed1[nz] - expected1[nz]) ** 2 / expected1[nz])
    return scores


def select_k_best(scores, k):
    """Keep the k highest-scoring columns (ties to the lower index)."""
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    scores = np.asarray(scores, dtype=np.float64)
    k_eff = min(k, len(scores))
    order = np.lexsort((np.arange(len(scores)), -scores))
    selected = np.sort(order[:k_eff])
    return Chi2Selector(scores=scores, selected=selected, k=k_eff)


def project(X, selector):
    """Drop unselected columns, preserving the order of the survivors."""
    if X.n_cols != len(selector.scores):
        raise DataError(
            f"matrix has {X.n_cols} columns but selector was fitted on "
            f"{len(selector.scores)}")
    return X.select_columns(selector.selected)
