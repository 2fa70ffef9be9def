"""End-to-end pipeline: preprocessing -> vocabulary -> TF-IDF -> chi-square
selection -> classifier, persisted as one versioned JSON artifact.

The chi-square selector is fitted on the TF-IDF matrix; the count matrix
(multinomial NB input) is projected through the same selector so every
model sees the same retained feature set.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import classifiers, neural, textprep, vectorize
from .config import RunConfig
from .corpus import LABEL_NAMES
from .errors import ConfigError, DataError, DepscreenError
from .vectorize import Chi2Selector, NgramSpec, TfidfWeights, Vocabulary

FORMAT_VERSION = 1

MODEL_KINDS = ("mnb", "gnb", "logreg", "svm", "tree", "forest", "nn")

_MODEL_CLASSES = {
    "mnb": classifiers.MultinomialNb,
    "gnb": classifiers.GaussianNb,
    "logreg": classifiers.LogisticRegression,
    "svm": classifiers.LinearSvm,
    "tree": classifiers.DecisionTree,
    "forest": classifiers.RandomForest,
    "nn": neural.NeuralNetClassifier,
}


def build_model(kind, config):
    """Fresh unfitted model of the given kind, wired to the run config."""
    if kind not in MODEL_KINDS:
        raise ConfigError(f"unknown model kind {kind!r}; "
                          f"choose from {', '.join(MODEL_KINDS)}")
    if kind == "mnb":
        return classifiers.MultinomialNb(alpha=config.mnb.alpha)
    if kind == "gnb":
        return classifiers.GaussianNb(
            eps_rel=config.gnb.eps_rel,
            max_dense_cells=config.gnb.max_dense_cells)
    if kind == "logreg":
        c = config.logreg
        return classifiers.LogisticRegression(
            lr=c.lr, l2=c.l2, epochs=c.epochs, batch_size=c.batch_size,
            seed=config.seed)
    if kind == "svm":
        return classifiers.LinearSvm(lam=config.svm.lam,
                                     epochs=config.svm.epochs,
                                     seed=config.seed)
    if kind == "tree":
        return classifiers.DecisionTree(max_depth=config.tree.max_depth,
                                        min_leaf=config.tree.min_leaf)
    if kind == "forest":
        c = config.forest
        return classifiers.RandomForest(
            n_trees=c.n_trees, bootstrap=c.bootstrap,
            features_per_split=c.features_per_split, max_depth=c.max_depth,
            min_leaf=c.min_leaf, seed=config.seed)
    c = config.nn
    return neural.NeuralNetClassifier(neural.TrainConfig(
        lr=c.lr, epochs=c.epochs, batch_size=c.batch_size,
        dropout_rate=c.dropout_rate, hidden=c.hidden, seed=config.seed,
        threshold=config.threshold))


def model_input(kind, config):
    return getattr(config, kind).input


@contextmanager
def _stage(name):
    """Attach the failing stage name to toolkit errors."""
    try:
        yield
    except DepscreenError as exc:
        if str(exc).startswith("["):
            raise
        raise type(exc)(f"[{name}] {exc}") from exc


@dataclass
class FeatureChain:
    """Frozen preprocessing + vectorization state shared by all models."""

    config: RunConfig
    stopwords: textprep.StopwordList | None
    suffixes: textprep.SuffixRuleTable | None
    vocab: Vocabulary
    weights: TfidfWeights
    selector: Chi2Selector

    def tokenize(self, texts):
        prep = self.config.textprep
        clean_cfg = textprep.CleanConfig(
            lowercase=prep.lowercase, strip_urls=prep.strip_urls,
            strip_mentions_hashtags=prep.strip_mentions_hashtags,
            allowed_chars=prep.allowed_chars)
        return [textprep.preprocess(t, clean_cfg, self.stopwords,
                                    self.suffixes) for t in texts]

    def transform(self, texts, input_kind):
        """Projected count or TF-IDF matrix for raw texts."""
        docs = self.tokenize(texts)
        counts = vectorize.count_transform(docs, self.vocab)
        if input_kind == "tfidf":
            X = vectorize.tfidf_transform(counts, self.weights)
        else:
            X = counts
        return vectorize.project(X, self.selector)


def _load_wordlists(config):
    prep = config.textprep
    stopwords = None
    suffixes = None
    if prep.use_stopwords:
        stopwords = (textprep.load_stopwords(prep.stopword_file)
                     if prep.stopword_file else textprep.default_stopwords())
    if prep.use_stemming:
        suffixes = (textprep.load_suffix_rules(prep.suffix_file)
                    if prep.suffix_file else textprep.default_suffix_rules())
    return stopwords, suffixes


def fit_chain(train_corpus, config):
    """Fit the shared feature chain on training texts + labels."""
    with _stage("textprep"):
        stopwords, suffixes = _load_wordlists(config)
    chain = FeatureChain(config=config, stopwords=stopwords,
                         suffixes=suffixes, vocab=None, weights=None,
                         selector=None)
    feat = config.features
    with _stage("vocabulary"):
        docs = chain.tokenize(train_corpus.texts())
        spec = NgramSpec(min_n=feat.min_n, max_n=feat.max_n,
                         min_df=feat.min_df)
        chain.vocab = vectorize.build_vocab(docs, spec)
    with _stage("tfidf"):
        counts = vectorize.count_transform(docs, chain.vocab)
        chain.weights = vectorize.fit_idf(counts,
                                          l2_normalize=feat.l2_normalize)
        tfidf = vectorize.tfidf_transform(counts, chain.weights)
    with _stage("chi2"):
        y = np.asarray(train_corpus.labels())
        scores = vectorize.chi2_scores(tfidf, y)
    with _stage("select"):
        k = feat.k if feat.k is not None else min(5000, len(chain.vocab))
        chain.selector = vectorize.select_k_best(scores, k)
    return chain, counts, tfidf, y


@dataclass
class PipelineArtifact:
    """Everything needed to reproduce predictions: the frozen feature
    chain plus one fitted model."""

    chain: FeatureChain
    model: object
    model_kind: str
    model_input: str
    threshold: float
    label_names: dict
    format_version: int = FORMAT_VERSION

    def features(self, texts):
        return self.chain.transform(texts, self.model_input)

    def predict(self, texts, threshold=None):
        """Labels, scores and out-of-vocabulary flags for raw texts."""
        X = self.features(texts)
        t = self.threshold if threshold is None else threshold
        # 0.5 is the universal default: margin/vote models keep their own
        # decision rule there (sign for SVM, majority for the ensemble).
        labels = self.model.predict(X, None if t == 0.5 else t)
        scores = self.model.predict_score(X)
        oov = X.row_nnz() == 0
        return labels, scores, oov


def fit_pipeline(train_corpus, config, kind):
    """Fit chain + model; any stage failure carries the stage name."""
    if kind not in MODEL_KINDS:
        raise ConfigError(f"unknown model kind {kind!r}; "
                          f"choose from {', '.join(MODEL_KINDS)}")
    counts_present = {d.label for d in train_corpus.docs}
    if counts_present != {0, 1}:
        raise DataError("training corpus must contain both classes")
    chain, counts, tfidf, y = fit_chain(train_corpus, config)
    feed = model_input(kind, config)
    X = vectorize.project(tfidf if feed == "tfidf" else counts,
                          chain.selector)
    with _stage(f"fit:{kind}"):
        model = build_model(kind, config).fit(X, y)
    return PipelineArtifact(
        chain=chain, model=model, model_kind=kind, model_input=feed,
        threshold=config.threshold,
        label_names=dict(train_corpus.label_names or LABEL_NAMES))


def predict_one(artifact, text):
    """Apply the frozen chain to one raw text."""
    labels, scores, oov = artifact.predict([text])
    label = int(labels[0])
    return {
        "label": label,
        "score": float(scores[0]),
        "label_name": artifact.label_names[label],
        "oov": bool(oov[0]),
    }


# --- persistence ------------------------------------------------------------


def artifact_to_dict(artifact):
    chain = artifact.chain
    return {
        "format_version": artifact.format_version,
        "config": chain.config.to_dict(),
        "model_kind": artifact.model_kind,
        "model_input": artifact.model_input,
        "threshold": artifact.threshold,
        "label_names": {str(k): v for k, v in artifact.label_names.items()},
        "stopwords": (sorted(chain.stopwords.words)
                      if chain.stopwords is not None else None),
        "suffix_rules": ([[r.suffix, r.min_stem_len] for r in chain.suffixes.rules]
                         if chain.suffixes is not None else None),
        "vocabulary": {"terms": list(chain.vocab.terms),
                       "df": list(chain.vocab.df)},
        "idf": chain.weights.idf.tolist(),
        "l2_normalize": chain.weights.l2_normalize,
        "selector": {"scores": chain.selector.scores.tolist(),
                     "selected": chain.selector.selected.tolist(),
                     "k": chain.selector.k},
        "model": artifact.model.to_state(),
    }


def save(artifact, path):
    payload = json.dumps(artifact_to_dict(artifact), ensure_ascii=False)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(payload)


def _require(doc, key, types, context="artifact"):
    if key not in doc:
        raise DataError(f"{context}: missing field '{key}'")
    value = doc[key]
    if types is not None and not isinstance(value, types):
        raise DataError(f"{context}: field '{key}' has wrong type "
                        f"{type(value).__name__}")
    return value


def artifact_from_dict(doc):
    if not isinstance(doc, dict):
        raise DataError("artifact: top level must be a JSON object")
    version = _require(doc, "format_version", int)
    if version != FORMAT_VERSION:
        raise DataError(f"artifact: unsupported format_version {version} "
                        f"(this build reads version {FORMAT_VERSION})")
    config = RunConfig.from_dict(_require(doc, "config", dict))
    kind = _require(doc, "model_kind", str)
    if kind not in MODEL_KINDS:
        raise DataError(f"artifact: unknown model_kind {kind!r}")
    feed = _require(doc, "model_input", str)
    if feed not in ("tfidf", "counts"):
        raise DataError(f"artifact: field 'model_input' must be tfidf or "
                        f"counts, got {feed!r}")
    threshold = _require(doc, "threshold", (int, float))
    try:
        label_names = {int(k): str(v)
                       for k, v in _require(doc, "label_names", dict).items()}
    except ValueError as exc:
        raise DataError(f"artifact: field 'label_names' has non-integer "
                        f"key: {exc}") from exc
    if set(label_names) != {0, 1}:
        raise DataError("artifact: field 'label_names' must name labels "
                        "0 and 1")

    raw_stop = _require(doc, "stopwords", (list, type(None)))
    stopwords = (textprep.StopwordList(frozenset(raw_stop))
                 if raw_stop is not None else None)
    raw_rules = _require(doc, "suffix_rules", (list, type(None)))
    suffixes = None
    if raw_rules is not None:
        suffixes = textprep.SuffixRuleTable(tuple(
            textprep.SuffixRule(str(s), int(m)) for s, m in raw_rules))

    vocab_doc = _require(doc, "vocabulary", dict)
    terms = _require(vocab_doc, "terms", list, "artifact.vocabulary")
    df = _require(vocab_doc, "df", list, "artifact.vocabulary")
    if len(terms) != len(df):
        raise DataError("artifact.vocabulary: terms and df lengths differ")
    feat = config.features
    vocab = Vocabulary(tuple(terms), tuple(df),
                       NgramSpec(feat.min_n, feat.max_n, feat.min_df))

    idf = np.array(_require(doc, "idf", list), dtype=np.float64)
    if len(idf) != len(terms):
        raise DataError(f"artifact: idf has {len(idf)} entries for "
                        f"{len(terms)} vocabulary terms")
    weights = TfidfWeights(idf=idf,
                           l2_normalize=_require(doc, "l2_normalize", bool))

    sel_doc = _require(doc, "selector", dict)
    scores = np.array(_require(sel_doc, "scores", list, "artifact.selector"))
    selected = np.array(_require(sel_doc, "selected", list,
                                 "artifact.selector"), dtype=np.int64)
    if len(scores) != len(terms):
        raise DataError("artifact.selector: scores length does not match "
                        "the vocabulary")
    if len(selected) and (selected.min() < 0 or selected.max() >= len(terms)):
        raise DataError("artifact.selector: selected column out of range")
    if len(selected) > 1 and np.any(np.diff(selected) <= 0):
        raise DataError("artifact.selector: selected columns must be "
                        "strictly ascending")
    selector = Chi2Selector(scores=scores, selected=selected,
                            k=_require(sel_doc, "k", int, "artifact.selector"))

    model_doc = _require(doc, "model", dict)
    try:
        model = _MODEL_CLASSES[kind].from_state(model_doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"artifact.model: bad state for kind {kind!r}: {exc}")
    if model.n_features != len(selected):
        raise DataError(
            f"artifact: model expects {model.n_features} features but the "
            f"selector retains {len(selected)}")

    chain = FeatureChain(config=config, stopwords=stopwords,
                         suffixes=suffixes, vocab=vocab, weights=weights,
                         selector=selector)
    return PipelineArtifact(chain=chain, model=model, model_kind=kind,
                            model_input=feed, threshold=float(threshold),
                            label_names=label_names, format_version=version)


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot open artifact {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"artifact {path} is not valid JSON: {exc}") from exc
    return artifact_from_dict(doc)
