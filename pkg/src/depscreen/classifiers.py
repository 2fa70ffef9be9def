"""Classical supervised models sharing one fit/predict contract.

Every model consumes a SparseMatrix and 0/1 labels, fits
deterministically for a fixed seed, and exposes ``predict_score``
(probability of class 1 for the probabilistic models, raw margin for
the SVM, class-1 vote share for the ensemble) plus ``predict``.
Fitted models are immutable in practice: predict never mutates state,
and ``to_state``/``from_state`` round-trip all learned parameters.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError, DataError, NumericError
from .sparse import SparseMatrix

LOG_CLAMP = 1e-12


def _sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _bce(p, y):
    p = np.clip(p, LOG_CLAMP, 1.0 - LOG_CLAMP)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


def _check_y(y, n_rows, require_both=False):
    y = np.asarray(y, dtype=np.int64)
    if len(y) != n_rows:
        raise DataError(f"got {n_rows} rows but {len(y)} labels")
    if len(y) == 0:
        raise DataError("cannot fit on an empty dataset")
    if not np.all((y == 0) | (y == 1)):
        raise DataError("labels must be 0/1")
    if require_both and len(np.unique(y)) < 2:
        raise DataError("both classes are required for fitting")
    return y


def _as_sparse(X):
    if isinstance(X, SparseMatrix):
        return X
    return SparseMatrix.from_dense(np.asarray(X, dtype=np.float64))


class BinaryClassifier:
    """Shared predict contract; subclasses implement fit and scoring."""

    kind = ""
    #: default decision rule applied when no threshold is passed
    _score_is_margin = False

    @property
    def n_features(self):
        raise NotImplementedError

    def predict_score(self, X):
        raise NotImplementedError

    def predict(self, X, threshold=None):
        scores = self.predict_score(_as_sparse(X))
        if threshold is None:
            threshold = 0.0 if self._score_is_margin else 0.5
        return (scores >= threshold).astype(np.int64)

    def to_state(self):
        raise NotImplementedError


class MultinomialNb(BinaryClassifier):
    """Multinomial naive Bayes over term counts with Laplace smoothing."""

    kind = "mnb"

    def __init__(self, alpha=1.0):
        if alpha <= 0:
            raise ConfigError(f"smoothing alpha must be > 0, got {alpha}")
        self.alpha = float(alpha)
        self.class_log_prior = None
        self.feature_log_prob = None

    @property
    def n_features(self):
        return self.feature_log_prob.shape[1]

    def fit(self, X, y):
        X = _as_sparse(X)
        y = _check_y(y, X.n_rows)
        if len(X.data) and X.data.min() < 0:
            raise DataError("multinomial NB requires nonnegative counts")
        n = X.n_rows
        v = X.n_cols
        log_prior = np.empty(2)
        log_prob = np.empty((2, v))
        for c in (0, 1):
            rows = np.nonzero(y == c)[0]
            n_c = len(rows)
            log_prior[c] = math.log(n_c / n) if n_c else -np.inf
            term_counts = X.select_rows(rows).column_sums()
            denom = term_counts.sum() + self.alpha * v
            log_prob[c] = np.log((term_counts + self.alpha) / denom)
        self.class_log_prior = log_prior
        self.feature_log_prob = log_prob
        return self

    def _joint(self, X):
        return X.dot_dense(self.feature_log_prob.T) + self.class_log_prior

    def predict_proba(self, X):
        joint = self._joint(_as_sparse(X))
        joint -= joint.max(axis=1, keepdims=True)
        e = np.exp(joint)
        return e / e.sum(axis=1, keepdims=True)

    def predict_score(self, X):
        return self.predict_proba(X)[:, 1]

    def to_state(self):
        return {
            "alpha": self.alpha,
            "class_log_prior": self.class_log_prior.tolist(),
            "feature_log_prob": [row.tolist() for row in self.feature_log_prob],
        }

    @classmethod
    def from_state(cls, state):
        model = cls(alpha=state["alpha"])
        model.class_log_prior = np.array(state["class_log_prior"])
        model.feature_log_prob = np.array(state["feature_log_prob"])
        return model


class GaussianNb(BinaryClassifier):
    """Gaussian naive Bayes on densified features with a variance floor."""

    kind = "gnb"

    def __init__(self, eps_rel=1e-9, max_dense_cells=50_000_000):
        self.eps_rel = float(eps_rel)
        self.max_dense_cells = int(max_dense_cells)
        self.class_prior = None
        self.theta = None  # per-class means
        self.var = None    # floored per-class variances

    @property
    def n_features(self):
        return self.theta.shape[1]

    def fit(self, X, y):
        X = _as_sparse(X)
        y = _check_y(y, X.n_rows)
        dense = X.to_dense(max_cells=self.max_dense_cells)
        global_var = np.var(dense, axis=0)
        epsilon = self.eps_rel * global_var.max()
        if epsilon <= 0.0:
            epsilon = self.eps_rel
        prior = np.empty(2)
        theta = np.zeros((2, X.n_cols))
        var = np.full((2, X.n_cols), epsilon)
        for c in (0, 1):
            rows = dense[y == c]
            prior[c] = len(rows) / len(y)
            if len(rows):
                theta[c] = rows.mean(axis=0)
                var[c] = np.var(rows, axis=0) + epsilon
        self.class_prior = prior
        self.theta = theta
        self.var = var
        return self

    def _joint(self, dense):
        joint = np.empty((len(dense), 2))
        for c in (0, 1):
            log_prior = (math.log(self.class_prior[c])
                         if self.class_prior[c] > 0 else -np.inf)
            ll = -0.5 * np.sum(
                np.log(2.0 * np.pi * self.var[c])
                + (dense - self.theta[c]) ** 2 / self.var[c], axis=1)
            joint[:, c] = log_prior + ll
        return joint

    def predict_proba(self, X):
        dense = _as_sparse(X).to_dense(max_cells=self.max_dense_cells)
        joint = self._joint(dense)
        joint -= joint.max(axis=1, keepdims=True)
        e = np.exp(joint)
        return e / e.sum(axis=1, keepdims=True)

    def predict_score(self, X):
        return self.predict_proba(X)[:, 1]

    def to_state(self):
        return {
            "eps_rel": self.eps_rel,
            "max_dense_cells": self.max_dense_cells,
            "class_prior": self.class_prior.tolist(),
            "theta": [row.tolist() for row in self.theta],
            "var": [row.tolist() for row in self.var],
        }

    @classmethod
    def from_state(cls, state):
        model = cls(eps_rel=state["eps_rel"],
                    max_dense_cells=state["max_dense_cells"])
        model.class_prior = np.array(state["class_prior"])
        model.theta = np.array(state["theta"])
        model.var = np.array(state["var"])
        return model


class LogisticRegression(BinaryClassifier):
    """L2-regularized logistic regression by mini-batch gradient descent."""

    kind = "logreg"

    def __init__(self, lr=0.1, l2=1e-4, epochs=50, batch_size=32, seed=0):
        if lr <= 0:
            raise ConfigError(f"learning rate must be > 0, got {lr}")
        self.lr = float(lr)
        self.l2 = float(l2)
        self.epochs = int(epochs)
        self.batch_size = int(batch_size)
        self.seed = int(seed)
        self.weights = None
        self.bias = 0.0

    @property
    def n_features(self):
        return len(self.weights)

    def fit(self, X, y):
        X = _as_sparse(X)
        y = _check_y(y, X.n_rows)
        n = X.n_rows
        w = np.zeros(X.n_cols)
        b = 0.0
        rng = np.random.default_rng(self.seed)
        batch = min(self.batch_size, n)
        for epoch in range(1, self.epochs + 1):
            order = rng.permutation(n)
            losses = []
            for start in range(0, n, batch):
                idx = order[start:start + batch]
                Xb = X.select_rows(idx)
                yb = y[idx].astype(np.float64)
                p = _sigmoid(Xb.dot_dense(w) + b)
                losses.append(_bce(p, yb))
                err = (p - yb) / len(idx)
                w -= self.lr * (Xb.transpose_dot(err) + self.l2 * w)
                b -= self.lr * float(err.sum())
            loss = float(np.mean(losses))
            if not (np.isfinite(loss) and np.all(np.isfinite(w))
                    and np.isfinite(b)):
                raise NumericError(
                    f"logistic regression diverged at epoch {epoch} "
                    f"(loss={loss})")
        self.weights = w
        self.bias = b
        return self

    def predict_proba(self, X):
        p1 = self.predict_score(X)
        return np.column_stack([1.0 - p1, p1])

    def predict_score(self, X):
        X = _as_sparse(X)
        return _sigmoid(X.dot_dense(self.weights) + self.bias)

    def to_state(self):
        return {
            "lr": self.lr, "l2": self.l2, "epochs": self.epochs,
            "batch_size": self.batch_size, "seed": self.seed,
            "weights": self.weights.tolist(), "bias": self.bias,
        }

    @classmethod
    def from_state(cls, state):
        model = cls(lr=state["lr"], l2=state["l2"], epochs=state["epochs"],
                    batch_size=state["batch_size"], seed=state["seed"])
        model.weights = np.array(state["weights"])
        model.bias = float(state["bias"])
        return model


class LinearSvm(BinaryClassifier):
    """Linear SVM trained by per-sample subgradient descent with step
    1/(lambda * t) on lambda/2 ||w||^2 + mean hinge loss."""

    kind = "svm"
    _score_is_margin = True

    def __init__(self, lam=1e-4, epochs=50, seed=0):
        if lam <= 0:
            raise ConfigError(f"regularization lambda must be > 0, got {lam}")
        self.lam = float(lam)
        self.epochs = int(epochs)
        self.seed = int(seed)
        self.weights = None
        self.bias = 0.0

    @property
    def n_features(self):
        return len(self.weights)

    def fit(self, X, y):
        X = _as_sparse(X)
        y = _check_y(y, X.n_rows, require_both=True)
        y_pm = 2.0 * y - 1.0  # internal {-1,+1}; public labels stay {0,1}
        n = X.n_rows
        w = np.zeros(X.n_cols)
        b = 0.0
        rng = np.random.default_rng(self.seed)
        t = 1
        for epoch in range(1, self.epochs + 1):
            for i in rng.permutation(n):
                eta = 1.0 / (self.lam * t)
                cols, vals = X.row(i)
                margin = y_pm[i] * (float(vals @ w[cols]) + b)
                w *= 1.0 - eta * self.lam
                if margin < 1.0:
                    w[cols] += eta * y_pm[i] * vals
                    b += eta * y_pm[i]
                t += 1
            margins = y_pm * (X.dot_dense(w) + b)
            loss = (0.5 * self.lam * float(w @ w)
                    + float(np.mean(np.maximum(0.0, 1.0 - margins))))
            if not (np.isfinite(loss) and np.all(np.isfinite(w))
                    and np.isfinite(b)):
                raise NumericError(
                    f"linear SVM diverged at epoch {epoch} (loss={loss})")
        self.weights = w
        self.bias = b
        return self

    def predict_score(self, X):
        X = _as_sparse(X)
        return X.dot_dense(self.weights) + self.bias

    def to_state(self):
        return {
            "lam": self.lam, "epochs": self.epochs, "seed": self.seed,
            "weights": self.weights.tolist(), "bias": self.bias,
        }

    @classmethod
    def from_state(cls, state):
        model = cls(lam=state["lam"], epochs=state["epochs"],
                    seed=state["seed"])
        model.weights = np.array(state["weights"])
        model.bias = float(state["bias"])
        return model


# --- CART tree and bagged forest -------------------------------------------


def _gini(n0, n1):
    n = n0 + n1
    p0 = n0 / n
    p1 = n1 / n
    return 1.0 - p0 * p0 - p1 * p1


def _best_split(dense, y, rows, feature_ids, min_leaf):
    """Best (feature, threshold, decrease) over midpoints of sorted unique
    values; ties break toward the lower feature index, then threshold."""
    y_node = y[rows]
    n = len(rows)
    total1 = int(y_node.sum())
    total0 = n - total1
    parent = _gini(total0, total1)
    best = None
    for f in feature_ids:
        x = dense[rows, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        ys = y_node[order]
        distinct = xs[1:] != xs[:-1]
        if not distinct.any():
            continue
        pos = np.nonzero(distinct)[0] + 1  # left side takes xs[:pos]
        ones = np.cumsum(ys)
        n_l = pos.astype(np.float64)
        n1_l = ones[pos - 1].astype(np.float64)
        n0_l = n_l - n1_l
        n_r = n - n_l
        n1_r = total1 - n1_l
        n0_r = n_r - n1_r
        child = ((n_l - (n1_l ** 2 + n0_l ** 2) / n_l)
                 + (n_r - (n1_r ** 2 + n0_r ** 2) / n_r)) / n
        decrease = parent - child
        valid = (n_l >= min_leaf) & (n_r >= min_leaf) & (decrease > 0.0)
        if not valid.any():
            continue
        decrease = np.where(valid, decrease, -np.inf)
        at = int(np.argmax(decrease))  # first max -> lowest threshold
        if best is None or decrease[at] > best[2]:
            threshold = (xs[pos[at] - 1] + xs[pos[at]]) / 2.0
            best = (int(f), float(threshold), float(decrease[at]))
    return best


def _leaf(y_node):
    n1 = int(y_node.sum())
    n0 = len(y_node) - n1
    return {"class": 1 if n1 > n0 else 0, "dist": [n0, n1]}


def _grow_tree(dense, y, rows, depth, max_depth, min_leaf, feature_sampler):
    y_node = y[rows]
    if depth >= max_depth or len(np.unique(y_node)) == 1:
        return _leaf(y_node)
    split = _best_split(dense, y, rows, feature_sampler(), min_leaf)
    if split is None:
        return _leaf(y_node)
    f, threshold, _ = split
    left_mask = dense[rows, f] <= threshold
    left = rows[left_mask]
    right = rows[~left_mask]
    return {
        "feature": f,
        "threshold": threshold,
        "left": _grow_tree(dense, y, left, depth + 1, max_depth, min_leaf,
                           feature_sampler),
        "right": _grow_tree(dense, y, right, depth + 1, max_depth, min_leaf,
                            feature_sampler),
    }


def _tree_apply(node, row):
    while "feature" in node:
        node = node["left"] if row[node["feature"]] <= node["threshold"] else node["right"]
    return node


class DecisionTree(BinaryClassifier):
    """CART classifier: greedy Gini splits over sorted-value midpoints."""

    kind = "tree"

    def __init__(self, max_depth=32, min_leaf=1, max_dense_cells=50_000_000):
        if max_depth < 1:
            raise ConfigError(f"max_depth must be >= 1, got {max_depth}")
        self.max_depth = int(max_depth)
        self.min_leaf = int(min_leaf)
        self.max_dense_cells = int(max_dense_cells)
        self.root = None
        self._n_features = 0

    @property
    def n_features(self):
        return self._n_features

    def fit(self, X, y):
        X = _as_sparse(X)
        y = _check_y(y, X.n_rows)
        dense = X.to_dense(max_cells=self.max_dense_cells)
        all_features = np.arange(X.n_cols)
        self.root = _grow_tree(dense, y, np.arange(X.n_rows), 0,
                               self.max_depth, self.min_leaf,
                               lambda: all_features)
        self._n_features = X.n_cols
        return self

    def predict_score(self, X):
        dense = _as_sparse(X).to_dense(max_cells=self.max_dense_cells)
        out = np.empty(len(dense))
        for i, row in enumerate(dense):
            n0, n1 = _tree_apply(self.root, row)["dist"]
            out[i] = n1 / (n0 + n1)
        return out

    def predict(self, X, threshold=None):
        if threshold is not None:
            return super().predict(X, threshold)
        dense = _as_sparse(X).to_dense(max_cells=self.max_dense_cells)
        return np.array([_tree_apply(self.root, row)["class"]
                         for row in dense], dtype=np.int64)

    def to_state(self):
        return {
            "max_depth": self.max_depth, "min_leaf": self.min_leaf,
            "max_dense_cells": self.max_dense_cells,
            "n_features": self._n_features, "root": self.root,
        }

    @classmethod
    def from_state(cls, state):
        model = cls(max_depth=state["max_depth"], min_leaf=state["min_leaf"],
                    max_dense_cells=state["max_dense_cells"])
        model.root = state["root"]
        model._n_features = state["n_features"]
        return model


class RandomForest(BinaryClassifier):
    """Bagged CART trees with per-split feature subsampling and majority
    vote (ties go to class 0). Tree seeds derive as seed + tree index."""

    kind = "forest"

    def __init__(self, n_trees=100, bootstrap=True, features_per_split="sqrt",
                 max_depth=32, min_leaf=1, seed=0,
                 max_dense_cells=50_000_000):
        if n_trees < 1:
            raise ConfigError(f"n_trees must be >= 1, got {n_trees}")
        if features_per_split not in ("sqrt", "all"):
            raise ConfigError(
                f"features_per_split must be 'sqrt' or 'all', "
                f"got {features_per_split!r}")
        self.n_trees = int(n_trees)
        self.bootstrap = bool(bootstrap)
        self.features_per_split = features_per_split
        self.max_depth = int(max_depth)
        self.min_leaf = int(min_leaf)
        self.seed = int(seed)
        self.max_dense_cells = int(max_dense_cells)
        self.trees = None
        self._n_features = 0

    @property
    def n_features(self):
        return self._n_features

    def fit(self, X, y):
        X = _as_sparse(X)
        y = _check_y(y, X.n_rows)
        dense = X.to_dense(max_cells=self.max_dense_cells)
        n, f = dense.shape
        all_features = np.arange(f)
        m = max(1, int(math.sqrt(f)))
        trees = []
        for t in range(self.n_trees):
            rng = np.random.default_rng(self.seed + t)
            rows = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            if self.features_per_split == "sqrt":
                sampler = lambda: np.sort(rng.choice(f, size=m, replace=False))
            else:
                sampler = lambda: all_features
            trees.append(_grow_tree(dense, y, rows, 0, self.max_depth,
                                    self.min_leaf, sampler))
        self.trees = trees
        self._n_features = f
        return self

    def _votes(self, dense):
        votes = np.zeros(len(dense), dtype=np.int64)
        for tree in self.trees:
            votes += np.array([_tree_apply(tree, row)["class"]
                               for row in dense])
        return votes

    def predict_score(self, X):
        dense = _as_sparse(X).to_dense(max_cells=self.max_dense_cells)
        return self._votes(dense) / self.n_trees

    def predict(self, X, threshold=None):
        if threshold is not None:
            return super().predict(X, threshold)
        dense = _as_sparse(X).to_dense(max_cells=self.max_dense_cells)
        votes = self._votes(dense)
        return (votes * 2 > self.n_trees).astype(np.int64)

    def to_state(self):
        return {
            "n_trees": self.n_trees, "bootstrap": self.bootstrap,
            "features_per_split": self.features_per_split,
            "max_depth": self.max_depth, "min_leaf": self.min_leaf,
            "seed": self.seed, "max_dense_cells": self.max_dense_cells,
            "n_features": self._n_features, "trees": self.trees,
        }

    @classmethod
    def from_state(cls, state):
        model = cls(n_trees=state["n_trees"], bootstrap=state["bootstrap"],
                    features_per_split=state["features_per_split"],
                    max_depth=state["max_depth"], min_leaf=state["min_leaf"],
                    seed=state["seed"],
                    max_dense_cells=state["max_dense_cells"])
        model.trees = state["trees"]
        model._n_features = state["n_features"]
        return model
