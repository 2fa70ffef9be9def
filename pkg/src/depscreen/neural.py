"""Feed-forward net: dense(512, relu) -> dropout -> dense(1, sigmoid).

Trained with mean binary cross-entropy and a hand-rolled Adam optimizer.
Dropout is inverted (kept units scaled by 1/(1-rate) at train time) so
inference needs no rescaling. ``gradient_check`` verifies the analytic
backward pass against central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, NumericError
from .sparse import SparseMatrix

LOG_CLAMP = 1e-12
DEFAULT_HIDDEN = 512

BLOCKS = ("W1", "b1", "W2", "b2")


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class MlpParams:
    W1: np.ndarray  # (hidden, k)
    b1: np.ndarray  # (hidden,)
    W2: np.ndarray  # (hidden,)
    b2: float

    @property
    def hidden(self):
        return self.W1.shape[0]

    @property
    def input_dim(self):
        return self.W1.shape[1]

    def copy(self):
        return MlpParams(self.W1.copy(), self.b1.copy(), self.W2.copy(),
                         float(self.b2))

    def blocks(self):
        return {"W1": self.W1, "b1": self.b1, "W2": self.W2,
                "b2": np.array([self.b2])}


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 20
    batch_size: int = 32
    dropout_rate: float = 0.5
    seed: int = 0
    threshold: float = 0.5
    hidden: int = DEFAULT_HIDDEN

    def __post_init__(self):
        if self.lr <= 0:
            raise ConfigError(f"learning rate must be > 0, got {self.lr}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError("beta1/beta2 must lie in [0, 1)")
        if not 0 <= self.dropout_rate < 1:
            raise ConfigError(
                f"dropout_rate must be in [0, 1), got {self.dropout_rate}")


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    t: int = 0

    @classmethod
    def for_params(cls, params):
        blocks = params.blocks()
        return cls(m={k: np.zeros_like(v) for k, v in blocks.items()},
                   v={k: np.zeros_like(v) for k, v in blocks.items()},
                   t=0)


def init_params(k, seed, hidden=DEFAULT_HIDDEN):
    """He-style init: W ~ N(0, 2/fan_in), biases zero."""
    if k < 1:
        raise ConfigError(f"input dimension must be >= 1, got {k}")
    rng = np.random.default_rng(seed)
    W1 = rng.standard_normal((hidden, k)) * np.sqrt(2.0 / k)
    W2 = rng.standard_normal(hidden) * np.sqrt(2.0 / hidden)
    return MlpParams(W1=W1, b1=np.zeros(hidden), W2=W2, b2=0.0)


def _as_batch(X):
    if isinstance(X, SparseMatrix):
        return X.to_dense()
    X = np.asarray(X, dtype=np.float64)
    return X[None, :] if X.ndim == 1 else X


def forward(params, X, train=False, dropout_rate=0.0, rng=None):
    """Probabilities in (0,1) plus the cache needed by backward.

    Train mode applies an inverted dropout mask to the hidden layer;
    inference uses no mask and no scaling.
    """
    X = _as_batch(X)
    if X.shape[1] != params.input_dim:
        raise DataError(f"expected {params.input_dim} features, "
                        f"got {X.shape[1]}")
    z1 = X @ params.W1.T + params.b1
    h = np.maximum(0.0, z1)
    if train and dropout_rate > 0.0:
        if rng is None:
            raise ConfigError("train-mode dropout needs an rng")
        mask = (rng.random(h.shape) >= dropout_rate) / (1.0 - dropout_rate)
        h = h * mask
    else:
        mask = None
    p = sigmoid(h @ params.W2 + params.b2)
    cache = {"X": X, "z1": z1, "h": h, "mask": mask}
    return p, cache


def bce_loss(p, y):
    """Mean binary cross-entropy with probabilities clamped at 1e-12."""
    p = np.clip(np.asarray(p, dtype=np.float64), LOG_CLAMP, 1.0 - LOG_CLAMP)
    y = np.asarray(y, dtype=np.float64)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


def backward(params, p, y, cache):
    """Analytic gradients of mean BCE w.r.t. all four parameter blocks."""
    X = cache["X"]
    n = len(X)
    dlogit = (p - np.asarray(y, dtype=np.float64)) / n  # sigmoid+BCE identity
    dW2 = cache["h"].T @ dlogit
    db2 = float(dlogit.sum())
    dh = np.outer(dlogit, params.W2)
    if cache["mask"] is not None:
        dh = dh * cache["mask"]
    dz1 = dh * (cache["z1"] > 0.0)
    dW1 = dz1.T @ X
    db1 = dz1.sum(axis=0)
    return {"W1": dW1, "b1": db1, "W2": dW2, "b2": np.array([db2])}


def adam_step(params, grads, state, config):
    """One Adam update; mutates params and state in place."""
    for g in grads.values():
        if not np.all(np.isfinite(g)):
            raise NumericError("non-finite gradient passed to the optimizer")
    state.t += 1
    bc1 = 1.0 - config.beta1 ** state.t
    bc2 = 1.0 - config.beta2 ** state.t
    blocks = params.blocks()
    for name in BLOCKS:
        g = grads[name]
        state.m[name] = config.beta1 * state.m[name] + (1 - config.beta1) * g
        state.v[name] = config.beta2 * state.v[name] + (1 - config.beta2) * g * g
        m_hat = state.m[name] / bc1
        v_hat = state.v[name] / bc2
        update = config.lr * m_hat / (np.sqrt(v_hat) + config.eps)
        if name == "b2":
            params.b2 = float(params.b2 - update[0])
        else:
            blocks[name] -= update
    return params, state


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    loss: float
    accuracy: float


def train(X, y, config=TrainConfig(), params=None):
    """Train on seeded shuffled mini-batches; returns (params, history)."""
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0] if isinstance(X, SparseMatrix) else len(X)
    if len(y) != n:
        raise DataError(f"got {n} rows but {len(y)} labels")
    if config.epochs > 0 and n < config.batch_size:
        raise DataError(
            f"need at least batch_size={config.batch_size} rows, got {n}")
    k = X.shape[1] if isinstance(X, SparseMatrix) else X.shape[1]
    rng = np.random.default_rng(config.seed)
    if params is None:
        params = init_params(k, config.seed, hidden=config.hidden)
    state = AdamState.for_params(params)
    history = []
    sparse = isinstance(X, SparseMatrix)
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        losses = []
        try:
            for start in range(0, n, config.batch_size):
                idx = order[start:start + config.batch_size]
                Xb = X.select_rows(idx).to_dense() if sparse else X[idx]
                yb = y[idx]
                p, cache = forward(params, Xb, train=True,
                                   dropout_rate=config.dropout_rate, rng=rng)
                losses.append(bce_loss(p, yb))
                grads = backward(params, p, yb, cache)
                adam_step(params, grads, state, config)
        except NumericError as exc:
            raise NumericError(f"training diverged at epoch {epoch}: "
                               f"{exc}") from exc
        loss = float(np.mean(losses))
        finite = (np.isfinite(loss)
                  and all(np.all(np.isfinite(b)) for b in params.blocks().values()))
        if not finite:
            raise NumericError(f"training diverged at epoch {epoch} "
                               f"(loss={loss})")
        acc = float(np.mean(predict(params, X, config.threshold)
                            == y.astype(np.int64)))
        history.append(EpochStats(epoch=epoch, loss=loss, accuracy=acc))
    return params, history


def predict_score(params, X):
    p, _ = forward(params, X, train=False)
    return p


def predict(params, X, threshold=0.5):
    return (predict_score(params, X) >= threshold).astype(np.int64)


def gradient_check(params, X, y, delta=1e-5, coords_per_block=200, seed=0,
                   grad_fn=None):
    """Max relative error between analytic and central-difference gradients.

    Dropout is disabled. ``grad_fn`` can replace the analytic gradient
    computation (used to prove the harness catches corrupted gradients).
    """
    if not 1e-6 <= delta <= 1e-4:
        raise ConfigError(f"delta must lie in [1e-6, 1e-4], got {delta}")
    X = _as_batch(X if not isinstance(X, SparseMatrix) else X.to_dense())
    y = np.asarray(y, dtype=np.float64)
    if grad_fn is None:
        def grad_fn(pr):
            p, cache = forward(pr, X, train=False)
            return backward(pr, p, y, cache)

    work = params.copy()
    analytic = grad_fn(work)
    rng = np.random.default_rng(seed)
    blocks = work.blocks()
    worst = 0.0
    for name in BLOCKS:
        block = blocks[name]
        flat = block.reshape(-1)
        size = flat.size
        count = min(coords_per_block, size)
        coords = rng.choice(size, size=count, replace=False)
        a_flat = analytic[name].reshape(-1)
        for c in coords:
            original = flat[c]
            flat[c] = original + delta
            if name == "b2":
                work.b2 = float(flat[c])
            loss_plus = bce_loss(forward(work, X, train=False)[0], y)
            flat[c] = original - delta
            if name == "b2":
                work.b2 = float(flat[c])
            loss_minus = bce_loss(forward(work, X, train=False)[0], y)
            flat[c] = original
            if name == "b2":
                work.b2 = float(original)
            numeric = (loss_plus - loss_minus) / (2.0 * delta)
            a = float(a_flat[c])
            rel = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
            worst = max(worst, rel)
    return worst


# --- pipeline adapter -------------------------------------------------------


class NeuralNetClassifier:
    """Fit/predict wrapper so the net plugs into the shared model contract."""

    kind = "nn"
    _score_is_margin = False

    def __init__(self, config=TrainConfig()):
        self.config = config
        self.params = None
        self.history = []

    @property
    def n_features(self):
        return self.params.input_dim

    def fit(self, X, y):
        self.params, self.history = train(X, y, self.config)
        return self

    def predict_score(self, X):
        return predict_score(self.params, X)

    def predict(self, X, threshold=None):
        if threshold is None:
            threshold = self.config.threshold
        return predict(self.params, X, threshold)

    def to_state(self):
        cfg = self.config
        return {
            "config": {
                "lr": cfg.lr, "beta1": cfg.beta1, "beta2": cfg.beta2,
                "eps": cfg.eps, "epochs": cfg.epochs,
                "batch_size": cfg.batch_size,
                "dropout_rate": cfg.dropout_rate, "seed": cfg.seed,
                "threshold": cfg.threshold, "hidden": cfg.hidden,
            },
            "W1": [row.tolist() for row in self.params.W1],
            "b1": self.params.b1.tolist(),
            "W2": self.params.W2.tolist(),
            "b2": self.params.b2,
        }

    @classmethod
    def from_state(cls, state):
        model = cls(TrainConfig(**state["config"]))
        model.params = MlpParams(
            W1=np.array(state["W1"]), b1=np.array(state["b1"]),
            W2=np.array(state["W2"]), b2=float(state["b2"]))
        return model
