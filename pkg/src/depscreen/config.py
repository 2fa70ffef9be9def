"""Run configuration: every paper-unspecified knob, with strict parsing.

Unknown keys anywhere in the config tree are rejected so hyperparameter
typos fail loudly instead of silently falling back to defaults.
"""

from __future__ import annotations

import dataclasses
import json
import string
from dataclasses import dataclass, field, fields

from .errors import ConfigError

FEATURE_INPUTS = ("tfidf", "counts")


@dataclass(frozen=True)
class TextprepConfig:
    lowercase: bool = True
    strip_urls: bool = True
    strip_mentions_hashtags: bool = True
    allowed_chars: str = string.ascii_letters
    use_stopwords: bool = True
    use_stemming: bool = True
    stopword_file: str | None = None
    suffix_file: str | None = None


@dataclass(frozen=True)
class FeatureConfig:
    min_n: int = 1
    max_n: int = 3
    min_df: int = 1
    k: int | None = None  # None -> min(5000, vocabulary size)
    l2_normalize: bool = True


@dataclass(frozen=True)
class MnbConfig:
    alpha: float = 1.0
    input: str = "counts"


@dataclass(frozen=True)
class GnbConfig:
    eps_rel: float = 1e-9
    max_dense_cells: int = 50_000_000
    input: str = "tfidf"


@dataclass(frozen=True)
class LogregConfig:
    lr: float = 0.1
    l2: float = 1e-4
    epochs: int = 50
    batch_size: int = 32
    input: str = "tfidf"


@dataclass(frozen=True)
class SvmConfig:
    lam: float = 1e-4
    epochs: int = 50
    input: str = "tfidf"


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 32
    min_leaf: int = 1
    input: str = "tfidf"


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    bootstrap: bool = True
    features_per_split: str = "sqrt"
    max_depth: int = 32
    min_leaf: int = 1
    input: str = "tfidf"


@dataclass(frozen=True)
class NnConfig:
    lr: float = 1e-3
    epochs: int = 20
    batch_size: int = 32
    dropout_rate: float = 0.5
    hidden: int = 512
    input: str = "tfidf"


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    threshold: float = 0.5
    train_ratio: float = 0.8
    stratified: bool = True
    textprep: TextprepConfig = field(default_factory=TextprepConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    mnb: MnbConfig = field(default_factory=MnbConfig)
    gnb: GnbConfig = field(default_factory=GnbConfig)
    logreg: LogregConfig = field(default_factory=LogregConfig)
    svm: SvmConfig = field(default_factory=SvmConfig)
    tree: TreeConfig = field(default_factory=TreeConfig)
    forest: ForestConfig = field(default_factory=ForestConfig)
    nn: NnConfig = field(default_factory=NnConfig)

    def __post_init__(self):
        for name in ("mnb", "gnb", "logreg", "svm", "tree", "forest", "nn"):
            feed = getattr(self, name).input
            if feed not in FEATURE_INPUTS:
                raise ConfigError(
                    f"{name}.input must be one of {FEATURE_INPUTS}, got {feed!r}")

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        return _from_dict(cls, data, path="")

    @classmethod
    def from_json_file(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        return cls.from_dict(data)


def _from_dict(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(f"config section {path or '<root>'} must be an object")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        where = f"{path}." if path else ""
        raise ConfigError(f"unknown config key(s): "
                          + ", ".join(f"{where}{k}" for k in unknown))
    kwargs = {}
    for name in known:
        if name not in data:
            continue
        value = data[name]
        if name in _SECTION_TYPES:
            kwargs[name] = _from_dict(_SECTION_TYPES[name], value,
                                      f"{path}.{name}" if path else name)
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad config value in {path or '<root>'}: {exc}") from exc


_SECTION_TYPES = {
    "textprep": TextprepConfig,
    "features": FeatureConfig,
    "mnb": MnbConfig,
    "gnb": GnbConfig,
    "logreg": LogregConfig,
    "svm": SvmConfig,
    "tree": TreeConfig,
    "forest": ForestConfig,
    "nn": NnConfig,
}
