"""Depression-screening text classification for Romanized Sinhala posts.

Preprocessing, n-gram TF-IDF features, chi-square selection, seven
classifiers (multinomial/Gaussian NB, logistic regression, linear SVM,
CART tree, random forest, feed-forward net) and a benchmark harness,
exposed as a library, a CLI and a FastAPI service.
"""

__version__ = "0.1.0"

from .config import RunConfig
from .corpus import Corpus, LabeledDocument, SplitSpec, load_csv, split
from .errors import ConfigError, DataError, DepscreenError, NumericError
from .pipeline import (MODEL_KINDS, PipelineArtifact, fit_pipeline, load,
                       predict_one, save)

__all__ = [
    "Corpus", "LabeledDocument", "SplitSpec", "RunConfig",
    "PipelineArtifact", "MODEL_KINDS",
    "load_csv", "split", "fit_pipeline", "predict_one", "save", "load",
    "DepscreenError", "ConfigError", "DataError", "NumericError",
    "__version__",
]
