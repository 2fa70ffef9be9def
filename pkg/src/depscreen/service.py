"""FastAPI service wrapping the pipeline.

Trained artifacts live in an in-process registry keyed by model_id;
upload/download endpoints move the same versioned JSON the CLI writes.
Run with: uvicorn depscreen.service:app
"""

from __future__ import annotations

import uuid

import uvicorn
from fastapi import FastAPI, HTTPException

from . import evaluation, neural, pipeline, schemas
from .config import RunConfig
from .corpus import Corpus, LabeledDocument, SplitSpec, split
from .errors import ConfigError, DepscreenError, NumericError
from .cli import GRADCHECK_BAR

import numpy as np


def _to_corpus(documents):
    docs = []
    for i, d in enumerate(documents):
        text = d.text.strip()
        if not text:
            raise HTTPException(status_code=422,
                                detail=f"documents[{i}].text is blank")
        docs.append(LabeledDocument(text, d.label))
    return Corpus(tuple(docs))


def _http_error(exc):
    if isinstance(exc, ConfigError):
        return HTTPException(status_code=400, detail=str(exc))
    if isinstance(exc, NumericError):
        return HTTPException(status_code=500, detail=str(exc))
    return HTTPException(status_code=422, detail=str(exc))


def _report_out(report):
    doc = report.to_dict()
    return schemas.EvalReportOut(**doc)


def create_app():
    app = FastAPI(title="depscreen",
                  description="Depression screening for Romanized Sinhala "
                              "social media text")
    registry: dict[str, pipeline.PipelineArtifact] = {}

    def get_artifact(model_id):
        if model_id not in registry:
            raise HTTPException(status_code=404,
                                detail=f"unknown model_id {model_id!r}")
        return registry[model_id]

    def register(artifact):
        model_id = uuid.uuid4().hex[:12]
        registry[model_id] = artifact
        return model_id

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", models=len(registry))

    @app.post("/train", response_model=schemas.TrainResponse)
    def train(request: schemas.TrainRequest):
        try:
            config = RunConfig.from_dict(request.config)
            artifact = pipeline.fit_pipeline(_to_corpus(request.documents),
                                             config, request.model)
        except DepscreenError as exc:
            raise _http_error(exc)
        model_id = register(artifact)
        chain = artifact.chain
        return schemas.TrainResponse(
            model_id=model_id, model=request.model,
            n_train=len(request.documents),
            vocabulary_size=len(chain.vocab),
            selected_features=len(chain.selector.selected))

    @app.get("/models", response_model=list[schemas.ModelInfo])
    def list_models():
        return [
            schemas.ModelInfo(
                model_id=mid, model=a.model_kind,
                vocabulary_size=len(a.chain.vocab),
                selected_features=len(a.chain.selector.selected))
            for mid, a in registry.items()
        ]

    @app.post("/models", response_model=schemas.ModelInfo)
    def upload_model(request: schemas.ArtifactUpload):
        try:
            artifact = pipeline.artifact_from_dict(request.artifact)
        except DepscreenError as exc:
            raise _http_error(exc)
        model_id = register(artifact)
        return schemas.ModelInfo(
            model_id=model_id, model=artifact.model_kind,
            vocabulary_size=len(artifact.chain.vocab),
            selected_features=len(artifact.chain.selector.selected))

    @app.get("/models/{model_id}/artifact")
    def download_model(model_id: str):
        return pipeline.artifact_to_dict(get_artifact(model_id))

    @app.post("/models/{model_id}/predict",
              response_model=schemas.PredictResponse)
    def predict(model_id: str, request: schemas.PredictRequest):
        artifact = get_artifact(model_id)
        predictions = [pipeline.predict_one(artifact, text)
                       for text in request.texts]
        return schemas.PredictResponse(
            predictions=[schemas.Prediction(**p) for p in predictions])

    @app.post("/models/{model_id}/evaluate",
              response_model=schemas.EvalReportOut)
    def evaluate(model_id: str, request: schemas.EvaluateRequest):
        artifact = get_artifact(model_id)
        try:
            report = evaluation.evaluate(artifact,
                                         _to_corpus(request.documents),
                                         request.threshold)
        except DepscreenError as exc:
            raise _http_error(exc)
        return _report_out(report)

    @app.post("/benchmark", response_model=schemas.BenchmarkResponse)
    def run_benchmark(request: schemas.BenchmarkRequest):
        try:
            config = RunConfig.from_dict(request.config)
            overrides = {}
            if request.ratio is not None:
                overrides["train_ratio"] = request.ratio
            if request.seed is not None:
                overrides["seed"] = request.seed
            if overrides:
                config = RunConfig.from_dict({**config.to_dict(), **overrides})
            kinds = tuple(request.models) if request.models else pipeline.MODEL_KINDS
            for kind in kinds:
                if kind not in pipeline.MODEL_KINDS:
                    raise ConfigError(f"unknown model kind {kind!r}")
            spec = SplitSpec(train_ratio=config.train_ratio,
                             seed=config.seed, stratified=config.stratified)
            result = evaluation.benchmark(_to_corpus(request.documents),
                                          spec, config, kinds)
        except DepscreenError as exc:
            raise _http_error(exc)
        return schemas.BenchmarkResponse(
            reports=[_report_out(r) for r in result.reports],
            failures=result.failures,
            table=evaluation.format_report_table(result.reports,
                                                 result.failures),
            train_size=result.split_sizes[0],
            test_size=result.split_sizes[1])

    @app.post("/split", response_model=schemas.SplitResponse)
    def split_corpus(request: schemas.SplitRequest):
        try:
            spec = SplitSpec(train_ratio=request.ratio, seed=request.seed,
                             stratified=request.stratified)
            parts = split(_to_corpus(request.documents), spec)
        except DepscreenError as exc:
            raise _http_error(exc)
        return schemas.SplitResponse(
            train=[schemas.DocumentIn(text=d.text, label=d.label)
                   for d in parts.train.docs],
            test=[schemas.DocumentIn(text=d.text, label=d.label)
                  for d in parts.test.docs])

    @app.post("/gradcheck", response_model=schemas.GradcheckResponse)
    def gradcheck(request: schemas.GradcheckRequest):
        try:
            rng = np.random.default_rng(request.seed)
            params = neural.init_params(request.input_dim, request.seed)
            X = rng.standard_normal((32, request.input_dim))
            y = rng.integers(0, 2, size=32)
            error = neural.gradient_check(params, X, y, delta=request.delta,
                                          seed=request.seed)
        except DepscreenError as exc:
            raise _http_error(exc)
        return schemas.GradcheckResponse(max_relative_error=error,
                                         passed=error < GRADCHECK_BAR)

    return app


app = create_app()


if __name__ == "__main__":
    uvicorn.run("depscreen.service:app", host="127.0.0.1", port=8000)
