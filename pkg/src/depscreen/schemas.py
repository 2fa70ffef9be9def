"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class DocumentIn(BaseModel):
    text: str = Field(min_length=1)
    label: int = Field(ge=0, le=1)


class TrainRequest(BaseModel):
    documents: list[DocumentIn] = Field(min_length=1)
    model: str
    config: dict = Field(default_factory=dict)


class TrainResponse(BaseModel):
    model_id: str
    model: str
    n_train: int
    vocabulary_size: int
    selected_features: int


class PredictRequest(BaseModel):
    texts: list[str] = Field(min_length=1)


class Prediction(BaseModel):
    label: int
    label_name: str
    score: float
    oov: bool


class PredictResponse(BaseModel):
    predictions: list[Prediction]


class LabelMetricsOut(BaseModel):
    label: int
    precision: float
    recall: float
    f1: float
    support: int


class EvalReportOut(BaseModel):
    model: str
    accuracy: float
    per_label: list[LabelMetricsOut]
    confusion: list[list[int]]


class EvaluateRequest(BaseModel):
    documents: list[DocumentIn] = Field(min_length=1)
    threshold: float | None = None


class BenchmarkRequest(BaseModel):
    documents: list[DocumentIn] = Field(min_length=2)
    models: list[str] | None = None
    config: dict = Field(default_factory=dict)
    ratio: float | None = None
    seed: int | None = None


class BenchmarkResponse(BaseModel):
    reports: list[EvalReportOut]
    failures: dict[str, str]
    table: str
    train_size: int
    test_size: int


class SplitRequest(BaseModel):
    documents: list[DocumentIn] = Field(min_length=2)
    ratio: float = 0.8
    seed: int = 0
    stratified: bool = True


class SplitResponse(BaseModel):
    train: list[DocumentIn]
    test: list[DocumentIn]


class GradcheckRequest(BaseModel):
    input_dim: int = Field(default=100, ge=1)
    seed: int = 0
    delta: float = 1e-5


class GradcheckResponse(BaseModel):
    max_relative_error: float
    passed: bool


class ArtifactUpload(BaseModel):
    artifact: dict


class ModelInfo(BaseModel):
    model_id: str
    model: str
    vocabulary_size: int
    selected_features: int


class HealthResponse(BaseModel):
    status: str
    models: int
