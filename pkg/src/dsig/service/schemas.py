"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class WordsRequest(BaseModel):
    alphabet_size: int = Field(4, ge=1)
    max_len: int = Field(..., ge=0)
    restrict: Optional[list[str]] = None
    half: bool = True
    pattern: Optional[list[str]] = None


class WordsResponse(BaseModel):
    count: int
    words: list[str]


class SignatureRequest(BaseModel):
    """Signature of an event stream, parsed and forward filled server side."""

    events: str
    mu: float = Field(0.0, ge=0)
    max_len: int = Field(..., ge=0)
    from_time: Optional[float] = None
    to_time: Optional[float] = None
    restrict: Optional[list[str]] = None
    pattern: Optional[list[str]] = None
    half: Optional[bool] = None  # null = half exactly when mu == 0


class SignatureResponse(BaseModel):
    start_time: float
    end_time: float
    mu: float
    words: list[str]
    values: list[float]
    tsv: str
    update_ops: int


class NormalizeRequest(BaseModel):
    snapshots: str
    label: Literal["morning", "afternoon"]
    n_minutes: int = Field(150, ge=2)


class NormalizeResponse(BaseModel):
    discarded: bool
    reason: Optional[str] = None
    label: str
    tsv: Optional[str] = None


class SynthRequest(BaseModel):
    out_dir: str
    sessions_per_class: int = Field(..., ge=1)
    seed: int = 0
    n_minutes: int = Field(150, ge=2)


class SynthResponse(BaseModel):
    manifest_path: str
    files: list[str]
    count: int


class FitSettingsModel(BaseModel):
    learning_rate: float = Field(0.1, gt=0)
    iterations: int = Field(5000, ge=0)
    l2: float = Field(1e-4, ge=0)


class ExperimentRequest(BaseModel):
    data_dir: str
    max_len: int = Field(3, ge=1)
    mu: float = Field(0.0, ge=0)
    restrict: Optional[list[str]] = None
    pattern: Optional[list[str]] = None
    half: Optional[bool] = None
    train_fraction: float = Field(0.8, gt=0, lt=1)
    seed: int = 0
    settings: FitSettingsModel = FitSettingsModel()
    raw: bool = False
    shuffle_labels: bool = False
    threads: Optional[int] = Field(None, ge=1)
    n_minutes: int = Field(150, ge=2)


class SkippedSession(BaseModel):
    file: str
    reason: str


class ExperimentResponse(BaseModel):
    feature_count: int
    n_sessions: int
    n_train: int
    n_test: int
    train_accuracy: float
    test_accuracy: float
    columns: list[str]
    coefficients: list[float]
    intercept: float
    skipped: list[SkippedSession]
    summary_tsv: str
    text: str


class HealthResponse(BaseModel):
    status: str
    version: str
