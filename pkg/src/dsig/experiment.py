"""Session classification experiment: features, logistic regression, report.

The harness ingests a directory of snapshot files, turns every usable
session into a signature feature row (or the raw normalized path in raw
mode), shuffles whole sessions, splits train/test, standardizes on the
training rows and fits a binary logistic regression by plain gradient
descent. Everything is deterministic given the seeds.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DataError, DsigError, NumericError
from .ingest import (
    FEATURE_ALPHABET,
    Discarded,
    SessionPath,
    ingest_session_file,
    session_to_feature_row,
)
from .words import LetterPattern, WordUniverse, enumerate_words


@dataclass(frozen=True)
class FitSettings:
    learning_rate: float = 0.1
    iterations: int = 5000
    l2: float = 1e-4

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise DataError("learning rate must be positive")
        if self.iterations < 0:
            raise DataError("iterations must be >= 0")
        if self.l2 < 0:
            raise DataError("L2 strength must be >= 0")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    positive = z >= 0
    out[positive] = 1 / (1 + np.exp(-z[positive]))
    expz = np.exp(z[~positive])
    out[~positive] = expz / (1 + expz)
    return out


def logistic_loss(X: np.ndarray, y: np.ndarray, weights: np.ndarray, bias: float, l2: float) -> float:
    """Mean negative log-likelihood plus (l2/2)*||weights||^2."""
    z = X @ weights + bias
    # log(1 + exp(-z*y_pm)) written stably via logaddexp
    y_pm = 2 * y - 1
    nll = np.logaddexp(0.0, -y_pm * z).mean()
    return float(nll + 0.5 * l2 * np.dot(weights, weights))


def logistic_gradient(
    X: np.ndarray, y: np.ndarray, weights: np.ndarray, bias: float, l2: float
) -> tuple[np.ndarray, float]:
    probs = _sigmoid(X @ weights + bias)
    residual = probs - y
    grad_w = X.T @ residual / len(y) + l2 * weights
    grad_b = float(residual.mean())
    return grad_w, grad_b


def logistic_fit(
    X: np.ndarray, y: np.ndarray, settings: FitSettings = FitSettings()
) -> tuple[np.ndarray, float]:
    """Full-batch gradient descent from zero-initialized parameters."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or len(X) != len(y):
        raise DataError(f"bad training shapes {X.shape} vs {y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DataError("training data contains non-finite values")
    if len(np.unique(y)) < 2:
        raise DataError("training labels contain a single class")
    weights = np.zeros(X.shape[1])
    bias = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for iteration in range(settings.iterations):
            grad_w, grad_b = logistic_gradient(X, y, weights, bias, settings.l2)
            weights = weights - settings.learning_rate * grad_w
            bias = bias - settings.learning_rate * grad_b
            if not (np.all(np.isfinite(weights)) and np.isfinite(bias)):
                raise NumericError(
                    f"non-finite parameters at iteration {iteration + 1}; "
                    f"try a smaller learning rate than {settings.learning_rate}"
                )
    return weights, bias


def logistic_predict(weights: np.ndarray, bias: float, X: np.ndarray) -> np.ndarray:
    """Class-1 probability sigma(w.x + b) for each row."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    return _sigmoid(X @ weights + bias)


def accuracy(weights: np.ndarray, bias: float, X: np.ndarray, y: np.ndarray) -> float:
    predictions = (logistic_predict(weights, bias, X) >= 0.5).astype(int)
    return float(np.mean(predictions == y))


def standardize_fit(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-column mean and standard deviation; zero deviations become 1."""
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std == 0, 1.0, std)
    return mean, std


def standardize_apply(X: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    return (X - mean) / std


def resolve_threads(explicit: Optional[int] = None) -> int:
    """Parallelism for batch feature extraction: flag, else DSIG_THREADS, else machine."""
    if explicit is not None:
        if explicit < 1:
            raise DataError("thread count must be >= 1")
        return explicit
    env = os.environ.get("DSIG_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise DataError(f"DSIG_THREADS must be an integer, got {env!r}") from None
        if value < 1:
            raise DataError("DSIG_THREADS must be >= 1")
        return value
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Feature-set selector plus split and optimizer settings."""

    max_len: int = 3
    mu: float = 0.0
    restrict: Optional[tuple[str, ...]] = None  # component labels, e.g. ("2", "4")
    pattern: Optional[tuple[str, ...]] = None  # letter texts, e.g. ("4-", "4+")
    half: Optional[bool] = None  # None = half exactly when mu == 0
    train_fraction: float = 0.8
    seed: int = 0
    settings: FitSettings = field(default_factory=FitSettings)
    raw: bool = False
    shuffle_labels: bool = False
    threads: Optional[int] = None
    n_minutes: int = 150

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise DataError(f"train fraction must be in (0, 1), got {self.train_fraction}")
        if self.max_len < 1:
            raise DataError("max_len must be >= 1")
        if self.mu < 0:
            raise DataError("decay rate must be >= 0")

    @property
    def use_half(self) -> bool:
        return self.half if self.half is not None else self.mu == 0

    def universe(self) -> WordUniverse:
        restrict_to = None
        if self.restrict is not None:
            restrict_to = [FEATURE_ALPHABET.index(label) for label in self.restrict]
        pattern = None
        if self.pattern is not None:
            pattern = LetterPattern.from_texts(self.pattern, FEATURE_ALPHABET)
        return enumerate_words(
            FEATURE_ALPHABET, self.max_len, restrict_to=restrict_to, half=self.use_half, pattern=pattern
        )


@dataclass(frozen=True)
class FeatureMatrix:
    columns: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    session_files: tuple[str, ...]

    def __post_init__(self):
        if self.X.shape != (len(self.y), len(self.columns)):
            raise DataError(f"feature matrix shape {self.X.shape} inconsistent with metadata")
        if not set(np.unique(self.y)) <= {0, 1}:
            raise DataError("labels must be 0 (morning) or 1 (afternoon)")


def load_sessions(
    data_dir: Union[str, Path], n_minutes: int = 150
) -> tuple[list[tuple[str, SessionPath]], list[tuple[str, str]]]:
    """Ingest every .am/.pm file under data_dir; returns (usable, skipped-with-reason)."""
    directory = Path(data_dir)
    if not directory.is_dir():
        raise DataError(f"data directory {directory} does not exist")
    files = sorted(p for p in directory.iterdir() if p.suffix in (".am", ".pm"))
    if not files:
        raise DataError(f"no .am/.pm session files in {directory}")
    usable: list[tuple[str, SessionPath]] = []
    skipped: list[tuple[str, str]] = []
    for path in files:
        try:
            outcome = ingest_session_file(path, n_minutes=n_minutes)
        except DsigError as exc:
            skipped.append((path.name, str(exc)))
            continue
        if isinstance(outcome, Discarded):
            skipped.append((path.name, outcome.reason))
        else:
            usable.append((path.name, outcome))
    return usable, skipped


def raw_feature_columns(n_steps: int) -> tuple[str, ...]:
    return tuple(f"X{c}@{n}" for c in range(1, 5) for n in range(n_steps + 1))


def build_feature_matrix(
    sessions: Sequence[tuple[str, SessionPath]],
    config: ExperimentConfig,
) -> FeatureMatrix:
    """Feature rows for all sessions; signature extraction runs in a thread pool."""
    if not sessions:
        raise DataError("no usable sessions")
    labels = np.array([session.label_code for _, session in sessions])
    files = tuple(name for name, _ in sessions)
    if config.raw:
        n_steps = len(sessions[0][1].times) - 1
        rows = [session.values.T.reshape(-1) for _, session in sessions]
        return FeatureMatrix(raw_feature_columns(n_steps), np.array(rows), labels, files)
    universe = config.universe()
    workers = resolve_threads(config.threads)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(
            pool.map(lambda item: session_to_feature_row(item[1], config.mu, universe), sessions)
        )
    columns = tuple(universe.rendered(include_empty=False))
    return FeatureMatrix(columns, np.array(rows), labels, files)


@dataclass(frozen=True)
class ExperimentReport:
    feature_count: int
    columns: tuple[str, ...]
    n_sessions: int
    n_train: int
    n_test: int
    train_accuracy: float
    test_accuracy: float
    coefficients: tuple[float, ...]
    intercept: float
    skipped: tuple[tuple[str, str], ...]
    config: ExperimentConfig

    def summary_tsv(self) -> str:
        rows = [
            ("feature_count", str(self.feature_count)),
            ("n_sessions", str(self.n_sessions)),
            ("n_train", str(self.n_train)),
            ("n_test", str(self.n_test)),
            ("train_accuracy", f"{self.train_accuracy:.6f}"),
            ("test_accuracy", f"{self.test_accuracy:.6f}"),
            ("skipped", str(len(self.skipped))),
            ("seed", str(self.config.seed)),
            ("mu", f"{self.config.mu:.17g}"),
            ("raw", str(int(self.config.raw))),
            ("shuffled_labels", str(int(self.config.shuffle_labels))),
        ]
        return "metric\tvalue\n" + "\n".join(f"{k}\t{v}" for k, v in rows) + "\n"

    def coefficients_tsv(self) -> str:
        lines = ["feature\tcoefficient"]
        for column, coef in zip(self.columns, self.coefficients):
            lines.append(f"{column}\t{coef:.17g}")
        lines.append(f"(intercept)\t{self.intercept:.17g}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        top = sorted(zip(self.columns, self.coefficients), key=lambda cw: -abs(cw[1]))[:10]
        lines = [
            f"sessions: {self.n_sessions} ({self.n_train} train / {self.n_test} test)"
            + (f", {len(self.skipped)} skipped" if self.skipped else ""),
            f"features: {self.feature_count}",
            f"train accuracy: {self.train_accuracy:.2%}",
            f"test accuracy:  {self.test_accuracy:.2%}",
            "largest coefficients:",
        ]
        lines += [f"  {column:16s} {coef:+.4f}" for column, coef in top]
        for name, reason in self.skipped:
            lines.append(f"  skipped {name}: {reason}")
        return "\n".join(lines) + "\n"


def split_indices(n: int, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded shuffle of whole sessions, then a front/back split."""
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(round(n * train_fraction))
    n_train = min(max(n_train, 1), n - 1)
    return order[:n_train], order[n_train:]


def run_experiment(data_dir: Union[str, Path], config: ExperimentConfig) -> ExperimentReport:
    """Full pipeline: ingest, featurize, split, standardize, fit, score."""
    sessions, skipped = load_sessions(data_dir, n_minutes=config.n_minutes)
    matrix = build_feature_matrix(sessions, config)
    y = matrix.y.copy()
    if config.shuffle_labels:
        y = y[np.random.default_rng(config.seed + 1).permutation(len(y))]

    train_idx, test_idx = split_indices(len(y), config.train_fraction, config.seed)
    y_train, y_test = y[train_idx], y[test_idx]
    if len(np.unique(y_train)) < 2 or len(np.unique(y_test)) < 2:
        raise DataError("train/test split left a single class on one side; need more sessions")

    mean, std = standardize_fit(matrix.X[train_idx])
    X_train = standardize_apply(matrix.X[train_idx], mean, std)
    X_test = standardize_apply(matrix.X[test_idx], mean, std)

    weights, bias = logistic_fit(X_train, y_train, config.settings)
    return ExperimentReport(
        feature_count=len(matrix.columns),
        columns=matrix.columns,
        n_sessions=len(y),
        n_train=len(train_idx),
        n_test=len(test_idx),
        train_accuracy=accuracy(weights, bias, X_train, y_train),
        test_accuracy=accuracy(weights, bias, X_test, y_test),
        coefficients=tuple(float(w) for w in weights),
        intercept=float(bias),
        skipped=tuple(skipped),
        config=config,
    )
