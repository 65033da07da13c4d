"""HTTP service wrapping the signature engine and the experiment pipeline.

Data errors map to 400, validation errors to FastAPI's usual 422 and
numeric failures to 500 with an ``"error": "numeric"`` marker so thin
clients can translate them back into exit codes.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..engine import compute_signature
from ..errors import DataError, NumericError
from ..experiment import ExperimentConfig, FitSettings, run_experiment
from ..ingest import (
    Discarded,
    forward_fill,
    normalize_and_featurize,
    parse_event_stream,
    parse_snapshot_file,
    subsample_session,
    SessionSpec,
)
from ..synth import SyntheticConfig, generate_dataset
from ..words import Alphabet, LetterPattern, enumerate_words
from .schemas import (
    ExperimentRequest,
    ExperimentResponse,
    HealthResponse,
    NormalizeRequest,
    NormalizeResponse,
    SignatureRequest,
    SignatureResponse,
    SkippedSession,
    SynthRequest,
    SynthResponse,
    WordsRequest,
    WordsResponse,
)


def _universe(alphabet: Alphabet, max_len: int, restrict, half: bool, pattern):
    restrict_to = None
    if restrict is not None:
        restrict_to = [alphabet.index(label) for label in restrict]
    letter_pattern = None
    if pattern is not None:
        letter_pattern = LetterPattern.from_texts(pattern, alphabet)
    return enumerate_words(alphabet, max_len, restrict_to=restrict_to, half=half, pattern=letter_pattern)


def create_app() -> FastAPI:
    app = FastAPI(title="dsig", version=__version__)

    @app.exception_handler(DataError)
    async def data_error_handler(request: Request, exc: DataError):
        return JSONResponse(status_code=400, content={"detail": str(exc), "error": "data"})

    @app.exception_handler(NumericError)
    async def numeric_error_handler(request: Request, exc: NumericError):
        return JSONResponse(status_code=500, content={"detail": str(exc), "error": "numeric"})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/words", response_model=WordsResponse)
    def words(request: WordsRequest) -> WordsResponse:
        alphabet = Alphabet.numeric(request.alphabet_size)
        universe = _universe(alphabet, request.max_len, request.restrict, request.half, request.pattern)
        return WordsResponse(count=universe.count, words=universe.rendered(include_empty=False))

    @app.post("/signature", response_model=SignatureResponse)
    def signature(request: SignatureRequest) -> SignatureResponse:
        stream = parse_event_stream(request.events)
        path = forward_fill(stream)
        m = 0 if request.from_time is None else path.domain.index_of(request.from_time)
        n = path.last_index if request.to_time is None else path.domain.index_of(request.to_time)
        half = request.half if request.half is not None else request.mu == 0
        universe = _universe(path.alphabet, request.max_len, request.restrict, half, request.pattern)
        result = compute_signature(path, m, n, request.mu, universe)
        return SignatureResponse(
            start_time=result.start_time,
            end_time=result.end_time,
            mu=result.mu,
            words=list(result.as_dict().keys()),
            values=list(result.values),
            tsv=result.to_tsv(),
            update_ops=result.update_ops,
        )

    @app.post("/sessions/normalize", response_model=NormalizeResponse)
    def normalize(request: NormalizeRequest) -> NormalizeResponse:
        snapshots = parse_snapshot_file(request.snapshots)
        spec = SessionSpec.for_label(request.label, request.n_minutes)
        picked = subsample_session(snapshots, spec)
        if isinstance(picked, Discarded):
            return NormalizeResponse(discarded=True, reason=picked.reason, label=request.label)
        session = normalize_and_featurize(picked, request.label)
        return NormalizeResponse(discarded=False, label=request.label, tsv=session.to_tsv())

    @app.post("/synth", response_model=SynthResponse)
    def synth(request: SynthRequest) -> SynthResponse:
        config = SyntheticConfig(
            sessions_per_class=request.sessions_per_class,
            seed=request.seed,
            n_minutes=request.n_minutes,
        )
        entries = generate_dataset(config, request.out_dir)
        return SynthResponse(
            manifest_path=str(request.out_dir) + "/manifest.tsv",
            files=[e.filename for e in entries],
            count=len(entries),
        )

    @app.post("/experiment", response_model=ExperimentResponse)
    def experiment(request: ExperimentRequest) -> ExperimentResponse:
        config = ExperimentConfig(
            max_len=request.max_len,
            mu=request.mu,
            restrict=tuple(request.restrict) if request.restrict is not None else None,
            pattern=tuple(request.pattern) if request.pattern is not None else None,
            half=request.half,
            train_fraction=request.train_fraction,
            seed=request.seed,
            settings=FitSettings(
                learning_rate=request.settings.learning_rate,
                iterations=request.settings.iterations,
                l2=request.settings.l2,
            ),
            raw=request.raw,
            shuffle_labels=request.shuffle_labels,
            threads=request.threads,
            n_minutes=request.n_minutes,
        )
        report = run_experiment(request.data_dir, config)
        return ExperimentResponse(
            feature_count=report.feature_count,
            n_sessions=report.n_sessions,
            n_train=report.n_train,
            n_test=report.n_test,
            train_accuracy=report.train_accuracy,
            test_accuracy=report.test_accuracy,
            columns=list(report.columns),
            coefficients=list(report.coefficients),
            intercept=report.intercept,
            skipped=[SkippedSession(file=f, reason=r) for f, r in report.skipped],
            summary_tsv=report.summary_tsv(),
            text=report.to_text(),
        )

    return app


app = create_app()
