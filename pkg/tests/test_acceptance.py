"""Acceptance suite: one test per release criterion, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.
"""

import contextlib
import math
import time

import numpy as np
import pytest

from dsig import (
    Alphabet,
    HEAD,
    ExtendedLetter,
    SignatureTable,
    compute_signature,
    enumerate_words,
    first_letter_sign_invariance_check,
    oracle_signature,
    quadratic_variation,
)
from dsig.experiment import ExperimentConfig, run_experiment
from dsig.ingest import (
    Discarded,
    SessionSpec,
    forward_fill,
    ingest_session_file,
    parse_event_stream,
    subsample_session,
    parse_snapshot_file,
)
from conftest import (
    SAMPLE_DECAYED_VALUES,
    SAMPLE_FLAT_VALUES,
    SAMPLE_TIMES,
    SAMPLE_X1,
    SAMPLE_X2,
    make_random_path,
    random_path_corpus,
)

LN2 = math.log(2)
MUS = (0.0, LN2, 5.0)


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {name}: FAIL")
        raise
    print(f"\nACCEPTANCE {name}: PASS")


@pytest.fixture(scope="module")
def corpus():
    return random_path_corpus(200)


@pytest.fixture(scope="module")
def corpus_evaluations(corpus):
    """Engine and oracle values for every corpus path and decay rate.

    Returns (per-path list of {mu: (result, {word: oracle value})}, elapsed
    seconds for the computation itself).
    """
    started = time.perf_counter()
    evaluations = []
    for path in corpus:
        universe = enumerate_words(path.alphabet, 3)
        per_mu = {}
        for mu in MUS:
            result = compute_signature(path, 0, path.last_index, mu, universe)
            oracle = {
                word: oracle_signature(path, 0, path.last_index, mu, word)
                for word in universe.words
            }
            per_mu[mu] = (result, oracle)
        evaluations.append(per_mu)
    return evaluations, time.perf_counter() - started


def test_c01_flat_worked_example(sample_stream_file):
    with criterion("flat worked example (11 values, <=1e-12, <1s)"):
        started = time.perf_counter()
        path = forward_fill(parse_event_stream(sample_stream_file.read_text()))
        result = compute_signature(path, 0, 4, 0.0, enumerate_words(path.alphabet, 2, half=True))
        got = result.as_dict()
        assert len(got) == 11
        for text, want in SAMPLE_FLAT_VALUES.items():
            assert abs(got[text] - want) <= 1e-12
        assert time.perf_counter() - started < 1.0


def test_c02_decayed_worked_example(sample_stream_file):
    # Twenty golden values known to two decimals; all of them must reproduce.
    with criterion("decayed worked example (two-decimal values, +-0.005, <1s)"):
        started = time.perf_counter()
        path = forward_fill(parse_event_stream(sample_stream_file.read_text()))
        result = compute_signature(path, 0, 4, LN2, enumerate_words(path.alphabet, 2))
        got = result.as_dict()
        assert got["@"] == 1.0
        for text, want in SAMPLE_DECAYED_VALUES.items():
            assert abs(got[text] - want) <= 0.005
        assert time.perf_counter() - started < 1.0


def test_c03_oracle_equivalence(corpus_evaluations):
    with criterion("oracle equivalence (200 paths, |w|<=3, 3 decay rates, rel<=1e-9, <60s)"):
        evaluations, elapsed = corpus_evaluations
        assert len(evaluations) == 200
        checked = 0
        for per_mu in evaluations:
            for mu in MUS:
                result, oracle = per_mu[mu]
                for word, reference in oracle.items():
                    assert abs(result.value(word) - reference) <= 1e-9 * max(1.0, abs(reference))
                    checked += 1
        assert checked > 200 * 3 * 15
        assert elapsed < 60.0, f"oracle comparison took {elapsed:.1f}s"


def test_c04_quadratic_variation_identities(corpus, sample_path):
    with criterion("quadratic variation identities (rel<=1e-9; worked instance 17/29 exact)"):
        assert quadratic_variation(sample_path, 0, 0, 4) == 17.0
        assert quadratic_variation(sample_path, 1, 0, 4) == 29.0
        for path in corpus[::5]:
            n = path.last_index
            times = path.times
            for mu in MUS:
                for component in range(path.width):
                    increments = np.diff(np.asarray(path.values)[:, component])
                    for anchor, shift in (("head", 0), ("tail", 1)):
                        direct = sum(
                            math.exp(-mu * (times[n] - times[l + shift])) * increments[l] ** 2
                            for l in range(n)
                        )
                        got = quadratic_variation(path, component, 0, n, mu, anchor)
                        assert abs(got - direct) <= 1e-9 * max(1.0, abs(direct))


def test_c05_first_letter_sign_and_flat_reduction(corpus_evaluations):
    with criterion("first-letter sign invariance exact; flat reduction rel<=1e-12"):
        evaluations, _ = corpus_evaluations
        for per_mu in evaluations:
            result, oracle = per_mu[0.0]
            for word, value in zip(result.words, result.values):
                if word and word[0].sign == HEAD:
                    flipped = (ExtendedLetter(word[0].base, 1 - word[0].sign),) + word[1:]
                    assert value == result.value(flipped)  # exact
                # flat engine against the explicit nested sums
                assert abs(value - oracle[word]) <= 1e-12 * max(1.0, abs(oracle[word]))
        # the dedicated check reports the same exact equality
        probe = make_random_path(np.random.default_rng(7), 2, 12)
        for text_len in (1, 2, 3):
            word = tuple(ExtendedLetter(i % 2, (i // 2) % 2) for i in range(text_len))
            assert first_letter_sign_invariance_check(probe, 0, 12, word)


def test_c06_incremental_consistency():
    with criterion("incremental updates bit-identical to one-shot (50 paths)"):
        rng = np.random.default_rng(31415)
        for trial in range(50):
            width = trial % 3 + 1
            path = make_random_path(rng, width, int(rng.integers(2, 25)))
            universe = enumerate_words(path.alphabet, 3)
            mu = MUS[trial % 3]
            table = SignatureTable(universe, mu, path.times[0], path.values[0])
            for i in range(1, len(path.times)):
                table.extend(path.times[i], path.values[i])
            one_shot = compute_signature(path, 0, path.last_index, mu, universe)
            assert table.result().values == one_shot.values


def test_c07_word_counts():
    with criterion("word-universe counts (1,3,7 / 4,36,292 / 2,10,42 / 1,15,163)"):
        from dsig import LetterPattern

        a4 = Alphabet.numeric(4)
        pattern = LetterPattern.from_texts(["4-", "4+"], a4)
        for k, (single, full, pair, patterned) in {
            1: (1, 4, 2, 1), 2: (3, 36, 10, 15), 3: (7, 292, 42, 163),
        }.items():
            assert enumerate_words(a4, k, restrict_to=[3], half=True).count == single
            assert enumerate_words(a4, k, half=True).count == full
            assert enumerate_words(a4, k, restrict_to=[1, 3], half=True).count == pair
            assert enumerate_words(a4, k, half=True, pattern=pattern).count == patterned


def test_c08_ingestion_golden_and_session_invariants(synth_dir_acceptance, tmp_path):
    with criterion("ingestion: forward-fill golden; session bounds; discard rule"):
        # the worked stream fills exactly to the known table
        from conftest import SAMPLE_STREAM

        path = forward_fill(parse_event_stream(SAMPLE_STREAM))
        assert path.times == SAMPLE_TIMES
        assert tuple(path.values[:, 0]) == SAMPLE_X1
        assert tuple(path.values[:, 1]) == SAMPLE_X2

        # synthetic sessions: bounded imbalance, final normalized volume 1
        files = sorted(synth_dir_acceptance.glob("*.am"))[:10]
        files += sorted(synth_dir_acceptance.glob("*.pm"))[:10]
        for file in files:
            session = ingest_session_file(file)
            assert not isinstance(session, Discarded)
            assert np.all(session.values[:, 2] >= -1.0) and np.all(session.values[:, 2] <= 1.0)
            assert session.values[-1, 3] == 1.0

        # zero volume through the whole opening minute discards the session
        fixture = tmp_path / "zero_open.am"
        fixture.write_text(
            "540.2\t1.001\t1.0\t10\t10\t0\n"
            "540.9\t1.001\t1.0\t10\t10\t0\n"
            "541.5\t1.002\t1.0\t10\t10\t50\n"
            "689.8\t1.002\t1.0\t10\t10\t90\n"
        )
        outcome = subsample_session(parse_snapshot_file(fixture.read_text()), SessionSpec.morning())
        assert isinstance(outcome, Discarded)


def test_c09_classification_experiment(synth_dir_acceptance):
    with criterion("experiment: 42 features, test accuracy >= 0.95; shuffled null in [0.35, 0.65]; <5min"):
        started = time.perf_counter()
        report = run_experiment(
            synth_dir_acceptance,
            ExperimentConfig(max_len=3, restrict=("2", "4"), seed=11),
        )
        assert report.feature_count == 42
        assert report.n_sessions == 400
        assert report.test_accuracy >= 0.95

        for null_seed in (101, 202, 303):
            null = run_experiment(
                synth_dir_acceptance,
                ExperimentConfig(max_len=3, restrict=("2", "4"), seed=null_seed, shuffle_labels=True),
            )
            assert 0.35 <= null.test_accuracy <= 0.65
        assert time.perf_counter() - started < 300.0


def test_c10_performance_and_cost_counter():
    with criterion("session-scale signature <100ms; cost counter = 292*150"):
        a4 = Alphabet.numeric(4)
        universe = enumerate_words(a4, 3, half=True)
        rng = np.random.default_rng(5)
        path_values = rng.normal(0, 1, (151, 4)).cumsum(axis=0)
        from dsig import DiscretePath

        path = DiscretePath(np.arange(151) / 150, path_values, a4)
        timings = []
        for _ in range(3):
            started = time.perf_counter()
            result = compute_signature(path, 0, 150, 0.0, universe)
            timings.append(time.perf_counter() - started)
        assert result.update_ops == 292 * 150
        assert min(timings) < 0.100, f"took {min(timings)*1000:.1f}ms"
