import numpy as np
import pytest

from dsig import Alphabet, DiscretePath

# The worked two-component stream: observations at t = 0, 1, 1.5, 2.5, 3 with
# gaps, including trailing tabs of the kind real exports carry.
SAMPLE_STREAM = (
    ";time\tevent_type\tvalue\n"
    "0.0\t1\t1.0\n"
    "0.0\t2\t1.0\n"
    "1.0\t1\t3.0\t\n"
    "1.0\t2\t4.0\t\n"
    "1.5\t2\t2.0\n"
    "2.5\t1\t5.0\n"
    "3.0\t1\t8.0\n"
    "3.0\t2\t6.0\n"
)

# Forward-filled version of the sample stream.
SAMPLE_TIMES = (0.0, 1.0, 1.5, 2.5, 3.0)
SAMPLE_X1 = (1.0, 3.0, 3.0, 5.0, 8.0)
SAMPLE_X2 = (1.0, 4.0, 2.0, 2.0, 6.0)

# Flat signature over the full sample interval, words up to length two; keys
# use head-sign first letters (either sign gives the same flat value).
SAMPLE_FLAT_VALUES = {
    "@": 1.0,
    "1-": 7.0,
    "2-": 5.0,
    "1-.1-": 16.0,
    "1-.1+": 33.0,
    "1-.2-": 12.0,
    "1-.2+": 30.0,
    "2-.1-": 5.0,
    "2-.1+": 23.0,
    "2-.2-": -2.0,
    "2-.2+": 27.0,
}

# Decayed signature (half-life one time unit, mu = ln 2) over the same
# interval, known to two decimals.
SAMPLE_DECAYED_VALUES = {
    "1-": 3.08, "1+": 4.91, "2-": 2.70, "2+": 4.04,
    "1-.1-": 3.37, "1-.1+": 11.65, "1-.2-": 3.33, "1-.2+": 12.56,
    "1+.1-": 6.74, "1+.1+": 19.57, "1+.2-": 6.66, "1+.2+": 20.16,
    "2-.1-": -0.63, "2-.1+": 8.61, "2-.2-": -1.25, "2-.2+": 12.19,
    "2+.1-": 0.21, "2+.1+": 13.71, "2+.2-": -1.33, "2+.2+": 18.34,
}


@pytest.fixture(scope="session")
def sample_stream_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "sample1.dat"
    path.write_text(SAMPLE_STREAM)
    return path


@pytest.fixture
def sample_path():
    return DiscretePath(
        SAMPLE_TIMES, np.column_stack([SAMPLE_X1, SAMPLE_X2]), Alphabet.numeric(2)
    )


def make_random_path(rng: np.random.Generator, width: int, n_steps: int) -> DiscretePath:
    times = np.cumsum(rng.uniform(0.05, 1.0, n_steps + 1))
    values = rng.uniform(-1.0, 1.0, (n_steps + 1, width))
    return DiscretePath(times, values, Alphabet.numeric(width))


def random_path_corpus(count: int, seed: int = 20260808) -> list[DiscretePath]:
    """Deterministic corpus of random paths, width cycling 1..3, sizes mixed.

    Mostly short paths with a tail of long ones up to 40 steps; the last path
    is pinned to the extreme (width 3, 40 steps) so the corpus always covers
    the worst case.
    """
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(count):
        if i == count - 1:
            width, n_steps = 3, 40
        else:
            width = i % 3 + 1
            block = i % 20
            if block < 15:
                n_steps = int(rng.integers(3, 13))
            elif block < 19:
                n_steps = int(rng.integers(13, 25))
            else:
                n_steps = int(rng.integers(25, 41))
        paths.append(make_random_path(rng, width, n_steps))
    return paths


@pytest.fixture(scope="session")
def synth_dir_small(tmp_path_factory):
    """Ten sessions per class, enough for quick experiment tests."""
    from dsig.synth import SyntheticConfig, generate_dataset

    out = tmp_path_factory.mktemp("synth_small")
    generate_dataset(SyntheticConfig(sessions_per_class=10, seed=7), out)
    return out


@pytest.fixture(scope="session")
def synth_dir_acceptance(tmp_path_factory):
    """The desk-scale corpus: 200 sessions per class, fixed seed."""
    from dsig.synth import SyntheticConfig, generate_dataset

    out = tmp_path_factory.mktemp("synth_acceptance")
    generate_dataset(SyntheticConfig(sessions_per_class=200, seed=20260808), out)
    return out
