"""Signature engine for multivariate discrete-time paths.

The central object is the discrete signature with decay ``mu >= 0``: for each
word over the head/tail extended alphabet, a real coefficient built from the
path's increments, where every elapsed step multiplies previously accumulated
contributions by ``exp(-mu * dt)``. ``mu = 0`` gives the flat signature
(plain iterated sums). Evaluation is an iterative forward dynamic program:
one sweep over a prefix-closed word set per time step, in ascending word
length so a tail letter can read its prefix's value from the current step.

``oracle_signature`` recomputes single coefficients by explicit summation
(or literal recursion unrolling for decayed words longer than two letters)
and shares no code with the sweep; it exists so tests can check the engine
against an independent route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DataError
from .words import (
    EMPTY_WORD,
    HEAD,
    TAIL,
    Alphabet,
    ExtendedLetter,
    Word,
    WordUniverse,
    prefix_closure,
    render_word,
)


@dataclass(frozen=True)
class TimeDomain:
    """Strictly increasing observation times."""

    times: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) < 1:
            raise DataError("time domain must contain at least one time")
        for t in self.times:
            if not math.isfinite(t):
                raise DataError("time domain contains a non-finite time")
        for a, b in zip(self.times, self.times[1:]):
            if not a < b:
                raise DataError(f"times must be strictly increasing, got {a} then {b}")

    def __len__(self) -> int:
        return len(self.times)

    def index_of(self, t: float) -> int:
        """Index of an exact member time; raises DataError if t is not observed."""
        for i, ti in enumerate(self.times):
            if ti == t:
                return i
        raise DataError(f"time {t} is not in the observation domain")


class DiscretePath:
    """Observed values of d components on a shared time domain.

    Immutable after construction; the value matrix is a read-only array of
    shape (number of times, d).
    """

    def __init__(self, times: Union[TimeDomain, Sequence[float]], values, alphabet: Alphabet):
        self.domain = times if isinstance(times, TimeDomain) else TimeDomain(tuple(float(t) for t in times))
        matrix = np.array(values, dtype=float)
        if matrix.ndim != 2:
            raise DataError(f"path values must be 2-D (times x components), got shape {matrix.shape}")
        if matrix.shape[0] != len(self.domain):
            raise DataError(f"{matrix.shape[0]} value rows for {len(self.domain)} times")
        if matrix.shape[1] != alphabet.size:
            raise DataError(f"{matrix.shape[1]} components for alphabet of size {alphabet.size}")
        if not np.all(np.isfinite(matrix)):
            raise DataError("path values contain non-finite entries")
        matrix.setflags(write=False)
        self.values = matrix
        self.alphabet = alphabet

    @property
    def times(self) -> tuple[float, ...]:
        return self.domain.times

    @property
    def last_index(self) -> int:
        return len(self.domain) - 1

    @property
    def width(self) -> int:
        return self.alphabet.size


@dataclass(frozen=True)
class SignatureResult:
    """Signature coefficients over one interval, in the requested word order."""

    alphabet: Alphabet
    start_time: float
    end_time: float
    mu: float
    words: tuple[Word, ...]
    values: tuple[float, ...]
    update_ops: int = 0

    def as_dict(self) -> dict[str, float]:
        return {render_word(w, self.alphabet): v for w, v in zip(self.words, self.values)}

    def value(self, word: Union[Word, str]) -> float:
        if isinstance(word, str):
            mapping = self.as_dict()
            if word not in mapping:
                raise DataError(f"word {word!r} not in result")
            return mapping[word]
        for w, v in zip(self.words, self.values):
            if w == word:
                return v
        raise DataError(f"word {word} not in result")

    def to_tsv(self) -> str:
        """One header row of word texts, one row of values at 17 significant digits."""
        header = "\t".join(render_word(w, self.alphabet) for w in self.words)
        row = "\t".join(f"{v:.17g}" for v in self.values)
        return f"{header}\n{row}\n"


def parse_signature_tsv(text: str) -> dict[str, float]:
    """Read a two-line signature TSV back into an ordered word-text -> value mapping."""
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) != 2:
        raise DataError(f"signature TSV must have a header and one data row, got {len(lines)} lines")
    headers = lines[0].split("\t")
    cells = lines[1].split("\t")
    if len(headers) != len(cells):
        raise DataError("signature TSV header and row lengths differ")
    try:
        return {h: float(c) for h, c in zip(headers, cells)}
    except ValueError as exc:
        raise DataError(f"signature TSV has a non-numeric value: {exc}") from None


class SignatureTable:
    """Streaming evaluator: per-word running values from a fixed start point.

    One table owns one (start point, decay, universe) evaluation and is
    advanced point by point with :meth:`extend`. Requested words are
    augmented with all their prefixes internally; filtered-out prefixes are
    computed but not emitted.
    """

    def __init__(
        self,
        universe: WordUniverse,
        mu: float,
        start_time: float,
        start_row: Sequence[float],
        alphabet: Optional[Alphabet] = None,
    ):
        if mu < 0:
            raise DataError(f"decay rate must be >= 0, got {mu}")
        self.alphabet = alphabet or universe.alphabet
        width = self.alphabet.size
        for word in universe.words:
            for letter in word:
                if letter.base >= width:
                    raise DataError(
                        f"universe letter component {letter.base} outside path of width {width}"
                    )
        row = [float(x) for x in start_row]
        if len(row) != width:
            raise DataError(f"start row has {len(row)} entries for width {width}")

        self.universe = universe
        self.mu = float(mu)
        self.start_time = float(start_time)
        self.current_time = float(start_time)
        self.steps = 0
        self.update_ops = 0

        augmented = prefix_closure(universe.words)
        index = {w: i for i, w in enumerate(augmented)}
        # Ascending canonical order puts every proper prefix before its extension.
        self._words = augmented
        self._parent = [0] + [index[w[:-1]] for w in augmented[1:]]
        self._comp = [0] + [w[-1].base for w in augmented[1:]]
        self._is_head = [True] + [w[-1].sign == HEAD for w in augmented[1:]]
        self._emit = [index[w] for w in universe.words]
        self._values = [0.0] * len(augmented)
        self._values[0] = 1.0
        self._last_row = row

    @property
    def augmented_size(self) -> int:
        """Number of internally evaluated nonempty words."""
        return len(self._words) - 1

    def extend(self, new_time: float, new_row: Sequence[float]) -> "SignatureTable":
        """Advance the table by one observation; returns self."""
        new_time = float(new_time)
        if not new_time > self.current_time:
            raise DataError(f"new time {new_time} does not advance past {self.current_time}")
        row = [float(x) for x in new_row]
        if len(row) != len(self._last_row):
            raise DataError(f"row width {len(row)} != path width {len(self._last_row)}")
        for x in row:
            if not math.isfinite(x):
                raise DataError("row contains a non-finite value")

        weight = math.exp(-self.mu * (new_time - self.current_time))
        deltas = [new - old for new, old in zip(row, self._last_row)]

        prev = self._values
        values = prev.copy()
        parent, comp, is_head = self._parent, self._comp, self._is_head
        for i in range(1, len(values)):
            dx = deltas[comp[i]]
            if is_head[i]:
                values[i] = weight * (prev[i] + dx * prev[parent[i]])
            else:
                values[i] = weight * prev[i] + dx * values[parent[i]]
        self._values = values
        self.update_ops += len(values) - 1
        self.steps += 1
        self.current_time = new_time
        self._last_row = row
        return self

    def value(self, word: Word) -> float:
        try:
            return self._values[self._words.index(word)]
        except ValueError:
            raise DataError(f"word {word} is not evaluated by this table") from None

    def result(self) -> SignatureResult:
        return SignatureResult(
            alphabet=self.alphabet,
            start_time=self.start_time,
            end_time=self.current_time,
            mu=self.mu,
            words=self.universe.words,
            values=tuple(self._values[i] for i in self._emit),
            update_ops=self.update_ops,
        )


def extend_table(table: SignatureTable, new_time: float, new_row: Sequence[float]) -> SignatureTable:
    """Functional surface for :meth:`SignatureTable.extend`."""
    return table.extend(new_time, new_row)


def _check_interval(path: DiscretePath, m: int, n: int) -> None:
    if not isinstance(m, (int, np.integer)) or not isinstance(n, (int, np.integer)):
        raise DataError("interval endpoints must be integer time indices")
    if m > n:
        raise DataError(f"start index {m} exceeds end index {n}")
    if m < 0 or n > path.last_index:
        raise DataError(f"indices [{m}, {n}] outside path with last index {path.last_index}")


def compute_signature(
    path: DiscretePath, m: int, n: int, mu: float, universe: WordUniverse
) -> SignatureResult:
    """Signature of the path over [t_m, t_n] for every word of the universe.

    Cost is one fused update per internally evaluated word per step; at the
    start index the value is 1 for the empty word and 0 otherwise.
    """
    _check_interval(path, m, n)
    table = SignatureTable(universe, mu, path.times[m], path.values[m], alphabet=path.alphabet)
    for step in range(m + 1, n + 1):
        table.extend(path.times[step], path.values[step])
    return table.result()


def _flat_nested_sum(path: DiscretePath, m: int, n: int, word: Word) -> float:
    """Explicit iterated sum over index tuples, head letters forcing strict increases."""
    # plain float lists: the tuple enumeration below is pure-Python hot code
    columns = [np.diff(path.values[:, c]).tolist() for c in range(path.width)]
    last = len(word) - 1

    def rec(pos: int, lower: int, acc: float) -> float:
        deltas = columns[word[pos].base]
        total = 0.0
        if pos == last:
            for l in range(lower, n):
                total += acc * deltas[l]
            return total
        bump = 1 if word[pos + 1].sign == HEAD else 0
        for l in range(lower, n):
            total += rec(pos + 1, l + bump, acc * deltas[l])
        return total

    return rec(0, m, 1.0)


def _decayed_pair_sum(path: DiscretePath, m: int, n: int, mu: float, word: Word) -> float:
    """Closed-form weighted sums for decayed words of length one or two.

    The decay weight depends only on when the first letter's increment
    entered: exp(-mu * (t_n - t_l)) for a head first letter and
    exp(-mu * (t_n - t_{l+1})) for a tail one.
    """
    times = path.times
    first = word[0]
    d1 = np.diff(path.values[:, first.base]).tolist()
    offset = 0 if first.sign == HEAD else 1
    if len(word) == 1:
        return sum(math.exp(-mu * (times[n] - times[l + offset])) * d1[l] for l in range(m, n))
    second = word[1]
    d2 = np.diff(path.values[:, second.base]).tolist()
    bump = 1 if second.sign == HEAD else 0
    total = 0.0
    for l1 in range(m, n):
        w1 = math.exp(-mu * (times[n] - times[l1 + offset])) * d1[l1]
        for l2 in range(l1 + bump, n):
            total += w1 * d2[l2]
    return total


def _decayed_unrolled(path: DiscretePath, m: int, n: int, mu: float, word: Word) -> float:
    """The defining recursion expanded step by step, no sharing of subproblems.

    Every expansion strips the last letter, so pending subterms are prefixes
    of the original word and can be tracked by length alone.
    """
    weights = [math.exp(-mu * (b - a)) for a, b in zip(path.times, path.times[1:])]
    deltas = [np.diff(path.values[:, letter.base]).tolist() for letter in word]
    heads = [letter.sign == HEAD for letter in word]
    total = 0.0
    stack: list[tuple[int, int, float]] = [(n, len(word), 1.0)]
    push = stack.append
    while stack:
        at, length, coeff = stack.pop()
        if length == 0:
            total += coeff
            continue
        if at == m:
            continue
        scaled = coeff * weights[at - 1]
        dx = deltas[length - 1][at - 1]
        if heads[length - 1]:
            push((at - 1, length, scaled))
            push((at - 1, length - 1, scaled * dx))
        else:
            push((at - 1, length, scaled))
            push((at, length - 1, coeff * dx))
    return total


def oracle_signature(path: DiscretePath, m: int, n: int, mu: float, word: Word) -> float:
    """Single coefficient via a route independent of the sweep engine.

    Flat case: explicit nested summation for any word length. Decayed case:
    explicit weighted sums for lengths one and two, literal recursion
    unrolling beyond that. Cost grows like (n - m) ** len(word); intended
    for cross-checking, not production evaluation.
    """
    _check_interval(path, m, n)
    if mu < 0:
        raise DataError(f"decay rate must be >= 0, got {mu}")
    for letter in word:
        if letter.base >= path.width:
            raise DataError(f"word component {letter.base} outside path of width {path.width}")
    if not word:
        return 1.0
    if n == m:
        return 0.0
    if mu == 0.0:
        return _flat_nested_sum(path, m, n, word)
    if len(word) <= 2:
        return _decayed_pair_sum(path, m, n, mu, word)
    return _decayed_unrolled(path, m, n, mu, word)


def first_letter_sign_invariance_check(path: DiscretePath, m: int, n: int, word: Word) -> bool:
    """Whether flipping the first letter's sign leaves the flat value bit-identical."""
    if not word:
        raise DataError("the empty word has no first letter")
    flipped = (ExtendedLetter(word[0].base, TAIL if word[0].sign == HEAD else HEAD),) + word[1:]
    universe = WordUniverse.from_words([word, flipped], path.alphabet)
    result = compute_signature(path, m, n, 0.0, universe)
    return result.value(word) == result.value(flipped)


def quadratic_variation(
    path: DiscretePath, component: int, m: int, n: int, mu: float = 0.0, anchor: str = "head"
) -> float:
    """(Weighted) sum of squared increments of one component, read off the signature.

    Returned as the difference of the two coefficients whose words repeat the
    component's letter with the anchor sign first and tail-vs-head second.
    Anchor "head" weights each squared increment by exp(-mu * (t_n - t_l)),
    anchor "tail" by exp(-mu * (t_n - t_{l+1})); both reduce to the plain
    quadratic variation at mu = 0.
    """
    if m >= n:
        raise DataError(f"quadratic variation needs m < n, got [{m}, {n}]")
    if not 0 <= component < path.width:
        raise DataError(f"component {component} outside path of width {path.width}")
    if anchor not in ("head", "tail"):
        raise DataError(f"anchor must be 'head' or 'tail', got {anchor!r}")
    sign = HEAD if anchor == "head" else TAIL
    first = ExtendedLetter(component, sign)
    plus = (first, ExtendedLetter(component, TAIL))
    minus = (first, ExtendedLetter(component, HEAD))
    universe = WordUniverse.from_words([plus, minus], path.alphabet)
    result = compute_signature(path, m, n, mu, universe)
    return result.value(plus) - result.value(minus)
