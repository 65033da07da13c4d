"""Alphabets, head/tail extended letters, words and word universes.

Every component of a path gets two extended letters: the *head* copy (sign
``-``), whose contribution is read against the running value before the
current step, and the *tail* copy (sign ``+``), read after it. Signature
coefficients are indexed by finite sequences of extended letters (words);
the empty word renders as ``@``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import DataError, WordFormatError

HEAD = 0
TAIL = 1

SIGN_CHARS = {HEAD: "-", TAIL: "+"}
CHAR_SIGNS = {"-": HEAD, "+": TAIL}

EMPTY_WORD_TEXT = "@"


class ExtendedLetter(NamedTuple):
    """One letter of the extended alphabet: component index plus head/tail sign."""

    base: int
    sign: int


#: A word is a (possibly empty) tuple of extended letters. Tuples compare
#: letter by letter, so sorting by ``(len(word), word)`` gives the canonical
#: order: shorter first, then lexicographic with head before tail.
Word = tuple[ExtendedLetter, ...]

EMPTY_WORD: Word = ()


@dataclass(frozen=True)
class Alphabet:
    """Ordered component labels; internal indices are positions 0..d-1."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.labels:
            raise DataError("alphabet must contain at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise DataError(f"alphabet labels are not unique: {self.labels}")

    @classmethod
    def numeric(cls, size: int) -> "Alphabet":
        """Alphabet with labels "1".."size"."""
        if size < 1:
            raise DataError("alphabet size must be >= 1")
        return cls(tuple(str(i + 1) for i in range(size)))

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise WordFormatError(f"unknown event type {label!r}; known: {list(self.labels)}") from None


def extend_alphabet(alphabet: Alphabet) -> list[ExtendedLetter]:
    """All 2d extended letters in canonical order: (0,head),(0,tail),(1,head),..."""
    return [ExtendedLetter(base, sign) for base in range(alphabet.size) for sign in (HEAD, TAIL)]


def concat(u: Word, v: Word) -> Word:
    """Concatenation of two words; the empty word is a two-sided identity."""
    return u + v


@dataclass(frozen=True)
class LetterPattern:
    """Matches words that contain at least one of the required letters."""

    required_letters: frozenset[ExtendedLetter]

    def __post_init__(self):
        if not self.required_letters:
            raise DataError("pattern requires at least one letter")

    def validate(self, alphabet: Alphabet) -> None:
        for letter in self.required_letters:
            if not 0 <= letter.base < alphabet.size:
                raise DataError(f"pattern letter {letter} outside alphabet of size {alphabet.size}")

    @classmethod
    def from_texts(cls, texts: Iterable[str], alphabet: Alphabet) -> "LetterPattern":
        letters = []
        for text in texts:
            word = parse_word(text.strip(), alphabet)
            if len(word) != 1:
                raise WordFormatError(f"pattern entry {text!r} is not a single letter")
            letters.append(word[0])
        return cls(frozenset(letters))


def matches(word: Word, pattern: LetterPattern) -> bool:
    """True iff the word contains any of the pattern's letters. The empty word never matches."""
    return any(letter in pattern.required_letters for letter in word)


def render_word(word: Word, alphabet: Alphabet) -> str:
    """Canonical text form, e.g. ``"1-.2+"``; the empty word renders as ``"@"``."""
    if not word:
        return EMPTY_WORD_TEXT
    return ".".join(f"{alphabet.labels[letter.base]}{SIGN_CHARS[letter.sign]}" for letter in word)


def parse_word(text: str, alphabet: Alphabet) -> Word:
    """Inverse of :func:`render_word`. Raises :class:`WordFormatError` on bad input."""
    if text == EMPTY_WORD_TEXT:
        return EMPTY_WORD
    if not text:
        raise WordFormatError("empty word text (the empty word is written '@')")
    letters = []
    for token in text.split("."):
        if len(token) < 2 or token[-1] not in CHAR_SIGNS:
            raise WordFormatError(f"malformed letter {token!r}: expected '<label>-' or '<label>+'")
        letters.append(ExtendedLetter(alphabet.index(token[:-1]), CHAR_SIGNS[token[-1]]))
    return tuple(letters)


def canonical_sort(words: Iterable[Word]) -> tuple[Word, ...]:
    """Duplicate-free canonical order: by length, then lexicographic (head < tail)."""
    return tuple(sorted(set(words), key=lambda w: (len(w), w)))


@dataclass(frozen=True)
class WordUniverse:
    """Ordered, duplicate-free collection of words over one alphabet.

    ``words`` includes the empty word unless a pattern filter removed it.
    ``count`` excludes the empty word, matching how feature columns are
    counted everywhere downstream.
    """

    alphabet: Alphabet
    words: tuple[Word, ...]
    max_len: int
    half: bool = False
    pattern: Optional[LetterPattern] = None

    def __post_init__(self):
        if len(set(self.words)) != len(self.words):
            raise DataError("word universe contains duplicates")
        for word in self.words:
            if len(word) > self.max_len:
                raise DataError(f"word of length {len(word)} exceeds max_len {self.max_len}")
            for letter in word:
                if not 0 <= letter.base < self.alphabet.size:
                    raise DataError(f"letter {letter} outside alphabet of size {self.alphabet.size}")

    @property
    def feature_words(self) -> tuple[Word, ...]:
        return tuple(w for w in self.words if w)

    @property
    def count(self) -> int:
        return len(self.feature_words)

    def __len__(self) -> int:
        return len(self.words)

    def rendered(self, include_empty: bool = True) -> list[str]:
        source = self.words if include_empty else self.feature_words
        return [render_word(w, self.alphabet) for w in source]

    def to_text(self) -> str:
        """Newline-separated canonical word texts."""
        return "\n".join(self.rendered()) + "\n"

    @classmethod
    def from_words(cls, words: Iterable[Word], alphabet: Alphabet) -> "WordUniverse":
        """Universe from explicit words, re-sorted canonically."""
        ordered = canonical_sort(words)
        max_len = max((len(w) for w in ordered), default=0)
        half = all(w[0].sign == HEAD for w in ordered if w)
        return cls(alphabet=alphabet, words=ordered, max_len=max_len, half=half)


def enumerate_words(
    alphabet: Alphabet,
    max_len: int,
    restrict_to: Optional[Sequence[int]] = None,
    half: bool = False,
    pattern: Optional[LetterPattern] = None,
) -> WordUniverse:
    """All words of length <= max_len over the extended letters of the chosen components.

    ``half`` pins every first letter to the head sign, halving the universe;
    valid as a feature set only in the flat (no decay) case, where the first
    letter's sign provably does not change the value. A pattern keeps only
    the words containing one of its letters, and drops the empty word.
    """
    if max_len < 0:
        raise DataError("max_len must be >= 0")
    if restrict_to is None:
        bases = list(range(alphabet.size))
    else:
        bases = sorted(set(restrict_to))
        if not bases:
            raise DataError("restrict_to must name at least one component")
        for base in bases:
            if not 0 <= base < alphabet.size:
                raise DataError(f"component index {base} outside alphabet of size {alphabet.size}")
    if pattern is not None:
        pattern.validate(alphabet)

    letters = [ExtendedLetter(base, sign) for base in bases for sign in (HEAD, TAIL)]
    first_letters = [l for l in letters if l.sign == HEAD] if half else letters

    words: list[Word] = [EMPTY_WORD]
    for length in range(1, max_len + 1):
        for first in first_letters:
            for rest in itertools.product(letters, repeat=length - 1):
                words.append((first,) + rest)

    if pattern is not None:
        words = [w for w in words if w and matches(w, pattern)]

    return WordUniverse(alphabet=alphabet, words=tuple(words), max_len=max_len, half=half, pattern=pattern)


def prefix_closure(words: Iterable[Word]) -> tuple[Word, ...]:
    """The given words plus all their prefixes (including the empty word), canonical order."""
    closed: set[Word] = {EMPTY_WORD}
    for word in words:
        for cut in range(1, len(word) + 1):
            closed.add(word[:cut])
    return canonical_sort(closed)
