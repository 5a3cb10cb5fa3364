"""Ultimately periodic words u v^omega.

A word is a pair (stem, period) of letter tuples; letters are small
nonnegative ints.  Canonical form: the period is primitive (not a power of
a shorter word) and the stem is as short as possible, which makes two
canonical words equal exactly when they denote the same infinite word.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Tuple

Letters = Tuple[int, ...]


@dataclass(frozen=True, order=True)
class UPWord:
    """An ultimately periodic infinite word ``stem . period^omega``."""

    stem: Letters
    period: Letters

    def __post_init__(self) -> None:
        if len(self.period) == 0:
            raise ValueError("period must be nonempty")
        if any(a < 0 for a in self.stem + self.period):
            raise ValueError("letters must be nonnegative")

    @property
    def max_letter(self) -> int:
        return max(self.stem + self.period)

    def letter_at(self, i: int) -> int:
        """Letter at position i of the infinite word."""
        if i < len(self.stem):
            return self.stem[i]
        return self.period[(i - len(self.stem)) % len(self.period)]

    def prefix(self, length: int) -> Letters:
        return tuple(self.letter_at(i) for i in range(length))

    def __str__(self) -> str:
        return format_word(self)


def upword(stem, period) -> UPWord:
    """Convenience constructor accepting any letter iterables."""
    return UPWord(tuple(stem), tuple(period))


def primitive_root(word: Letters) -> Letters:
    """Shortest v such that word = v^k."""
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word == word[:d] * (n // d):
            return word[:d]
    return word  # unreachable, d = n always matches


def canonicalize(w: UPWord) -> UPWord:
    """Shortest representation of the same infinite word.

    First the period is replaced by its primitive root.  Then, while the
    stem ends with the same letter as the period, that letter is moved
    out of the stem by rotating the period right: x.y (l.y)^om = x (y.l)^om.
    """
    stem = w.stem
    period = primitive_root(w.period)
    while stem and stem[-1] == period[-1]:
        stem = stem[:-1]
        period = period[-1:] + period[:-1]
    return UPWord(stem, period)


def format_word(w: UPWord) -> str:
    """Render as "<stem>:<period>" with comma separated decimal letters."""
    stem = ",".join(str(a) for a in w.stem)
    period = ",".join(str(a) for a in w.period)
    return f"{stem}:{period}"


def parse_word(text: str) -> UPWord:
    """Inverse of format_word; raises ValueError on malformed input."""
    if text.count(":") != 1:
        raise ValueError(f"malformed word {text!r}: expected one ':'")
    stem_part, period_part = text.split(":")

    def parse_letters(part: str, what: str) -> Letters:
        if part == "":
            return ()
        try:
            letters = tuple(int(tok) for tok in part.split(","))
        except ValueError:
            raise ValueError(f"malformed {what} in word {text!r}") from None
        if any(a < 0 for a in letters):
            raise ValueError(f"negative letter in word {text!r}")
        return letters

    stem = parse_letters(stem_part, "stem")
    period = parse_letters(period_part, "period")
    if not period:
        raise ValueError(f"malformed word {text!r}: empty period")
    return UPWord(stem, period)


def enumerate_words(sigma: int, max_stem: int, max_period: int) -> Iterator[UPWord]:
    """All canonical words with |stem| <= max_stem, |period| <= max_period.

    Used as a bounded oracle for language comparisons; duplicates (words
    whose canonical form already appeared) are skipped.
    """
    from itertools import product

    seen = set()
    for ls in range(max_stem + 1):
        for stem in product(range(sigma), repeat=ls):
            for lp in range(1, max_period + 1):
                for period in product(range(sigma), repeat=lp):
                    w = canonicalize(UPWord(stem, period))
                    if w not in seen:
                        seen.add(w)
                        yield w
