"""CNF encoding of "some n-state Buchi automaton accepts every good word
and no bad word", plus decoding of solver models back into automata.

The unknown automaton has states 0..n-1 with start 0, transition
variables t(i,j,a) and finality variables f(i).  Auxiliary variables
describe word paths (d/o), final-visiting paths (D/O), repeated-period
reachability with doubling exponents (x/h), and per-word acceptance
(u/s/B/L/y/z); each is tied to its definition by two-sided CNF clauses,
so any model fixes every auxiliary variable from the t/f choice alone.

The per-word acceptance z holds exactly when some knot state is
reachable from the start on stem plus 1..2^M period blocks and carries
a final-visiting period loop, where M = ceil(log2 n) + 1 so that 2^M
covers the 2n blocks a shortest witness may need.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log2
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .automata import NBA, member
from .sat import CNF, Budget, Clause, Model, solve
from .words import UPWord, canonicalize

Word = Tuple[int, ...]
VarKey = tuple


class SampleConflict(ValueError):
    """The same word was inserted as both good and bad."""


class SampleSets:
    """Disjoint sets of canonical good (accepted) and bad (rejected) words."""

    def __init__(
        self,
        good: Iterable[UPWord] = (),
        bad: Iterable[UPWord] = (),
    ) -> None:
        self.good: set = set()
        self.bad: set = set()
        for w in good:
            self.add_good(w)
        for w in bad:
            self.add_bad(w)

    def add_good(self, w: UPWord) -> None:
        w = canonicalize(w)
        if w in self.bad:
            raise SampleConflict(f"word {w} already classified as bad")
        self.good.add(w)

    def add_bad(self, w: UPWord) -> None:
        w = canonicalize(w)
        if w in self.good:
            raise SampleConflict(f"word {w} already classified as good")
        self.bad.add(w)

    def sorted_good(self) -> List[UPWord]:
        return sorted(self.good)

    def sorted_bad(self) -> List[UPWord]:
        return sorted(self.bad)

    def __len__(self) -> int:
        return len(self.good) + len(self.bad)


@dataclass(frozen=True)
class CandidateQuery:
    """Search description: state budget, alphabet, samples, options."""

    n: int
    alphabet_size: int
    samples: SampleSets
    symmetry_breaking: bool = False
    forbidden_start_letters: FrozenSet[int] = frozenset()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one state")
        if self.alphabet_size < 1:
            raise ValueError("need at least one letter")


@dataclass(frozen=True)
class EncodingStats:
    num_words: int
    total_word_length: int
    alphabet_size: int
    states: int
    variable_count: int
    clause_count: int


class VarCatalog:
    """Bijection between semantic variable keys and 1-based literal indices.

    Keys are plain tuples tagged by family, e.g. ('t', i, j, a) or
    ('x', period, i, j, m); words appear by content so that repeated
    stems/periods share their variables across example words.
    """

    def __init__(self) -> None:
        self._index: Dict[VarKey, int] = {}
        self._keys: List[VarKey] = []

    def add(self, key: VarKey) -> int:
        if key in self._index:
            raise ValueError(f"variable {key} allocated twice")
        self._keys.append(key)
        self._index[key] = len(self._keys)
        return self._index[key]

    def get(self, key: VarKey) -> int:
        return self._index[key]

    def key_of(self, index: int) -> VarKey:
        return self._keys[index - 1]

    def __contains__(self, key: VarKey) -> bool:
        return key in self._index

    def __len__(self) -> int:
        return len(self._keys)


def repetition_levels(n: int) -> int:
    """M with 2^M >= 2n: stem may need n blocks to reach the knot and the
    final-visiting loop up to n+1 more to close."""
    return ceil(log2(n)) + 1 if n > 1 else 1


def _clause(*lits: int) -> Clause:
    return tuple(dict.fromkeys(lits))


def _iff_conj(lhs: int, rhs: Sequence[int]) -> List[Clause]:
    out = [_clause(*(-r for r in rhs), lhs)]
    out.extend(_clause(-lhs, r) for r in rhs)
    return out


def _iff_disj(lhs: int, rhs: Sequence[int]) -> List[Clause]:
    if not rhs:
        return [(-lhs,)]
    out = [_clause(-lhs, *rhs)]
    out.extend(_clause(-r, lhs) for r in rhs)
    return out


def _suffixes(word: Word) -> List[Word]:
    return [word[i:] for i in range(len(word))]


def build_encoding(q: CandidateQuery) -> Tuple[CNF, VarCatalog, EncodingStats]:
    """Emit the CNF whose models are exactly the n-state automata
    accepting every good and no bad word (decode with decode_model)."""
    n, sigma = q.n, q.alphabet_size
    m_top = repetition_levels(n)
    words = q.samples.sorted_good() + q.samples.sorted_bad()
    for w in words:
        if w.max_letter >= sigma:
            raise ValueError(f"word {w} outside alphabet of size {sigma}")
    if any(a >= sigma for a in q.forbidden_start_letters):
        raise ValueError("forbidden start letter outside alphabet")

    stems = sorted({w.stem for w in words}, key=lambda u: (len(u), u))
    periods = sorted({w.period for w in words}, key=lambda v: (len(v), v))
    word_keys = sorted({(w.stem, w.period) for w in words})

    # Words needing plain-path d variables: nonempty suffixes of stems and
    # periods, plus the single-letter heads the O-recursion peels off.
    # Final-visiting D variables cover period suffixes and those heads.
    d_words: set = set()
    dd_words: set = set()
    for u in stems:
        d_words.update(_suffixes(u))
    for v in periods:
        for s in _suffixes(v):
            d_words.add(s)
            dd_words.add(s)
            if len(s) >= 2:
                d_words.add(s[:1])
                dd_words.add(s[:1])
    d_order = sorted(d_words, key=lambda w: (len(w), w))
    dd_order = sorted(dd_words, key=lambda w: (len(w), w))

    cat = VarCatalog()
    states = range(n)

    # Allocation, in a fixed order so clause emission is reproducible.
    for i in states:
        cat.add(("f", i))
    for i in states:
        for j in states:
            for a in range(sigma):
                cat.add(("t", i, j, a))
    if any(len(u) == 0 for u in stems):
        for i in states:
            cat.add(("d", 0, i, ()))
    for w in d_order:
        for i in states:
            for j in states:
                cat.add(("d", i, j, w))
        if len(w) >= 2:
            for i in states:
                for j in states:
                    for k in states:
                        cat.add(("o", i, j, k, w[0], w[1:]))
    for w in dd_order:
        for i in states:
            for j in states:
                cat.add(("D", i, j, w))
        if len(w) >= 2:
            for i in states:
                for j in states:
                    for k in states:
                        cat.add(("O", i, j, k, w[0], w[1:]))
    for v in periods:
        for m in range(m_top + 1):
            for i in states:
                for j in states:
                    cat.add(("x", v, i, j, m))
        for m in range(m_top):
            for i in states:
                for k in states:
                    for j in states:
                        cat.add(("h", v, i, k, j, m))
    for u, v in word_keys:
        for i in states:
            for j in states:
                cat.add(("u", u, v, i, j, m_top))
        for i in states:
            cat.add(("s", u, v, i, m_top))
    for v in periods:
        for i in states:
            for j in states:
                cat.add(("B", i, j, v, m_top))
        for i in states:
            cat.add(("L", i, v, m_top))
    for u, v in word_keys:
        for i in states:
            cat.add(("y", u, v, i))
        cat.add(("z", u, v))

    # Definitional clauses, in allocation order of the defined variable.
    clauses: List[Clause] = []
    if any(len(u) == 0 for u in stems):
        for i in states:
            lit = cat.get(("d", 0, i, ()))
            clauses.append((lit,) if i == 0 else (-lit,))
    for w in d_order:
        if len(w) == 1:
            for i in states:
                for j in states:
                    d = cat.get(("d", i, j, w))
                    t = cat.get(("t", i, j, w[0]))
                    clauses.extend([(-d, t), (-t, d)])
        else:
            a, rest = w[0], w[1:]
            for i in states:
                for j in states:
                    d = cat.get(("d", i, j, w))
                    os = [cat.get(("o", i, j, k, a, rest)) for k in states]
                    clauses.extend(_iff_disj(d, os))
            for i in states:
                for j in states:
                    for k in states:
                        o = cat.get(("o", i, j, k, a, rest))
                        clauses.extend(
                            _iff_conj(
                                o,
                                [cat.get(("t", i, k, a)), cat.get(("d", k, j, rest))],
                            )
                        )
    for w in dd_order:
        if len(w) == 1:
            for i in states:
                for j in states:
                    dd = cat.get(("D", i, j, w))
                    t = cat.get(("t", i, j, w[0]))
                    fi, fj = cat.get(("f", i)), cat.get(("f", j))
                    clauses.append(_clause(-dd, t))
                    clauses.append(_clause(-dd, fi, fj))
                    clauses.append(_clause(-t, -fi, dd))
                    if j != i:
                        clauses.append(_clause(-t, -fj, dd))
        else:
            a, rest = w[0], w[1:]
            for i in states:
                for j in states:
                    dd = cat.get(("D", i, j, w))
                    big_os = [cat.get(("O", i, j, k, a, rest)) for k in states]
                    clauses.extend(_iff_disj(dd, big_os))
            for i in states:
                for j in states:
                    for k in states:
                        big_o = cat.get(("O", i, j, k, a, rest))
                        df = cat.get(("D", i, k, (a,)))
                        dr = cat.get(("d", k, j, rest))
                        cf = cat.get(("d", i, k, (a,)))
                        er = cat.get(("D", k, j, rest))
                        clauses.append(_clause(-big_o, df, cf))
                        clauses.append(_clause(-big_o, df, er))
                        clauses.append(_clause(-big_o, dr, cf))
                        clauses.append(_clause(-big_o, dr, er))
                        clauses.append(_clause(-df, -dr, big_o))
                        clauses.append(_clause(-cf, -er, big_o))
    for v in periods:
        for i in states:
            for j in states:
                x0 = cat.get(("x", v, i, j, 0))
                d = cat.get(("d", i, j, v))
                clauses.extend([(-x0, d), (-d, x0)])
        for m in range(1, m_top + 1):
            for i in states:
                for j in states:
                    xm = cat.get(("x", v, i, j, m))
                    parts = [cat.get(("x", v, i, j, m - 1))]
                    parts.extend(
                        cat.get(("h", v, i, k, j, m - 1)) for k in states
                    )
                    clauses.extend(_iff_disj(xm, parts))
        for m in range(m_top):
            for i in states:
                for k in states:
                    for j in states:
                        h = cat.get(("h", v, i, k, j, m))
                        clauses.extend(
                            _iff_conj(
                                h,
                                [cat.get(("x", v, i, k, m)), cat.get(("x", v, k, j, m))],
                            )
                        )
    for u, v in word_keys:
        for i in states:
            for j in states:
                uv = cat.get(("u", u, v, i, j, m_top))
                clauses.extend(
                    _iff_conj(
                        uv,
                        [cat.get(("d", 0, i, u)), cat.get(("x", v, i, j, m_top))],
                    )
                )
        for j in states:
            s = cat.get(("s", u, v, j, m_top))
            clauses.extend(
                _iff_disj(s, [cat.get(("u", u, v, i, j, m_top)) for i in states])
            )
    for v in periods:
        for i in states:
            for j in states:
                b = cat.get(("B", i, j, v, m_top))
                clauses.extend(
                    _iff_conj(
                        b,
                        [cat.get(("D", i, j, v)), cat.get(("x", v, j, i, m_top))],
                    )
                )
        for i in states:
            big_l = cat.get(("L", i, v, m_top))
            clauses.extend(
                _iff_disj(big_l, [cat.get(("B", i, j, v, m_top)) for j in states])
            )
    for u, v in word_keys:
        for i in states:
            y = cat.get(("y", u, v, i))
            clauses.extend(
                _iff_conj(
                    y,
                    [cat.get(("s", u, v, i, m_top)), cat.get(("L", i, v, m_top))],
                )
            )
        z = cat.get(("z", u, v))
        clauses.extend(_iff_disj(z, [cat.get(("y", u, v, i)) for i in states]))

    # Optional constraints, then the word unit clauses.
    if q.symmetry_breaking:
        for j in range(1, n):
            clauses.append(
                tuple(
                    cat.get(("t", i, j, a)) for i in range(j) for a in range(sigma)
                )
            )
    for a in sorted(q.forbidden_start_letters):
        for j in states:
            clauses.append((-cat.get(("t", 0, j, a)),))
    for w in q.samples.sorted_good():
        clauses.append((cat.get(("z", w.stem, w.period)),))
    for w in q.samples.sorted_bad():
        clauses.append((-cat.get(("z", w.stem, w.period)),))

    cnf = CNF(len(cat), tuple(clauses))
    stats = EncodingStats(
        num_words=len(word_keys),
        total_word_length=sum(len(u) + len(v) for u, v in word_keys),
        alphabet_size=sigma,
        states=n,
        variable_count=len(cat),
        clause_count=len(clauses),
    )
    return cnf, cat, stats


def decode_model(model: Sequence[bool], catalog: VarCatalog, n: int, sigma: int) -> NBA:
    """Extract the automaton: start 0, edges from t, finals from f."""
    if len(model) < len(catalog) + 1:
        raise ValueError("model does not assign every catalog variable")
    finals = frozenset(i for i in range(n) if model[catalog.get(("f", i))])
    transitions = tuple(
        (i, a, j)
        for i in range(n)
        for a in range(sigma)
        for j in range(n)
        if model[catalog.get(("t", i, j, a))]
    )
    return NBA(n, sigma, 0, finals, transitions)


SolveFn = Callable[[CNF], Optional[Model]]


def solve_candidate(
    q: CandidateQuery,
    solve_fn: Optional[SolveFn] = None,
    budget: Optional[Budget] = None,
) -> Optional[NBA]:
    """Search for an n-state automaton separating the samples.

    Returns None when provably none exists.  A found automaton is
    re-checked word by word against the samples before being returned.
    """
    cnf, catalog, _ = build_encoding(q)
    if solve_fn is None:
        model = solve(cnf, budget)
    else:
        model = solve_fn(cnf)
    if model is None:
        return None
    candidate = decode_model(model, catalog, q.n, q.alphabet_size)
    for w in q.samples.good:
        if not member(candidate, w):
            raise RuntimeError(f"encoding bug: candidate rejects good word {w}")
    for w in q.samples.bad:
        if member(candidate, w):
            raise RuntimeError(f"encoding bug: candidate accepts bad word {w}")
    return candidate
