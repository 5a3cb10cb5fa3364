"""State minimization by candidate search and equivalence refutation.

The loop: shrink the input heuristically, complement it once, seed word
samples, then search for an n-state automaton consistent with the samples
(n ascending from 1).  Every candidate is checked against the input via
the stored complement; a discrepancy yields a fresh good or bad word and
the search repeats.  The first candidate surviving the check is returned:
it is equivalent, and no smaller automaton exists because the samples
(which the input itself separates) already ruled every smaller size out.

The final word sets plus the claimed size form a certificate that a
third party can re-check without trusting this code.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, FrozenSet, List, NamedTuple, Optional, Set, Tuple

from .automata import NBA, find_accepted_word, intersect, member, reduce_nba
from .complement import DEFAULT_STATE_CAP, complement_nba
from .encoding import CandidateQuery, SampleSets, solve_candidate
from .sat import Budget, CdclSolver, Model, SolverTimeout, check_model, external_solve
from .words import UPWord, canonicalize


@dataclass
class MinimizationConfig:
    solver: str = "internal"  # "internal" or "external:<path>"
    timeout_secs: float = 600.0
    seed_words: bool = True
    symmetry_breaking: bool = True
    extra_knowledge: bool = True
    bad_words_first: bool = True
    max_n: Optional[int] = None
    determinization_cap: int = DEFAULT_STATE_CAP

    def __post_init__(self) -> None:
        if self.timeout_secs <= 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class Certificate:
    """Final good/bad word sets plus the claimed minimal state count.

    Checkable by anyone: the words must be classified the same way by the
    original automaton, and no automaton of size n_min - 1 may separate
    them (an UNSAT answer of the candidate encoding).
    """

    good: FrozenSet[UPWord]
    bad: FrozenSet[UPWord]
    n_min: int

    def __post_init__(self) -> None:
        if self.n_min < 1:
            raise ValueError("claimed size must be positive")
        if self.good & self.bad:
            raise ValueError("good and bad words overlap")
        for w in self.good | self.bad:
            if canonicalize(w) != w:
                raise ValueError(f"certificate word {w} is not canonical")


@dataclass
class Trace:
    """Replayable event log of one minimization run.

    Events: ("good", word), ("bad", word), ("n", value),
    ("candidate", automaton), ("solver", stats dict).
    """

    events: List[Tuple[str, object]] = field(default_factory=list)

    def add(self, kind: str, payload: object) -> None:
        self.events.append((kind, payload))

    def replay(self) -> Tuple[Set[UPWord], Set[UPWord], int]:
        good: Set[UPWord] = set()
        bad: Set[UPWord] = set()
        n = 1
        for kind, payload in self.events:
            if kind == "good":
                good.add(payload)  # type: ignore[arg-type]
            elif kind == "bad":
                bad.add(payload)  # type: ignore[arg-type]
            elif kind == "n":
                n = payload  # type: ignore[assignment]
        return good, bad, n

    def candidates(self) -> List[NBA]:
        return [p for k, p in self.events if k == "candidate"]  # type: ignore[misc]

    def iterations(self) -> int:
        """Candidate-finder invocations (SAT calls), the loop count."""
        return sum(1 for k, _ in self.events if k in ("candidate", "unsat"))


@dataclass(frozen=True)
class MinimizationResult:
    automaton: NBA
    certificate: Certificate
    trace: Trace


class MinimizationIncomplete(Exception):
    """Budget ran out; carries the proven lower bound and the samples."""

    def __init__(self, reason: str, lower_bound: int, samples: SampleSets, trace: Trace):
        super().__init__(f"minimization stopped ({reason}); needs >= {lower_bound} states")
        self.reason = reason
        self.lower_bound = lower_bound
        self.samples = samples
        self.trace = trace


class CheckResult(NamedTuple):
    kind: str  # "equal" | "bad" | "good"
    word: Optional[UPWord]


def seed_word_list(sigma: int) -> List[UPWord]:
    """Start words: a^w, a b^w, (ab)^w, a(ab)^w for distinct letters a, b,
    plus w^w for the word listing every letter once."""
    words: List[UPWord] = []
    for a in range(sigma):
        for b in range(sigma):
            if a == b:
                continue
            words.append(UPWord((), (a,)))
            words.append(UPWord((a,), (b,)))
            words.append(UPWord((), (a, b)))
            words.append(UPWord((a,), (a, b)))
    words.append(UPWord((), tuple(range(sigma))))
    seen: Set[UPWord] = set()
    out: List[UPWord] = []
    for w in words:
        c = canonicalize(w)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def seed_words(a: NBA) -> SampleSets:
    """The start-word list, classified against the automaton."""
    samples = SampleSets()
    for w in seed_word_list(a.alphabet_size):
        if member(a, w):
            samples.add_good(w)
        else:
            samples.add_bad(w)
    return samples


def check_candidate(
    a: NBA,
    neg_a: NBA,
    candidate: NBA,
    bad_words_first: bool = True,
    determinization_cap: int = DEFAULT_STATE_CAP,
) -> CheckResult:
    """Equivalence test with witnesses.

    "bad": the word is accepted by the candidate but not by a;
    "good": accepted by a but not by the candidate.  The bad-word probe
    runs first by default since it needs no fresh complementation.
    """

    def bad_probe() -> Optional[UPWord]:
        return find_accepted_word(intersect(candidate, neg_a))

    def good_probe() -> Optional[UPWord]:
        neg_candidate = complement_nba(candidate, determinization_cap)
        return find_accepted_word(intersect(a, neg_candidate))

    probes = (
        (("bad", bad_probe), ("good", good_probe))
        if bad_words_first
        else (("good", good_probe), ("bad", bad_probe))
    )
    for kind, probe in probes:
        w = probe()
        if w is not None:
            return CheckResult(kind, w)
    return CheckResult("equal", None)


def _forbidden_start_letters(reduced: NBA) -> FrozenSet[int]:
    """Letters no word of the language starts with.  In a reduced
    automaton every state has an accepting continuation, so these are
    exactly the letters missing on the start state."""
    present = {a for i, a, _ in reduced.transitions if i == reduced.start}
    return frozenset(set(range(reduced.alphabet_size)) - present)


def _make_solver(
    cfg: MinimizationConfig, deadline: float, trace: Trace
) -> Callable[[object], Optional[Model]]:
    if cfg.solver == "internal":

        def solve_fn(cnf) -> Optional[Model]:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise SolverTimeout("global minimization budget exhausted")
            engine = CdclSolver(cnf)
            model = engine.solve(Budget(max_seconds=remaining))
            trace.add(
                "solver",
                {
                    "conflicts": engine.stats.conflicts,
                    "decisions": engine.stats.decisions,
                    "propagations": engine.stats.propagations,
                    "variables": cnf.num_vars,
                    "clauses": len(cnf.clauses),
                    "sat": model is not None,
                },
            )
            if model is not None and not check_model(cnf, model):
                raise AssertionError("internal solver produced a bad model")
            return model

        return solve_fn
    if cfg.solver.startswith("external:"):
        path = cfg.solver.split(":", 1)[1]

        def solve_fn_ext(cnf) -> Optional[Model]:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise SolverTimeout("global minimization budget exhausted")
            model = external_solve(cnf, path, Budget(max_seconds=remaining))
            trace.add(
                "solver",
                {
                    "variables": cnf.num_vars,
                    "clauses": len(cnf.clauses),
                    "sat": model is not None,
                },
            )
            return model

        return solve_fn_ext
    raise ValueError(f"unknown solver choice {cfg.solver!r}")


def minimize(a: NBA, cfg: Optional[MinimizationConfig] = None) -> MinimizationResult:
    """Smallest automaton with the language of a, plus certificate and log.

    Raises MinimizationIncomplete with the proven lower bound when the
    time budget or a configured size cap is hit first.
    """
    cfg = cfg or MinimizationConfig()
    deadline = time.monotonic() + cfg.timeout_secs
    trace = Trace()
    solve_fn = _make_solver(cfg, deadline, trace)

    reduced = reduce_nba(a)
    neg = complement_nba(reduced, cfg.determinization_cap)
    samples = SampleSets()
    if cfg.seed_words:
        for w in seed_word_list(reduced.alphabet_size):
            if member(reduced, w):
                samples.add_good(w)
                trace.add("good", w)
            else:
                samples.add_bad(w)
                trace.add("bad", w)
    forbidden = (
        _forbidden_start_letters(reduced) if cfg.extra_knowledge else frozenset()
    )

    n = 1
    trace.add("n", 1)

    def certificate(size: int) -> Certificate:
        return Certificate(frozenset(samples.good), frozenset(samples.bad), size)

    while True:
        if n >= reduced.num_states:
            # Every smaller size is refuted and the reduced input itself
            # separates the samples: it is already minimal.
            return MinimizationResult(reduced, certificate(reduced.num_states), trace)
        if cfg.max_n is not None and n > cfg.max_n:
            raise MinimizationIncomplete("max-n", n, samples, trace)
        if time.monotonic() > deadline:
            raise MinimizationIncomplete("timeout", n, samples, trace)

        query = CandidateQuery(
            n=n,
            alphabet_size=reduced.alphabet_size,
            samples=samples,
            symmetry_breaking=cfg.symmetry_breaking,
            forbidden_start_letters=forbidden,
        )
        try:
            candidate = solve_candidate(query, solve_fn)
        except SolverTimeout:
            raise MinimizationIncomplete("timeout", n, samples, trace) from None
        if candidate is None:
            trace.add("unsat", n)
            n += 1
            trace.add("n", n)
            continue
        trace.add("candidate", candidate)

        verdict = check_candidate(
            reduced,
            neg,
            candidate,
            bad_words_first=cfg.bad_words_first,
            determinization_cap=cfg.determinization_cap,
        )
        if verdict.kind == "equal":
            return MinimizationResult(candidate, certificate(n), trace)
        word = canonicalize(verdict.word)  # type: ignore[arg-type]
        if verdict.kind == "bad":
            samples.add_bad(word)
            trace.add("bad", word)
        else:
            samples.add_good(word)
            trace.add("good", word)


def verify_certificate(
    a: NBA,
    cert: Certificate,
    solve_fn: Optional[Callable[[object], Optional[Model]]] = None,
    budget: Optional[Budget] = None,
) -> bool:
    """Third-party check: words classified correctly by a, and no
    automaton with one state less separates them.

    A solver timeout propagates as SolverTimeout: the answer is then
    indeterminate, not False.
    """
    for w in cert.good:
        if not member(a, w):
            return False
    for w in cert.bad:
        if member(a, w):
            return False
    if cert.n_min <= 1:
        return True
    query = CandidateQuery(
        n=cert.n_min - 1,
        alphabet_size=a.alphabet_size,
        samples=SampleSets(cert.good, cert.bad),
        symmetry_breaking=True,
    )
    if solve_fn is None:
        from .sat import solve as internal_solve

        smaller = solve_candidate(query, lambda cnf: internal_solve(cnf, budget))
    else:
        smaller = solve_candidate(query, solve_fn)
    return smaller is None
