"""Exhaustive minimization sweeps over all small automata.

Enumerates every automaton with a fixed start state 0, all final-flag
patterns with at least one final state, and every transition relation;
for each it minimizes the automaton and its complement and reports the
two size histograms.  Language-equal duplicates are caught early by
keying work on the shrunken, renumbered form, which cuts the SAT work
by an order of magnitude without touching the reported counts.
"""

from __future__ import annotations

import json
import multiprocessing
import os
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .automata import NBA, reduce_nba
from .complement import complement_nba
from .formats import format_nba, parse_nba
from .minimize import MinimizationConfig, minimize, verify_certificate


def enumerate_nbas(n: int, sigma: int, require_final: bool = True) -> Iterator[NBA]:
    """All automata over n states and sigma letters: start fixed at 0,
    every final-flag pattern (with >= 1 final unless require_final is
    off) and every subset of the n*sigma*n possible transitions."""
    triples = [
        (i, a, j) for i in range(n) for a in range(sigma) for j in range(n)
    ]
    n_triples = len(triples)
    first_mask = 1 if require_final else 0
    for final_mask in range(first_mask, 1 << n):
        if require_final and final_mask == 0:
            continue
        finals = frozenset(i for i in range(n) if final_mask >> i & 1)
        for trans_mask in range(1 << n_triples):
            transitions = tuple(
                triples[b] for b in range(n_triples) if trans_mask >> b & 1
            )
            yield NBA(n, sigma, 0, finals, transitions)


def census_size(n: int, sigma: int, require_final: bool = True) -> int:
    finals = (1 << n) - 1 if require_final else (1 << n)
    return finals * (1 << (n * n * sigma))


def canonical_form(a: NBA) -> NBA:
    """Renumber states in BFS discovery order from the start (letters
    ascending); isomorphic automata map to the identical value."""
    succ = a.successors()
    order = [a.start]
    seen = {a.start}
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        for letter in range(a.alphabet_size):
            for w in succ[v][letter]:
                if w not in seen:
                    seen.add(w)
                    order.append(w)
    for v in range(a.num_states):  # unreachable leftovers keep their order
        if v not in seen:
            order.append(v)
    remap = {old: new for new, old in enumerate(order)}
    return NBA(
        a.num_states,
        a.alphabet_size,
        remap[a.start],
        frozenset(remap[f] for f in a.finals),
        tuple((remap[i], x, remap[j]) for i, x, j in a.transitions),
    )


@dataclass(frozen=True)
class CensusReport:
    states: int
    alphabet: int
    total: int
    min_sizes: Dict[int, int]
    complement_sizes: Dict[int, int]
    max_complement: int


def format_report(r: CensusReport) -> str:
    lines = [
        f"census states={r.states} alphabet={r.alphabet}",
        f"total {r.total}",
    ]
    for size in sorted(r.min_sizes):
        lines.append(f"minimal-size {size}: {r.min_sizes[size]}")
    for size in sorted(r.complement_sizes):
        lines.append(f"complement-size {size}: {r.complement_sizes[size]}")
    lines.append(f"max-complement {r.max_complement}")
    return "\n".join(lines) + "\n"


def _measure_class(args: Tuple[str, float, bool]) -> Tuple[str, int, int]:
    """Worker: minimal size of the class representative and of its
    complement.  Certificates are optionally re-verified on the spot."""
    rep_text, timeout, verify = args
    rep = parse_nba(rep_text)
    cfg = MinimizationConfig(timeout_secs=timeout)
    res = minimize(rep, cfg)
    comp = complement_nba(rep)
    comp_res = minimize(comp, cfg)
    if verify:
        if not verify_certificate(rep, res.certificate):
            raise AssertionError(f"certificate check failed for\n{rep_text}")
        if not verify_certificate(comp, comp_res.certificate):
            raise AssertionError(f"complement certificate check failed for\n{rep_text}")
    return rep_text, res.automaton.num_states, comp_res.automaton.num_states


def _write_checkpoint(path: str, n: int, sigma: int, done: Dict[str, List[int]]) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump({"states": n, "alphabet": sigma, "classes": done}, fh)
    os.replace(tmp, path)


def _load_checkpoint(path: str, n: int, sigma: int) -> Dict[str, List[int]]:
    with open(path) as fh:
        data = json.load(fh)
    if data.get("states") != n or data.get("alphabet") != sigma:
        raise ValueError(f"checkpoint {path} belongs to a different census")
    return {k: list(v) for k, v in data["classes"].items()}


def run_census(
    n: int,
    sigma: int,
    jobs: int = 1,
    checkpoint: Optional[str] = None,
    per_class_timeout: float = 600.0,
    verify: bool = False,
    progress: Optional[Callable[[int, int], None]] = None,
) -> CensusReport:
    """Full sweep; also writes/refreshes the checkpoint file as classes
    finish so an interrupted run can resume where it stopped."""
    class_members: Dict[str, int] = Counter()
    for a in enumerate_nbas(n, sigma):
        rep_text = format_nba(canonical_form(reduce_nba(a)))
        class_members[rep_text] += 1
    total = sum(class_members.values())

    done: Dict[str, List[int]] = {}
    if checkpoint and os.path.exists(checkpoint):
        done = _load_checkpoint(checkpoint, n, sigma)
    pending = [rep for rep in class_members if rep not in done]
    pending.sort()
    finished = len(done)
    num_classes = len(class_members)

    def record(rep_text: str, size: int, comp_size: int) -> None:
        nonlocal finished
        done[rep_text] = [size, comp_size]
        finished += 1
        if checkpoint and (finished % 50 == 0 or finished == num_classes):
            _write_checkpoint(checkpoint, n, sigma, done)
        if progress:
            progress(finished, num_classes)

    tasks = [(rep, per_class_timeout, verify) for rep in pending]
    try:
        if jobs > 1 and tasks:
            with multiprocessing.Pool(jobs) as pool:
                for rep_text, size, comp_size in pool.imap_unordered(
                    _measure_class, tasks
                ):
                    record(rep_text, size, comp_size)
        else:
            for task in tasks:
                record(*_measure_class(task))
    finally:
        if checkpoint and done:
            _write_checkpoint(checkpoint, n, sigma, done)

    min_sizes: Counter = Counter()
    comp_sizes: Counter = Counter()
    for rep_text, count in class_members.items():
        size, comp_size = done[rep_text]
        min_sizes[size] += count
        comp_sizes[comp_size] += count
    return CensusReport(
        states=n,
        alphabet=sigma,
        total=total,
        min_sizes=dict(min_sizes),
        complement_sizes=dict(comp_sizes),
        max_complement=max(comp_sizes),
    )
