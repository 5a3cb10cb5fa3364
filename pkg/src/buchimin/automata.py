"""Nondeterministic Buchi automata and deterministic parity automata.

States are 0..n-1, letters 0..sigma-1.  An NBA accepts an infinite word
iff some run visits a final state infinitely often.  A DPA accepts iff
the minimal priority seen infinitely often along its unique run is even.

All values here are immutable; operations are pure functions and safe to
use from concurrent workers.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple

from .words import UPWord, canonicalize

Transition = Tuple[int, int, int]  # (from, letter, to)


@dataclass(frozen=True)
class NBA:
    num_states: int
    alphabet_size: int
    start: int
    finals: FrozenSet[int]
    transitions: Tuple[Transition, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "transitions", tuple(sorted(set(self.transitions))))
        if self.num_states < 1:
            raise ValueError("automaton needs at least one state")
        if self.alphabet_size < 1:
            raise ValueError("alphabet needs at least one letter")
        if not 0 <= self.start < self.num_states:
            raise ValueError(f"start state {self.start} out of range")
        for f in self.finals:
            if not 0 <= f < self.num_states:
                raise ValueError(f"final state {f} out of range")
        for i, a, j in self.transitions:
            if not (0 <= i < self.num_states and 0 <= j < self.num_states):
                raise ValueError(f"transition ({i},{a},{j}) endpoint out of range")
            if not 0 <= a < self.alphabet_size:
                raise ValueError(f"transition ({i},{a},{j}) letter out of range")

    def successors(self) -> List[List[List[int]]]:
        """succ[i][a] = sorted targets of a-transitions from i."""
        succ: List[List[List[int]]] = [
            [[] for _ in range(self.alphabet_size)] for _ in range(self.num_states)
        ]
        for i, a, j in self.transitions:
            succ[i][a].append(j)
        return succ

    def adjacency(self) -> List[List[int]]:
        """adj[i] = sorted targets over all letters, deduplicated."""
        adj: List[set] = [set() for _ in range(self.num_states)]
        for i, _, j in self.transitions:
            adj[i].add(j)
        return [sorted(s) for s in adj]


@dataclass(frozen=True)
class DPA:
    """Deterministic parity automaton, min-even acceptance."""

    num_states: int
    alphabet_size: int
    start: int
    transition: Tuple[Tuple[int, ...], ...]  # transition[i][a] = j, total
    priority: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.num_states < 1 or self.alphabet_size < 1:
            raise ValueError("need at least one state and one letter")
        if not 0 <= self.start < self.num_states:
            raise ValueError("start state out of range")
        if len(self.transition) != self.num_states or len(self.priority) != self.num_states:
            raise ValueError("transition/priority tables must cover every state")
        for row in self.transition:
            if len(row) != self.alphabet_size:
                raise ValueError("transition function must be total")
            for j in row:
                if not 0 <= j < self.num_states:
                    raise ValueError("transition target out of range")
        if any(p < 0 for p in self.priority):
            raise ValueError("priorities must be nonnegative")


@dataclass(frozen=True)
class SccPartition:
    """Map state -> component id; ids are topologically ordered, i.e.
    every transition goes from a component to one with an equal or
    larger id."""

    assignment: Tuple[int, ...]
    num_components: int

    def components(self) -> List[List[int]]:
        comps: List[List[int]] = [[] for _ in range(self.num_components)]
        for state, c in enumerate(self.assignment):
            comps[c].append(state)
        return comps


def sccs(a: NBA) -> SccPartition:
    """Strongly connected components, Kosaraju's two-pass algorithm."""
    n = a.num_states
    fwd = a.adjacency()
    rev: List[List[int]] = [[] for _ in range(n)]
    for i in range(n):
        for j in fwd[i]:
            rev[j].append(i)

    # First pass: iterative DFS on the forward graph, recording finish order.
    order: List[int] = []
    seen = [False] * n
    for root in range(n):
        if seen[root]:
            continue
        stack: List[Tuple[int, int]] = [(root, 0)]
        seen[root] = True
        while stack:
            v, idx = stack.pop()
            if idx < len(fwd[v]):
                stack.append((v, idx + 1))
                w = fwd[v][idx]
                if not seen[w]:
                    seen[w] = True
                    stack.append((w, 0))
            else:
                order.append(v)

    # Second pass: DFS on the reverse graph in decreasing finish order.
    # Components come out in topological order of the condensation.
    assignment = [-1] * n
    comp = 0
    for v in reversed(order):
        if assignment[v] != -1:
            continue
        stack2 = [v]
        assignment[v] = comp
        while stack2:
            u = stack2.pop()
            for w in rev[u]:
                if assignment[w] == -1:
                    assignment[w] = comp
                    stack2.append(w)
        comp += 1
    return SccPartition(tuple(assignment), comp)


def universal_nba(alphabet_size: int) -> NBA:
    """One final state with self-loops on every letter; accepts everything."""
    return NBA(
        num_states=1,
        alphabet_size=alphabet_size,
        start=0,
        finals=frozenset({0}),
        transitions=tuple((0, a, 0) for a in range(alphabet_size)),
    )


def empty_nba(alphabet_size: int) -> NBA:
    """One non-final stuck state; accepts nothing."""
    return NBA(1, alphabet_size, 0, frozenset(), ())


def word_automaton(w: UPWord, alphabet_size: Optional[int] = None) -> NBA:
    """Deterministic lasso automaton accepting exactly {stem . period^omega}.

    Stem states 0..|u|-1 feed a cycle of |v| final states.
    """
    if alphabet_size is None:
        alphabet_size = w.max_letter + 1
    if w.max_letter >= alphabet_size:
        raise ValueError("word letter out of alphabet range")
    nu, nv = len(w.stem), len(w.period)
    transitions = []
    for k, a in enumerate(w.stem):
        transitions.append((k, a, k + 1))
    for k, a in enumerate(w.period):
        target = nu if k == nv - 1 else nu + k + 1
        transitions.append((nu + k, a, target))
    return NBA(
        num_states=nu + nv,
        alphabet_size=alphabet_size,
        start=0,
        finals=frozenset(range(nu, nu + nv)),
        transitions=tuple(transitions),
    )


def intersect(a: NBA, b: NBA) -> NBA:
    """Two-copy Buchi product; L = L(a) & L(b), at most 2|a||b| states.

    Copy 0 waits for an a-final, copy 1 for a b-final; the product
    accepts on a-finals in copy 0, forcing both to recur.
    """
    if a.alphabet_size != b.alphabet_size:
        raise ValueError("alphabet mismatch in intersection")
    succ_a = a.successors()
    succ_b = b.successors()

    start = (a.start, b.start, 0)
    index = {start: 0}
    todo = deque([start])
    states: List[Tuple[int, int, int]] = [start]
    transitions: List[Transition] = []
    while todo:
        p, q, copy = todo.popleft()
        src = index[(p, q, copy)]
        if copy == 0:
            next_copy = 1 if p in a.finals else 0
        else:
            next_copy = 0 if q in b.finals else 1
        for letter in range(a.alphabet_size):
            for p2 in succ_a[p][letter]:
                for q2 in succ_b[q][letter]:
                    key = (p2, q2, next_copy)
                    if key not in index:
                        index[key] = len(states)
                        states.append(key)
                        todo.append(key)
                    transitions.append((src, letter, index[key]))
    finals = frozenset(
        idx for (p, q, copy), idx in index.items() if copy == 0 and p in a.finals
    )
    return NBA(len(states), a.alphabet_size, 0, finals, tuple(transitions))


def _reachable(a: NBA) -> List[bool]:
    adj = a.adjacency()
    seen = [False] * a.num_states
    seen[a.start] = True
    todo = deque([a.start])
    while todo:
        v = todo.popleft()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                todo.append(w)
    return seen


def _anchors(a: NBA) -> List[bool]:
    """Final states lying on a cycle (nontrivial SCC or self-loop)."""
    part = sccs(a)
    comp_size = [0] * part.num_components
    for c in part.assignment:
        comp_size[c] += 1
    self_loop = set()
    for i, _, j in a.transitions:
        if i == j:
            self_loop.add(i)
    out = [False] * a.num_states
    for f in a.finals:
        if comp_size[part.assignment[f]] >= 2 or f in self_loop:
            out[f] = True
    return out


def _can_reach(a: NBA, targets: Sequence[bool]) -> List[bool]:
    """States from which some target is reachable (possibly in 0 steps)."""
    rev: List[List[int]] = [[] for _ in range(a.num_states)]
    for i, _, j in a.transitions:
        rev[j].append(i)
    seen = list(targets)
    todo = deque(i for i, t in enumerate(targets) if t)
    while todo:
        v = todo.popleft()
        for w in rev[v]:
            if not seen[w]:
                seen[w] = True
                todo.append(w)
    return seen


def has_accepting_lasso(a: NBA) -> bool:
    """L(a) nonempty: a final state on a cycle is reachable from start."""
    reach = _reachable(a)
    anchors = _anchors(a)
    return any(reach[i] and anchors[i] for i in range(a.num_states))


def find_accepted_word(a: NBA) -> Optional[UPWord]:
    """A canonical ultimately periodic word in L(a), or None if empty.

    Picks a final state on a cycle, preferring short distance from the
    start then small component size; the stem is a shortest path, the
    period a shortest cycle inside the component.
    """
    anchors = _anchors(a)
    part = sccs(a)
    comp_size = [0] * part.num_components
    for c in part.assignment:
        comp_size[c] += 1
    succ = a.successors()

    # BFS from the start over letters to get shortest stems.
    dist = [-1] * a.num_states
    parent: List[Optional[Tuple[int, int]]] = [None] * a.num_states  # (prev, letter)
    dist[a.start] = 0
    todo = deque([a.start])
    while todo:
        v = todo.popleft()
        for letter in range(a.alphabet_size):
            for w in succ[v][letter]:
                if dist[w] == -1:
                    dist[w] = dist[v] + 1
                    parent[w] = (v, letter)
                    todo.append(w)

    candidates = [
        f for f in range(a.num_states) if anchors[f] and dist[f] != -1
    ]
    if not candidates:
        return None
    knot = min(candidates, key=lambda f: (dist[f], comp_size[part.assignment[f]], f))

    stem: List[int] = []
    v = knot
    while dist[v] > 0:
        prev, letter = parent[v]  # type: ignore[misc]
        stem.append(letter)
        v = prev
    stem.reverse()

    # Shortest nonempty cycle through the knot, staying in its component.
    comp = part.assignment[knot]
    pdist = [-1] * a.num_states
    pparent: List[Optional[Tuple[int, int]]] = [None] * a.num_states
    todo = deque()
    best: Optional[Tuple[int, int]] = None  # (last state, letter) closing the cycle
    for letter in range(a.alphabet_size):
        for w in succ[knot][letter]:
            if part.assignment[w] != comp:
                continue
            if w == knot:
                best = (knot, letter)
                break
            if pdist[w] == -1:
                pdist[w] = 1
                pparent[w] = (knot, letter)
                todo.append(w)
        if best:
            break
    while best is None and todo:
        v = todo.popleft()
        for letter in range(a.alphabet_size):
            stop = False
            for w in succ[v][letter]:
                if part.assignment[w] != comp:
                    continue
                if w == knot:
                    best = (v, letter)
                    stop = True
                    break
                if pdist[w] == -1:
                    pdist[w] = pdist[v] + 1
                    pparent[w] = (v, letter)
                    todo.append(w)
            if stop:
                break
    assert best is not None, "anchor state must close a cycle in its component"
    period: List[int] = [best[1]]
    v = best[0]
    while v != knot:
        prev, letter = pparent[v]  # type: ignore[misc]
        period.append(letter)
        v = prev
    period.reverse()
    return canonicalize(UPWord(tuple(stem), tuple(period)))


def member(a: NBA, w: UPWord) -> bool:
    """Does a accept stem . period^omega?

    Decided as nonemptiness of the product with the word's lasso automaton.
    """
    if w.max_letter >= a.alphabet_size:
        raise ValueError(f"word {w} uses letters outside alphabet of size {a.alphabet_size}")
    return has_accepting_lasso(intersect(a, word_automaton(w, a.alphabet_size)))


def _restrict(a: NBA, keep: Sequence[bool]) -> NBA:
    """Subautomaton on kept states (start must be kept), stable renumbering."""
    remap = {}
    for old in range(a.num_states):
        if keep[old]:
            remap[old] = len(remap)
    transitions = tuple(
        (remap[i], x, remap[j]) for i, x, j in a.transitions if keep[i] and keep[j]
    )
    return NBA(
        num_states=len(remap),
        alphabet_size=a.alphabet_size,
        start=remap[a.start],
        finals=frozenset(remap[f] for f in a.finals if keep[f]),
        transitions=transitions,
    )


def _reduce_once(a: NBA) -> NBA:
    # Drop states unreachable from the start.
    reach = _reachable(a)
    if not all(reach):
        a = _restrict(a, reach)

    # Drop states with no accepting continuation (stuck states).
    live = _can_reach(a, _anchors(a))
    if not live[a.start]:
        return empty_nba(a.alphabet_size)
    if not all(live):
        a = _restrict(a, live)

    # Universal states: greatest S within the finals such that every member
    # has, for every letter, a successor inside S.  From any such state
    # every word is accepted, so S collapses to one all-accepting sink.
    succ = a.successors()
    s = set(a.finals)
    changed = True
    while changed:
        changed = False
        for q in sorted(s):
            if any(not any(t in s for t in succ[q][x]) for x in range(a.alphabet_size)):
                s.remove(q)
                changed = True
    if s:
        sink = a.start if a.start in s else min(s)
        drop = s - {sink}
        transitions = set()
        for i, x, j in a.transitions:
            if i in s:
                continue  # universal members keep only the sink self-loops
            transitions.add((i, x, sink if j in s else j))
        for x in range(a.alphabet_size):
            transitions.add((sink, x, sink))
        # Drop competing transitions: reaching the sink is always best.
        has_sink_edge = {(i, x) for i, x, j in transitions if j == sink}
        transitions = {
            (i, x, j) for i, x, j in transitions if j == sink or (i, x) not in has_sink_edge
        }
        a = NBA(a.num_states, a.alphabet_size, a.start, a.finals, tuple(transitions))
        if drop:
            a = _restrict(a, [q not in drop for q in range(a.num_states)])
    return a


def reduce_nba(a: NBA) -> NBA:
    """Linear-time language-preserving shrinking, iterated to a fixpoint.

    Passes, in order: drop unreachable states, drop states with no
    accepting continuation, merge detected universal states into a single
    sink, and prune transitions that compete with an edge into that sink.
    """
    while True:
        b = _reduce_once(a)
        if b == a:
            return a
        a = b


def _sample_raw(rng: random.Random, n: int, sigma: int, p_final: float, p_trans: float) -> NBA:
    finals = frozenset(i for i in range(n) if rng.random() < p_final)
    transitions = tuple(
        (i, a, j)
        for i in range(n)
        for a in range(sigma)
        for j in range(n)
        if rng.random() < p_trans
    )
    return NBA(n, sigma, 0, finals, transitions)


def random_nba(
    n: int,
    sigma: int,
    p_final: float = 0.5,
    p_trans: float = 0.15,
    seed: int = 0,
    max_tries: int = 100000,
) -> NBA:
    """Random automaton: each state final with p_final, each possible
    transition present with p_trans.  Samples are skipped until one has
    every state reachable and every state able to accept some word.
    """
    if n < 1 or sigma < 1:
        raise ValueError("need n >= 1 and sigma >= 1")
    if not (0 <= p_final <= 1 and 0 <= p_trans <= 1):
        raise ValueError("probabilities must lie in [0, 1]")
    rng = random.Random(seed)
    for _ in range(max_tries):
        a = _sample_raw(rng, n, sigma, p_final, p_trans)
        reach = _reachable(a)
        if not all(reach):
            continue
        live = _can_reach(a, _anchors(a))
        if all(live):
            return a
    raise RuntimeError(f"no valid random automaton found in {max_tries} tries")


def dpa_member(d: DPA, w: UPWord) -> bool:
    """Run simulation on an ultimately periodic word, min-even acceptance."""
    if w.max_letter >= d.alphabet_size:
        raise ValueError("word letter out of alphabet range")
    state = d.start
    for a in w.stem:
        state = d.transition[state][a]
    # Iterate period blocks until the block-start state repeats; the
    # minimum priority entered over the repeating section decides.
    seen = {}
    block_mins: List[int] = []
    while state not in seen:
        seen[state] = len(block_mins)
        lo = None
        for a in w.period:
            state = d.transition[state][a]
            p = d.priority[state]
            lo = p if lo is None else min(lo, p)
        block_mins.append(lo)  # type: ignore[arg-type]
    cycle_min = min(block_mins[seen[state]:])
    return cycle_min % 2 == 0
