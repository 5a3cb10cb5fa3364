"""NBA complementation through deterministic parity automata.

Pipeline: determinize (history trees with named nodes, breakpoint
"green" events), complement the parity automaton by shifting every
priority, translate back to an NBA, then shrink.

History trees: ordered trees whose nodes carry nonempty state sets;
children are pairwise disjoint and strictly contained in the parent,
and the root holds exactly the currently reachable states.  A node
flashes green when its children jointly cover it (all tracked runs
passed a final state); it dies when its label empties.  The priority
of a move is decided by the oldest node (smallest name) with an event:
green at name e gives the even 2(e-1), death at name f the odd 2f-1,
no event gives the neutral odd 2n+1.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .automata import DPA, NBA, reduce_nba

# Frozen history tree node: (name, sorted state tuple, children tuple).
FrozenTree = Optional[tuple]

DEFAULT_STATE_CAP = 100000


class DeterminizationLimitExceeded(Exception):
    """The parity automaton grew past the configured state cap."""


class _Node:
    __slots__ = ("name", "label", "children")

    def __init__(self, name: int, label: set):
        self.name = name
        self.label = label
        self.children: List["_Node"] = []


def _freeze(node: Optional[_Node]) -> FrozenTree:
    if node is None:
        return None
    return (
        node.name,
        tuple(sorted(node.label)),
        tuple(_freeze(c) for c in node.children),
    )


def _thaw(frozen: FrozenTree) -> Optional[_Node]:
    if frozen is None:
        return None
    name, label, children = frozen
    node = _Node(name, set(label))
    node.children = [_thaw(c) for c in children]  # type: ignore[misc]
    return node


def _all_nodes(root: _Node) -> List[_Node]:
    out = []
    stack = [root]
    while stack:
        node = stack.pop()
        out.append(node)
        stack.extend(node.children)
    return out


def _tree_step(
    frozen: FrozenTree,
    letter_image: List[List[int]],
    finals: frozenset,
    neutral: int,
) -> Tuple[FrozenTree, int]:
    """One determinization move; returns the new tree and move priority."""
    root = _thaw(frozen)
    if root is None:
        return None, 1  # dead sink: stays empty, always losing

    nodes = sorted(_all_nodes(root), key=lambda v: v.name)
    old_max = nodes[-1].name

    # Subset step on every label.
    for node in nodes:
        image: set = set()
        for q in node.label:
            image.update(letter_image[q])
        node.label = image

    # Each node tracking final states sprouts a youngest child.
    next_name = old_max + 1
    for node in nodes:
        hit = node.label & finals
        if hit:
            node.children.append(_Node(next_name, set(hit)))
            next_name += 1

    # Horizontal merge: a state stays only in the oldest sibling holding it.
    def dedup(node: _Node) -> None:
        claimed: set = set()
        for child in node.children:
            if claimed:
                stack = [child]
                while stack:
                    v = stack.pop()
                    v.label -= claimed
                    stack.extend(v.children)
            claimed |= child.label
        for child in node.children:
            dedup(child)

    dedup(root)

    # Deaths: nodes whose label emptied (their whole subtree is empty).
    death: Optional[int] = None
    for node in _all_nodes(root):
        if not node.label and node.name <= old_max:
            death = node.name if death is None else min(death, node.name)
    if not root.label:
        return None, 1

    def drop_dead(node: _Node) -> None:
        node.children = [c for c in node.children if c.label]
        for c in node.children:
            drop_dead(c)

    drop_dead(root)

    # Green flash: children jointly cover the parent; descendants reset.
    green: Optional[int] = None
    for node in _all_nodes(root):
        if node.children:
            union: set = set()
            for c in node.children:
                union |= c.label
            if union == node.label:
                green = node.name if green is None else min(green, node.name)
                node.children = []

    # Compact renaming, preserving age order.
    survivors = sorted(_all_nodes(root), key=lambda v: v.name)
    for fresh, node in enumerate(survivors, start=1):
        node.name = fresh

    priority = neutral
    if green is not None:
        priority = 2 * (green - 1)
    if death is not None:
        priority = min(priority, 2 * death - 1)
    return _freeze(root), priority


@dataclass(frozen=True)
class Determinization:
    dpa: DPA
    trees: Tuple[FrozenTree, ...]  # per DPA state


def determinize(a: NBA, max_states: int = DEFAULT_STATE_CAP) -> Determinization:
    """Safra-style determinization with Piterman's named, compacted trees.

    The resulting DPA (min-even) accepts exactly L(a).  States carry
    the pair (tree, priority of the incoming move); the start state gets
    the neutral priority.
    """
    succ = a.successors()
    letter_images = [
        [sorted(set(succ[q][x])) for q in range(a.num_states)]
        for x in range(a.alphabet_size)
    ]
    neutral = 2 * a.num_states + 1

    initial_tree: FrozenTree = (1, (a.start,), ())
    start = (initial_tree, neutral)
    index: Dict[tuple, int] = {start: 0}
    order: List[tuple] = [start]
    todo = deque([start])
    transition: List[List[int]] = []
    while todo:
        tree, _ = state = todo.popleft()
        row = []
        for letter in range(a.alphabet_size):
            nxt = _tree_step(tree, letter_images[letter], a.finals, neutral)
            if nxt not in index:
                if len(order) >= max_states:
                    raise DeterminizationLimitExceeded(
                        f"parity automaton exceeds {max_states} states"
                    )
                index[nxt] = len(order)
                order.append(nxt)
                todo.append(nxt)
            row.append(index[nxt])
        transition.append(row)
    # BFS appends rows in discovery order, aligned with `order`.
    dpa = DPA(
        num_states=len(order),
        alphabet_size=a.alphabet_size,
        start=0,
        transition=tuple(tuple(r) for r in transition),
        priority=tuple(pr for _, pr in order),
    )
    return Determinization(dpa, tuple(tree for tree, _ in order))


def nba_to_dpa(a: NBA, max_states: int = DEFAULT_STATE_CAP) -> DPA:
    return determinize(a, max_states).dpa


def complement_dpa(d: DPA) -> DPA:
    """Swap acceptance by shifting every priority up by one."""
    return DPA(
        d.num_states,
        d.alphabet_size,
        d.start,
        d.transition,
        tuple(p + 1 for p in d.priority),
    )


def dpa_to_nba(d: DPA) -> NBA:
    """Parity to Buchi: guess the minimal recurring even priority.

    A waiting copy mirrors the parity automaton; at any point the run may
    commit to an even priority p, after which only states of priority
    >= p may be traversed and states of priority exactly p are final.
    """
    even_priorities = sorted({p for p in d.priority if p % 2 == 0})
    index: Dict[tuple, int] = {}
    for q in range(d.num_states):
        index[("wait", q)] = q
    for p in even_priorities:
        for q in range(d.num_states):
            if d.priority[q] >= p:
                index[("run", q, p)] = len(index)

    transitions = []
    for q in range(d.num_states):
        for letter in range(d.alphabet_size):
            target = d.transition[q][letter]
            transitions.append((index[("wait", q)], letter, index[("wait", target)]))
            for p in even_priorities:
                if d.priority[target] >= p:
                    transitions.append(
                        (index[("wait", q)], letter, index[("run", target, p)])
                    )
    for key, src in list(index.items()):
        if key[0] != "run":
            continue
        _, q, p = key
        for letter in range(d.alphabet_size):
            target = d.transition[q][letter]
            if d.priority[target] >= p:
                transitions.append((src, letter, index[("run", target, p)]))
    finals = frozenset(
        src for key, src in index.items() if key[0] == "run" and d.priority[key[1]] == key[2]
    )
    return NBA(
        num_states=len(index),
        alphabet_size=d.alphabet_size,
        start=index[("wait", d.start)],
        finals=finals,
        transitions=tuple(transitions),
    )


def complement_nba(a: NBA, max_states: int = DEFAULT_STATE_CAP) -> NBA:
    """L(result) = complement of L(a)."""
    small = reduce_nba(a)
    dpa = nba_to_dpa(small, max_states)
    return reduce_nba(dpa_to_nba(complement_dpa(dpa)))
