"""Line-oriented text formats for automata and certificates.

Automaton format (one directive per line, '#' starts a comment):

    NBA v1
    alphabet <k>
    states <n>
    start <q>
    final <i1> <i2> ...     (line always present, possibly without indices)
    trans <i> <a> <j>       (zero or more lines, sorted)

Words are "<stem>:<period>" with comma separated decimal letters, e.g.
":0" for 0^w and "0,1:1,0" for 01(10)^w.  Certificates:

    CERT v1
    n <n_min>
    good <word>
    bad <word>
"""

from __future__ import annotations

from typing import List

from .automata import NBA
from .minimize import Certificate
from .words import format_word, parse_word


class ParseError(ValueError):
    pass


def format_nba(a: NBA) -> str:
    lines = [
        "NBA v1",
        f"alphabet {a.alphabet_size}",
        f"states {a.num_states}",
        f"start {a.start}",
        ("final " + " ".join(str(f) for f in sorted(a.finals))).rstrip(),
    ]
    for i, x, j in a.transitions:
        lines.append(f"trans {i} {x} {j}")
    return "\n".join(lines) + "\n"


def _directive_lines(text: str) -> List[List[str]]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line.split())
    return out


def parse_nba(text: str) -> NBA:
    lines = _directive_lines(text)
    if not lines or lines[0] != ["NBA", "v1"]:
        raise ParseError("expected header 'NBA v1'")
    alphabet = states = start = None
    finals = None
    transitions = []

    def intval(tok: str, what: str) -> int:
        try:
            return int(tok)
        except ValueError:
            raise ParseError(f"bad {what}: {tok!r}") from None

    for parts in lines[1:]:
        key = parts[0]
        if key == "alphabet" and len(parts) == 2:
            alphabet = intval(parts[1], "alphabet size")
        elif key == "states" and len(parts) == 2:
            states = intval(parts[1], "state count")
        elif key == "start" and len(parts) == 2:
            start = intval(parts[1], "start state")
        elif key == "final":
            finals = frozenset(intval(tok, "final state") for tok in parts[1:])
        elif key == "trans" and len(parts) == 4:
            transitions.append(
                (
                    intval(parts[1], "transition source"),
                    intval(parts[2], "transition letter"),
                    intval(parts[3], "transition target"),
                )
            )
        else:
            raise ParseError(f"unrecognized directive: {' '.join(parts)!r}")
    if alphabet is None or states is None or start is None or finals is None:
        raise ParseError("missing one of: alphabet, states, start, final")
    try:
        return NBA(states, alphabet, start, finals, tuple(transitions))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def format_certificate(cert: Certificate) -> str:
    lines = ["CERT v1", f"n {cert.n_min}"]
    for w in sorted(cert.good):
        lines.append(f"good {format_word(w)}")
    for w in sorted(cert.bad):
        lines.append(f"bad {format_word(w)}")
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> Certificate:
    lines = _directive_lines(text)
    if not lines or lines[0] != ["CERT", "v1"]:
        raise ParseError("expected header 'CERT v1'")
    n_min = None
    good = set()
    bad = set()
    for parts in lines[1:]:
        if parts[0] == "n" and len(parts) == 2:
            try:
                n_min = int(parts[1])
            except ValueError:
                raise ParseError(f"bad size {parts[1]!r}") from None
        elif parts[0] in ("good", "bad") and len(parts) == 2:
            try:
                w = parse_word(parts[1])
            except ValueError as exc:
                raise ParseError(str(exc)) from None
            (good if parts[0] == "good" else bad).add(w)
        else:
            raise ParseError(f"unrecognized directive: {' '.join(parts)!r}")
    if n_min is None:
        raise ParseError("missing size line 'n <n_min>'")
    try:
        return Certificate(frozenset(good), frozenset(bad), n_min)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
