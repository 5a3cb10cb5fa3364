"""Plain DPLL reference solver with the file protocol of external solvers.

Usage: python -m buchimin.dpll <in.cnf> <out.result>

Deliberately a different algorithm family from the embedded CDCL engine
(chronological backtracking, no clause learning) so that agreement between
the two backends is a meaningful cross-check.
"""

from __future__ import annotations

import sys
from typing import List, Optional

from .sat import CNF, read_dimacs


def dpll_solve(cnf: CNF) -> Optional[List[bool]]:
    """Model (index 0 unused) or None.  Complete chronological search."""
    nvars = cnf.num_vars
    clauses = []
    for c in cnf.clauses:
        lits = sorted(set(c), key=abs)
        if any(-l in lits for l in lits):
            continue
        if not lits:
            return None
        clauses.append(lits)

    assign = [0] * (nvars + 1)
    trail: List[int] = []

    def value(lit: int) -> int:
        v = assign[abs(lit)]
        return v if lit > 0 else -v

    def set_lit(lit: int) -> None:
        assign[abs(lit)] = 1 if lit > 0 else -1
        trail.append(lit)

    def unit_propagate() -> bool:
        changed = True
        while changed:
            changed = False
            for clause in clauses:
                unassigned = None
                count = 0
                satisfied = False
                for lit in clause:
                    v = value(lit)
                    if v == 1:
                        satisfied = True
                        break
                    if v == 0:
                        unassigned = lit
                        count += 1
                if satisfied:
                    continue
                if count == 0:
                    return False
                if count == 1:
                    set_lit(unassigned)  # type: ignore[arg-type]
                    changed = True
        return True

    def pick() -> int:
        for clause in clauses:
            if any(value(lit) == 1 for lit in clause):
                continue
            for lit in clause:
                if value(lit) == 0:
                    return lit
        return 0

    def search() -> bool:
        mark = len(trail)
        if not unit_propagate():
            while len(trail) > mark:
                assign[abs(trail.pop())] = 0
            return False
        lit = pick()
        if lit == 0:
            return True
        for choice in (lit, -lit):
            sub_mark = len(trail)
            set_lit(choice)
            if search():
                return True
            while len(trail) > sub_mark:
                assign[abs(trail.pop())] = 0
        while len(trail) > mark:
            assign[abs(trail.pop())] = 0
        return False

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10 * nvars + 1000))
    if not search():
        return None
    return [False] + [assign[v] == 1 for v in range(1, nvars + 1)]


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if len(argv) != 2:
        print("usage: python -m buchimin.dpll <in.cnf> <out.result>", file=sys.stderr)
        return 2
    with open(argv[0]) as fh:
        cnf = read_dimacs(fh.read())
    model = dpll_solve(cnf)
    with open(argv[1], "w") as fh:
        if model is None:
            fh.write("UNSAT\n")
        else:
            lits = [v if model[v] else -v for v in range(1, cnf.num_vars + 1)]
            fh.write("SAT\n")
            fh.write(" ".join(str(l) for l in lits) + " 0\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
