"""CNF formulas, an embedded CDCL SAT solver, and a DIMACS adapter
for driving external solvers.

Clauses are tuples of nonzero integer literals (sign = polarity,
magnitude = 1-based variable index).  Models are lists of booleans
indexed by variable (index 0 unused).  Every model returned from any
backend is re-checked against the formula before being handed out.
"""

from __future__ import annotations

import os
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

Clause = Tuple[int, ...]
Model = List[bool]


class SolverTimeout(Exception):
    """Search budget (wall clock or conflicts) exhausted."""


class ExternalSolverError(Exception):
    """Base for failures of an external solver invocation."""


class ExternalProcessError(ExternalSolverError):
    pass


class ExternalOutputError(ExternalSolverError):
    pass


class ExternalModelError(ExternalSolverError):
    """External solver claimed SAT but its model fails the clause check."""


@dataclass(frozen=True)
class CNF:
    num_vars: int
    clauses: Tuple[Clause, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "clauses", tuple(tuple(c) for c in self.clauses)
        )
        if self.num_vars < 1:
            raise ValueError("formula needs at least one variable")
        for c in self.clauses:
            if len(c) == 0:
                continue  # empty clause allowed: trivially unsatisfiable
            for lit in c:
                if lit == 0:
                    raise ValueError("literal 0 is not allowed")
                if abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} exceeds num_vars {self.num_vars}")


@dataclass
class Budget:
    max_seconds: Optional[float] = 600.0
    max_conflicts: Optional[int] = None


@dataclass
class SolverStats:
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    restarts: int = 0
    learned: int = 0


def check_model(cnf: CNF, model: Sequence[bool]) -> bool:
    """True iff the assignment satisfies every clause."""
    if len(model) < cnf.num_vars + 1:
        return False
    for clause in cnf.clauses:
        if not any(model[lit] if lit > 0 else not model[-lit] for lit in clause):
            return False
    return True


def _luby(i: int) -> int:
    # Luby sequence 1 1 2 1 1 2 4 ... (1-based index).
    k = 1
    while (1 << (k + 1)) <= i + 1:
        k += 1
    if (1 << (k + 1)) == i + 2:
        return 1 << k
    return _luby(i - (1 << k) + 1)


class CdclSolver:
    """Conflict-driven clause learning with two watched literals,
    activity-based branching, phase saving and Luby restarts.

    Fully deterministic: no randomized choices anywhere.
    """

    def __init__(self, cnf: CNF):
        self.nvars = cnf.num_vars
        n = self.nvars
        self.assign = [0] * (n + 1)  # 0 free, 1 true, -1 false
        self.level = [0] * (n + 1)
        self.reason: List[Optional[list]] = [None] * (n + 1)
        self.saved = [-1] * (n + 1)  # phase saving, default false
        self.activity = [0.0] * (n + 1)
        self.var_inc = 1.0
        self.watches: List[list] = [[] for _ in range(2 * n + 2)]
        self.trail: List[int] = []
        self.trail_lim: List[int] = []
        self.qhead = 0
        self.learnts: List[list] = []
        self.ok = True
        self.stats = SolverStats()
        self.order: List[Tuple[float, int]] = []  # lazy max-heap entries

        import heapq

        self._heappush = heapq.heappush
        self._heappop = heapq.heappop
        for v in range(1, n + 1):
            self._heappush(self.order, (0.0, v))

        for raw in cnf.clauses:
            lits = sorted(set(raw), key=abs)
            if any(-l in lits for l in lits):
                continue  # tautology
            if not self._add_clause(list(lits)):
                self.ok = False
                return

    # ----- literal helpers ------------------------------------------------

    def _widx(self, lit: int) -> int:
        return (lit << 1) if lit > 0 else ((-lit) << 1) | 1

    def _value(self, lit: int) -> int:
        v = self.assign[lit] if lit > 0 else -self.assign[-lit]
        return v

    # ----- clause management ----------------------------------------------

    def _add_clause(self, lits: list) -> bool:
        if len(lits) == 0:
            return False
        if len(lits) == 1:
            return self._enqueue(lits[0], None)
        self.watches[self._widx(lits[0])].append(lits)
        self.watches[self._widx(lits[1])].append(lits)
        return True

    def _enqueue(self, lit: int, reason: Optional[list]) -> bool:
        val = self._value(lit)
        if val == 1:
            return True
        if val == -1:
            return False
        var = abs(lit)
        self.assign[var] = 1 if lit > 0 else -1
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)
        return True

    def _propagate(self) -> Optional[list]:
        """Exhaust implications; returns a conflicting clause or None."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            self.stats.propagations += 1
            false_lit = -lit
            wl = self.watches[self._widx(false_lit)]
            keep = []
            i = 0
            n_w = len(wl)
            while i < n_w:
                clause = wl[i]
                i += 1
                # Put the false watch at position 1.
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if self._value(first) == 1:
                    keep.append(clause)
                    continue
                # Look for a replacement watch.
                moved = False
                for k in range(2, len(clause)):
                    if self._value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches[self._widx(clause[1])].append(clause)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(clause)
                if not self._enqueue(first, clause):
                    # Conflff: keep remaining watchers, report the clause.
                    keep.extend(wl[i:])
                    del wl[:]
                    wl.extend(keep)
                    return clause
            del wl[:]
            wl.extend(keep)
        return None

    # ----- branching ------------------------------------------------------

    def _bump(self, var: int) -> None:
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for v in range(1, self.nvars + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100
        self._heappush(self.order, (-self.activity[var], var))

    def _decide(self) -> int:
        while self.order:
            act, var = self.order[0]
            if self.assign[var] == 0 and -act == self.activity[var]:
                return var * self.saved[var]
            self._heappop(self.order)
        return 0

    # ----- conflict analysis ----------------------------------------------

    def _analyze(self, conflict: list) -> Tuple[list, int]:
        learnt = [0]
        seen = [False] * (self.nvars + 1)
        counter = 0
        p = 0
        index = len(self.trail)
        current = len(self.trail_lim)
        clause: Optional[list] = conflict
        while True:
            assert clause is not None
            for q in clause:
                if q == p:
                    continue
                var = abs(q)
                if not seen[var] and self.level[var] > 0:
                    seen[var] = True
                    self._bump(var)
                    if self.level[var] == current:
                        counter += 1
                    else:
                        learnt.append(q)
            while True:
                index -= 1
                if seen[abs(self.trail[index])]:
                    break
            p = self.trail[index]
            seen[abs(p)] = False
            counter -= 1
            if counter == 0:
                break
            clause = self.reason[abs(p)]
        learnt[0] = -p

        if len(learnt) == 1:
            return learnt, 0
        # Second watch: the literal with the highest remaining level.
        max_i = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _backjump(self, target_level: int) -> None:
        if len(self.trail_lim) <= target_level:
            return
        limit = self.trail_lim[target_level]
        for lit in reversed(self.trail[limit:]):
            var = abs(lit)
            self.saved[var] = 1 if lit > 0 else -1
            self.assign[var] = 0
            self.reason[var] = None
            self._heappush(self.order, (-self.activity[var], var))
        del self.trail[limit:]
        del self.trail_lim[target_level:]
        self.qhead = len(self.trail)

    def _reduce_db(self) -> None:
        locked = {id(self.reason[abs(c[0])]) for c in self.learnts if self.reason[abs(c[0])] is not None}
        self.learnts.sort(key=len)
        keep_n = len(self.learnts) // 2
        victims = [
            c for c in self.learnts[keep_n:] if len(c) > 2 and id(c) not in locked
        ]
        survivors = self.learnts[:keep_n] + [
            c for c in self.learnts[keep_n:] if len(c) <= 2 or id(c) in locked
        ]
        victim_ids = {id(c) for c in victims}
        for c in victims:
            for lit in (c[0], c[1]):
                wl = self.watches[self._widx(lit)]
                for k, cl in enumerate(wl):
                    if id(cl) in victim_ids and cl is c:
                        wl[k] = wl[-1]
                        wl.pop()
                        break
        self.learnts = survivors

    # ----- main loop --------------------------------------------------------

    def solve(self, budget: Optional[Budget] = None) -> Optional[Model]:
        if not self.ok:
            return None
        budget = budget or Budget()
        deadline = (
            time.monotonic() + budget.max_seconds
            if budget.max_seconds is not None
            else None
        )
        max_learnts = 4000.0
        restart_count = 0
        conflicts_until_restart = 128 * _luby(1)
        conflicts_here = 0

        while True:
            conflict = self._propagate()
            if conflict is not None:
                self.stats.conflicts += 1
                conflicts_here += 1
                if len(self.trail_lim) == 0:
                    return None
                learnt, bt_level = self._analyze(conflict)
                self._backjump(bt_level)
                if len(learnt) == 1:
                    if not self._enqueue(learnt[0], None):
                        return None
                else:
                    self.learnts.append(learnt)
                    self.stats.learned += 1
                    self.watches[self._widx(learnt[0])].append(learnt)
                    self.watches[self._widx(learnt[1])].append(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc /= 0.95
                if self.stats.conflicts % 512 == 0:
                    if deadline is not None and time.monotonic() > deadline:
                        raise SolverTimeout("wall-clock budget exhausted")
                if (
                    budget.max_conflicts is not None
                    and self.stats.conflicts >= budget.max_conflicts
                ):
                    raise SolverTimeout("conflict budget exhausted")
                continue

            if conflicts_here >= conflicts_until_restart:
                restart_count += 1
                self.stats.restarts += 1
                conflicts_here = 0
                conflicts_until_restart = 128 * _luby(restart_count + 1)
                self._backjump(0)
                continue

            if len(self.learnts) >= max_learnts:
                self._reduce_db()
                max_learnts *= 1.3

            decision = self._decide()
            if decision == 0:
                model = [False] * (self.nvars + 1)
                for v in range(1, self.nvars + 1):
                    model[v] = self.assign[v] == 1
                return model
            self.stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(decision, None)


def solve(cnf: CNF, budget: Optional[Budget] = None) -> Optional[Model]:
    """Embedded solve: model (index 0 unused) if SAT, None if UNSAT.

    Raises SolverTimeout if the budget runs out.  SAT answers are
    verified against the formula before being returned.
    """
    solver = CdclSolver(cnf)
    model = solver.solve(budget)
    if model is not None and not check_model(cnf, model):
        raise AssertionError("internal solver produced a bad model")
    return model


# ----- DIMACS ---------------------------------------------------------------


def write_dimacs(cnf: CNF) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}\n"]
    for clause in cnf.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0\n")
    return "".join(lines)


def read_dimacs(text: str) -> CNF:
    num_vars = None
    num_clauses = None
    tokens: List[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            num_vars, num_clauses = int(parts[2]), int(parts[3])
            continue
        tokens.extend(int(tok) for tok in line.split())
    if num_vars is None:
        raise ValueError("missing DIMACS header")
    clauses: List[Clause] = []
    current: List[int] = []
    for tok in tokens:
        if tok == 0:
            clauses.append(tuple(current))
            current = []
        else:
            current.append(tok)
    if current:
        raise ValueError("last clause not 0-terminated")
    if num_clauses is not None and len(clauses) != num_clauses:
        raise ValueError(
            f"header announced {num_clauses} clauses, found {len(clauses)}"
        )
    return CNF(num_vars, tuple(clauses))


def parse_result_file(text: str, num_vars: int) -> Optional[Model]:
    """Parse the conventional result file: SAT plus 0-terminated literals,
    or UNSAT.  Returns a model or None; malformed input raises."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ExternalOutputError("empty result file")
    status = lines[0].upper()
    if status.startswith("UNSAT"):
        return None
    if not status.startswith("SAT"):
        raise ExternalOutputError(f"unrecognized status line {lines[0]!r}")
    lits: List[int] = []
    for line in lines[1:]:
        try:
            lits.extend(int(tok) for tok in line.split())
        except ValueError:
            raise ExternalOutputError(f"bad literal line {line!r}") from None
    if lits and lits[-1] == 0:
        lits = lits[:-1]
    elif 0 in lits:
        raise ExternalOutputError("literal 0 in the middle of the model")
    model = [False] * (num_vars + 1)
    for lit in lits:
        var = abs(lit)
        if var == 0 or var > num_vars:
            raise ExternalOutputError(f"model literal {lit} out of range")
        model[var] = lit > 0
    return model


def external_solve(
    cnf: CNF, solver_path: str, budget: Optional[Budget] = None
) -> Optional[Model]:
    """Run `<solver_path> <in.cnf> <out.result>` and parse the result.

    The returned model is verified against the formula; a solver claiming
    a bogus model raises ExternalModelError rather than being trusted.
    """
    budget = budget or Budget()
    with tempfile.TemporaryDirectory(prefix="buchimin-sat-") as tmp:
        cnf_path = os.path.join(tmp, "in.cnf")
        out_path = os.path.join(tmp, "out.result")
        with open(cnf_path, "w") as fh:
            fh.write(write_dimacs(cnf))
        try:
            subprocess.run(
                [solver_path, cnf_path, out_path],
                timeout=budget.max_seconds,
                stdout=subprocess.DEVNULL,
                stderr=subprocess.DEVNULL,
                check=False,
            )
        except subprocess.TimeoutExpired:
            raise SolverTimeout(f"external solver exceeded {budget.max_seconds}s")
        except OSError as exc:
            raise ExternalProcessError(f"cannot run {solver_path}: {exc}") from exc
        if not os.path.exists(out_path):
            raise ExternalProcessError(f"{solver_path} wrote no result file")
        with open(out_path) as fh:
            model = parse_result_file(fh.read(), cnf.num_vars)
    if model is not None and not check_model(cnf, model):
        raise ExternalModelError(f"{solver_path} returned a model violating the formula")
    return model
