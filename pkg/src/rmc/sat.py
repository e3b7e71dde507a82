"""Propositional satisfiability: a CDCL solver, DIMACS I/O and an external bridge.

Literals are non-zero ints in DIMACS convention (``-3`` is "not x3").
The internal solver uses two watched literals, first-UIP learning with
local minimization, activity-based branching (ties broken by ascending
variable id), phase saving, Luby restarts and learnt-clause reduction.
It is incremental: clauses may be added between calls to :meth:`solve`,
and each call may carry assumptions.
"""
from __future__ import annotations

import heapq
import os
import random
import subprocess
import tempfile
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


class SatError(ValueError):
    pass


@dataclass
class SatResult:
    status: str
    model: Optional[dict] = None

    @property
    def sat(self) -> bool:
        return self.status == SAT

    def __bool__(self):
        return self.sat


class Cnf:
    """A clause list with a declared variable count."""

    def __init__(self, num_vars: int = 0, clauses: Iterable[Sequence[int]] = ()):
        self.num_vars = num_vars
        self.clauses: list[tuple] = []
        self.has_empty = False
        for c in clauses:
            self.add_clause(c)

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def add_clause(self, lits: Sequence[int]) -> "Cnf":
        lits = tuple(lits)
        for l in lits:
            if l == 0 or abs(l) > self.num_vars:
                raise SatError(f"literal {l} refers to an undeclared variable")
        if not lits:
            self.has_empty = True
        self.clauses.append(lits)
        return self

    def evaluate(self, model) -> bool:
        return all(any(_lit_true(model, l) for l in c) for c in self.clauses)

    def __len__(self):
        return len(self.clauses)


def _lit_true(model, lit: int) -> bool:
    v = model[abs(lit)]
    return v if lit > 0 else not v


def add_clause(c: Cnf, lits: Sequence[int]) -> Cnf:
    return c.add_clause(lits)


# ---------------------------------------------------------------------------
# CDCL


def _luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class Solver:
    """Incremental CDCL solver."""

    def __init__(self, seed: Optional[int] = None, restart_base: int = 100):
        self.n = 0
        self.clauses: list = []          # index -> list of internal literals, or None
        self.learnt: list = []           # index -> bool
        self.cla_act: list = []
        self.lbd: list = []
        self.watches: list = [[], []]    # per internal literal
        self.lval: list = [0, 0]         # per internal literal: 1 true, -1 false, 0 unassigned
        self.level: list = [0]
        self.reason: list = [None]
        self.activity: list = [0.0]
        self.phase: list = [False]
        self.trail: list = []
        self.trail_lim: list = []
        self.qhead = 0
        self.heap: list = []
        self.var_inc = 1.0
        self.cla_inc = 1.0
        self.ok = True
        self.rng = random.Random(seed) if seed is not None else None
        self.restart_base = restart_base
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.num_learnts = 0
        self.max_learnts = 2000.0
        self._model: Optional[list] = None

    # -- variables and clauses -------------------------------------------

    def new_var(self) -> int:
        self.n += 1
        v = self.n
        self.watches.extend(([], []))
        self.lval.extend((0, 0))
        self.level.append(0)
        self.reason.append(None)
        act = self.rng.random() * 1e-5 if self.rng else 0.0
        self.activity.append(act)
        self.phase.append(False)
        heapq.heappush(self.heap, (-act, v))
        return v

    def _ensure(self, v: int):
        while self.n < v:
            self.new_var()

    @staticmethod
    def _enc(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a clause; returns False once the clause set is unsatisfiable at level 0."""
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        seen = set()
        out = []
        for lit in lits:
            if lit == 0:
                raise SatError("literal 0 is not allowed")
            self._ensure(abs(lit))
            L = self._enc(lit)
            if L ^ 1 in seen:
                return True  # tautology
            if L in seen:
                continue
            val = self.lval[L]
            if val == 1:
                return True
            if val == -1:
                continue
            seen.add(L)
            out.append(L)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._assign(out[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self._attach(out, learnt=False)
        return True

    def _attach(self, lits: list, learnt: bool, lbd: int = 0) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.learnt.append(learnt)
        self.cla_act.append(0.0)
        self.lbd.append(lbd)
        self.watches[lits[0]].append(ci)
        self.watches[lits[1]].append(ci)
        if learnt:
            self.num_learnts += 1
        return ci

    # -- assignment ----------------------------------------------------------

    def _assign(self, L: int, reason):
        lval = self.lval
        lval[L] = 1
        lval[L ^ 1] = -1
        v = L >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(L)

    def _cancel_until(self, lvl: int):
        if len(self.trail_lim) <= lvl:
            return
        lim = self.trail_lim[lvl]
        lval, phase, heap, act, reason = self.lval, self.phase, self.heap, self.activity, self.reason
        for k in range(len(self.trail) - 1, lim - 1, -1):
            L = self.trail[k]
            v = L >> 1
            lval[L] = 0
            lval[L ^ 1] = 0
            reason[v] = None
            phase[v] = not (L & 1)
            heapq.heappush(heap, (-act[v], v))
        del self.trail[lim:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, lim)

    def _propagate(self):
        lval = self.lval
        clauses = self.clauses
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            keep = []
            n_ws = len(ws)
            k = 0
            while k < n_ws:
                ci = ws[k]
                k += 1
                c = clauses[ci]
                if c is None:
                    continue
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if lval[first] == 1:
                    keep.append(ci)
                    continue
                for idx in range(2, len(c)):
                    l = c[idx]
                    if lval[l] != -1:
                        c[1] = l
                        c[idx] = false_lit
                        watches[l].append(ci)
                        break
                else:
                    keep.append(ci)
                    if lval[first] == -1:
                        keep.extend(ws[k:])
                        watches[false_lit] = keep
                        self.qhead = len(trail)
                        return ci
                    self._assign(first, ci)
            watches[false_lit] = keep
        return None

    # -- learning ------------------------------------------------------------

    def _bump_var(self, v: int):
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, self.n + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[u], u) for u in range(1, self.n + 1) if self.lval[2 * u] == 0]
            heapq.heapify(self.heap)
        elif self.lval[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _bump_clause(self, ci: int):
        self.cla_act[ci] += self.cla_inc
        if self.cla_act[ci] > 1e20:
            for i in range(len(self.cla_act)):
                self.cla_act[i] *= 1e-20
            self.cla_inc *= 1e-20

    def _analyze(self, confl: int):
        seen = set()
        learnt = [0]
        path = 0
        p = None
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        level, reason, clauses = self.level, self.reason, self.clauses
        while True:
            c = clauses[confl]
            if self.learnt[confl]:
                self._bump_clause(confl)
            for q in (c if p is None else c[1:]):
                v = q >> 1
                if v not in seen and level[v] > 0:
                    seen.add(v)
                    self._bump_var(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while (self.trail[idx] >> 1) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen.discard(p >> 1)
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # local minimization: drop literals implied by the rest of the clause
        keep = [learnt[0]]
        in_clause = {q >> 1 for q in learnt}
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None:
                keep.append(q)
                continue
            if all((l >> 1) in in_clause or level[l >> 1] == 0 for l in clauses[r][1:]):
                continue
            keep.append(q)
        learnt = keep
        if len(learnt) == 1:
            back = 0
        else:
            best = max(range(1, len(learnt)), key=lambda i: level[learnt[i] >> 1])
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = level[learnt[1] >> 1]
        lbd = len({level[q >> 1] for q in learnt})
        return learnt, back, lbd

    def _reduce_db(self):
        locked = set()
        for L in self.trail:
            r = self.reason[L >> 1]
            if r is not None:
                locked.add(r)
        cands = [ci for ci, c in enumerate(self.clauses)
                 if c is not None and self.learnt[ci] and ci not in locked and self.lbd[ci] > 2]
        cands.sort(key=lambda ci: (-self.lbd[ci], self.cla_act[ci]))
        for ci in cands[: len(cands) // 2]:
            self.clauses[ci] = None
            self.num_learnts -= 1

    # -- search --------------------------------------------------------------

    def _pick(self) -> Optional[int]:
        heap, lval, act = self.heap, self.lval, self.activity
        while heap:
            neg, v = heapq.heappop(heap)
            if lval[2 * v] == 0 and -neg == act[v]:
                return v
        for v in range(1, self.n + 1):
            if lval[2 * v] == 0:
                return v
        return None

    def solve(self, assumptions: Sequence[int] = (), conflict_limit: Optional[int] = None) -> SatResult:
        self._model = None
        if not self.ok:
            return SatResult(UNSAT)
        for a in assumptions:
            self._ensure(abs(a))
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return SatResult(UNSAT)
        assume = [self._enc(a) for a in assumptions]
        budget = None if conflict_limit is None else self.conflicts + conflict_limit
        restart = 0
        status = None
        while status is None:
            limit = _luby(restart) * self.restart_base
            restart += 1
            status = self._search(limit, assume, budget)
        self._cancel_until(0) if status != SAT else None
        if status == SAT:
            model = {v: self.lval[2 * v] == 1 for v in range(1, self.n + 1)}
            self._cancel_until(0)
            return SatResult(SAT, model)
        return SatResult(status)

    def _search(self, limit: int, assume: list, budget):
        local = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                local += 1
                if not self.trail_lim:
                    self.ok = False
                    return UNSAT
                learnt, back, lbd = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    ci = self._attach(learnt, learnt=True, lbd=lbd)
                    self._bump_clause(ci)
                    self._assign(learnt[0], ci)
                self.var_inc /= 0.95
                self.cla_inc /= 0.999
                continue
            if budget is not None and self.conflicts >= budget:
                self._cancel_until(0)
                return UNKNOWN
            if local >= limit:
                self._cancel_until(0)
                return None
            if self.num_learnts - len(self.trail) >= self.max_learnts:
                self._reduce_db()
                self.max_learnts *= 1.1
            # assumptions occupy the first decision levels
            nxt = None
            while len(self.trail_lim) < len(assume):
                L = assume[len(self.trail_lim)]
                val = self.lval[L]
                if val == 1:
                    self.trail_lim.append(len(self.trail))
                elif val == -1:
                    self._cancel_until(0)
                    return UNSAT
                else:
                    nxt = L
                    break
            if nxt is None:
                v = self._pick()
                if v is None:
                    return SAT
                self.decisions += 1
                nxt = 2 * v if self.phase[v] else 2 * v + 1
            self.trail_lim.append(len(self.trail))
            self._assign(nxt, None)


def solve(cnf: Cnf, assumptions: Sequence[int] = (), conflict_limit: Optional[int] = None,
          seed: Optional[int] = None) -> SatResult:
    """Solve ``cnf`` from scratch with the internal solver."""
    if cnf.has_empty:
        return SatResult(UNSAT)
    s = Solver(seed=seed)
    s._ensure(cnf.num_vars)
    for c in cnf.clauses:
        if not s.add_clause(c):
            return SatResult(UNSAT)
    res = s.solve(assumptions, conflict_limit)
    if res.sat:
        res.model = {v: res.model.get(v, False) for v in range(1, cnf.num_vars + 1)}
    return res


# ---------------------------------------------------------------------------
# DIMACS and external solvers


def export_dimacs(cnf: Cnf, assumptions: Sequence[int] = ()) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses) + len(assumptions)}"]
    for c in cnf.clauses:
        lines.append(" ".join(map(str, c)) + " 0")
    for a in assumptions:
        lines.append(f"{a} 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> Cnf:
    num_vars = None
    pending: list[int] = []
    clauses = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise SatError(f"bad header {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(lit)
    if num_vars is None:
        raise SatError("missing 'p cnf' header")
    if pending:
        clauses.append(pending)
    return Cnf(num_vars, clauses)


def import_model(text: str, num_vars: Optional[int] = None) -> SatResult:
    """Read solver output: an ``s`` status line and ``v`` value lines."""
    status = None
    values: dict = {}
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = SAT
            elif word == "UNSATISFIABLE":
                status = UNSAT
            elif word in ("UNKNOWN", "INDETERMINATE"):
                status = UNKNOWN
            else:
                raise SatError(f"unknown status line {line!r}")
        elif line.startswith("v "):
            for tok in line[2:].split():
                try:
                    lit = int(tok)
                except ValueError:
                    raise SatError(f"bad value token {tok!r}") from None
                if lit != 0:
                    values[abs(lit)] = lit > 0
    if status is None:
        raise SatError("solver output has no status line")
    if status != SAT:
        return SatResult(status)
    n = num_vars if num_vars is not None else max(values, default=0)
    return SatResult(SAT, {v: values.get(v, False) for v in range(1, n + 1)})


class ExternalSolver:
    """Runs a DIMACS solver executable per query; models are re-checked."""

    def __init__(self, path: str, timeout: Optional[float] = None):
        self.path = path
        self.timeout = timeout
        self.cnf = Cnf()

    @property
    def n(self):
        return self.cnf.num_vars

    def new_var(self) -> int:
        return self.cnf.new_var()

    def add_clause(self, lits) -> bool:
        lits = tuple(lits)
        for l in lits:
            while abs(l) > self.cnf.num_vars:
                self.cnf.new_var()
        self.cnf.add_clause(lits)
        return not self.cnf.has_empty

    def solve(self, assumptions: Sequence[int] = (), conflict_limit=None) -> SatResult:
        if self.cnf.has_empty:
            return SatResult(UNSAT)
        fd, name = tempfile.mkstemp(suffix=".cnf")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(export_dimacs(self.cnf, assumptions))
            try:
                proc = subprocess.run([self.path, name], capture_output=True, text=True,
                                      timeout=self.timeout)
            except subprocess.TimeoutExpired:
                return SatResult(UNKNOWN)
        finally:
            os.unlink(name)
        res = import_model(proc.stdout, self.cnf.num_vars)
        if res.sat:
            if not self.cnf.evaluate(res.model) or not all(_lit_true(res.model, a) for a in assumptions):
                raise SatError("external solver returned a model that violates the clauses")
        return res


def make_solver(spec: str = "internal", seed: Optional[int] = None):
    """``internal`` or ``external:<path>``."""
    if spec == "internal":
        return Solver(seed=seed)
    if spec.startswith("external:"):
        path = spec.split(":", 1)[1]
        if not path:
            raise SatError("external solver path missing")
        return ExternalSolver(path)
    raise SatError(f"unknown solver {spec!r}")


def truth_table(cnf: Cnf) -> Optional[dict]:
    """First satisfying assignment by exhaustive enumeration (small instances only)."""
    n = cnf.num_vars
    if n > 24:
        raise SatError("truth table enumeration is limited to 24 variables")
    for bits in range(1 << n):
        model = {v: bool(bits >> (v - 1) & 1) for v in range(1, n + 1)}
        if cnf.evaluate(model):
            return model
    return None
