"""Angluin-style active learning of witnesses, and stratified solving.

Teachers answer membership queries for a target language and equivalence
queries for hypotheses. The target is never given as an automaton: for
verification problems it is the set of reachable configurations, or the
least solution of a Horn-shaped matrix, both computed explicitly on one
word length at a time.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .automata import (
    Alphabet,
    Dfa,
    Nfa,
    accepts,
    determinize,
    minimize,
    product,
    shortest_word,
)
from .logic import (
    Atom,
    Const,
    Equal,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Structure,
    holds,
    nnf,
    parse_formula,
    split_universal,
)
from .relations import AutomaticRelation, from_language, image, member, to_language


class LearningError(RuntimeError):
    pass


class QueryBudgetExceeded(LearningError):
    pass


class NoSolution(LearningError):
    """The matrix has no solution (for example, a Bad word is reachable)."""

    def __init__(self, message: str, word=None):
        super().__init__(message)
        self.word = word


class HornError(ValueError):
    pass


# ---------------------------------------------------------------------------
# L*


class Teacher:
    """Interface: ``membership(word) -> bool`` and ``equivalence(dfa) -> word | None``."""

    def membership(self, word: tuple) -> bool:
        raise NotImplementedError

    def equivalence(self, hypothesis: Dfa) -> Optional[tuple]:
        raise NotImplementedError


class LanguageTeacher(Teacher):
    """A teacher that knows its target automaton (used for testing the learner)."""

    def __init__(self, target: Nfa):
        self.target = determinize(target)

    def membership(self, word):
        return accepts(self.target, word)

    def equivalence(self, hypothesis):
        diff = product(self.target, hypothesis, "difference")
        w = shortest_word(diff)
        if w is None:
            w = shortest_word(product(hypothesis, self.target, "difference"))
        return w


@dataclass
class LearningLog:
    membership_queries: int = 0
    equivalence_queries: int = 0
    rounds: list = field(default_factory=list)


class ObservationTable:
    """Prefix set S, suffix set E and the membership cache."""

    def __init__(self, alphabet: Alphabet, query: Callable[[tuple], bool]):
        self.alphabet = alphabet
        self.letters = list(alphabet.letters)
        self.S: list = [()]
        self.E: list = [()]
        self.T: dict = {}
        self._query = query

    def value(self, word: tuple) -> bool:
        got = self.T.get(word)
        if got is None:
            got = self.T[word] = bool(self._query(word))
        return got

    def row(self, s: tuple) -> tuple:
        return tuple(self.value(s + e) for e in self.E)

    def find_unclosed(self) -> Optional[tuple]:
        rows = {self.row(s) for s in self.S}
        for s in self.S:
            for a in self.letters:
                sa = s + (a,)
                if self.row(sa) not in rows:
                    return sa
        return None

    def find_inconsistency(self) -> Optional[tuple]:
        by_row: dict = {}
        for s in self.S:
            by_row.setdefault(self.row(s), []).append(s)
        for group in by_row.values():
            for s1, s2 in itertools.combinations(group, 2):
                for a in self.letters:
                    for e in self.E:
                        if self.value(s1 + (a,) + e) != self.value(s2 + (a,) + e):
                            return (a,) + e
        return None

    def add_prefixes(self, word: tuple):
        for i in range(len(word) + 1):
            p = tuple(word[:i])
            if p not in self.S:
                self.S.append(p)

    def hypothesis(self) -> Dfa:
        reps: dict = {}
        for s in sorted(self.S, key=lambda w: (len(w), w)):
            reps.setdefault(self.row(s), s)
        index = {r: i for i, r in enumerate(reps)}
        start = index[self.row(())]
        trans = []
        for r, s in reps.items():
            trans.append({a: (index[self.row(s + (a,))],) for a in self.letters})
        acc = [index[r] for r, s in reps.items() if self.value(s)]
        d = Dfa._raw(self.alphabet, len(reps), start, trans, acc)
        if start != 0:
            d = minimize(d)
        return d


def lstar(teacher: Teacher, alphabet: Alphabet, max_rounds: int = 1000,
          max_queries: Optional[int] = None, log: Optional[LearningLog] = None) -> Dfa:
    """Learn a DFA for the teacher's target; counterexamples add all their prefixes."""
    log = log if log is not None else LearningLog()

    def query(w):
        log.membership_queries += 1
        if max_queries is not None and log.membership_queries > max_queries:
            raise QueryBudgetExceeded(f"more than {max_queries} membership queries")
        return teacher.membership(w)

    table = ObservationTable(alphabet, query)
    for _ in range(max_rounds):
        while True:
            sa = table.find_unclosed()
            if sa is not None:
                table.S.append(sa)
                continue
            e = table.find_inconsistency()
            if e is not None:
                table.E.append(e)
                continue
            break
        h = table.hypothesis()
        log.equivalence_queries += 1
        cex = teacher.equivalence(h)
        log.rounds.append({"S": len(table.S), "E": len(table.E), "states": h.n,
                           "membership": log.membership_queries,
                           "counterexample": None if cex is None else alphabet.decode(cex)})
        if cex is None:
            return h
        if accepts(h, cex) == table.value(tuple(cex)):
            raise LearningError("teacher returned a word on which the hypothesis is correct")
        table.add_prefixes(tuple(cex))
    raise QueryBudgetExceeded(f"no answer after {max_rounds} equivalence queries")


# ---------------------------------------------------------------------------
# Horn analysis


@dataclass
class HornClause:
    """``body -> head``; ``head`` is an unknown atom or ``None`` (a goal clause)."""

    vars: tuple
    body: list          # literals: (positive: bool, Atom | Equal)
    head: Optional[Atom]
    source: str = ""


def _clause_literals(f: Formula) -> list:
    parts = []
    todo = [nnf(f)]
    while todo:
        g = todo.pop()
        if isinstance(g, Or):
            todo.extend(reversed(g.parts))
        else:
            parts.append(g)
    out = []
    for p in parts:
        if isinstance(p, (Atom, Equal)):
            out.append((True, p))
        elif isinstance(p, Not) and isinstance(p.body, (Atom, Equal)):
            out.append((False, p.body))
        elif isinstance(p, Const):
            if p.value:
                return [(True, p)]
        else:
            raise HornError(f"not a clause: {f}")
    return out


def horn_clauses(matrix: list, unknowns: Sequence[str]) -> list:
    """Rewrite each conjunct as a Horn clause over ``unknowns``; reject otherwise."""
    unknowns = set(unknowns)
    out = []
    for cid, sentence in matrix:
        vars_, inner = split_universal(sentence)
        lits = _clause_literals(inner)
        if any(isinstance(a, Const) for _, a in lits):
            continue
        heads = [a for pos, a in lits if pos and isinstance(a, Atom) and a.name in unknowns]
        if len(heads) > 1:
            raise HornError(f"{cid}: more than one positive occurrence of a synthesized relation")
        body = []
        for pos, a in lits:
            if pos and isinstance(a, Atom) and a.name in unknowns:
                continue
            body.append((not pos, a))
        out.append(HornClause(vars_, body, heads[0] if heads else None, cid))
    return out


def polarity(f: Formula, name: str, positive: bool = True) -> set:
    """Polarities (``'+'``/``'-'``) of occurrences of relation ``name``."""
    from .logic import And

    if isinstance(f, Atom):
        return {"+" if positive else "-"} if f.name == name else set()
    if isinstance(f, (Equal, Const)):
        return set()
    if isinstance(f, Not):
        return polarity(f.body, name, not positive)
    if isinstance(f, (And, Or)):
        out = set()
        for p in f.parts:
            out |= polarity(p, name, positive)
        return out
    if isinstance(f, Implies):
        return polarity(f.left, name, not positive) | polarity(f.right, name, positive)
    if isinstance(f, (Exists, Forall)):
        return polarity(f.body, name, positive)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# least fixpoints on slices


class SliceSolver:
    """Least solution of unary Horn clauses restricted to words of one length.

    Variables of a clause are bound through its positive body atoms: unknown
    atoms range over derived facts, fixed unary atoms over their slice and
    fixed binary atoms (length-preserving) over images of bound words.
    """

    def __init__(self, structure: Structure, clauses: list, unknowns: Sequence[str]):
        from .oracle import slice_words

        self.s = structure
        self.clauses = clauses
        self.unknowns = set(unknowns)
        self._slice_words = slice_words
        self.cache: dict = {}
        for c in clauses:
            if c.head is not None and len(c.head.args) != 1:
                raise HornError("only unary synthesized relations can be learned")
            for pos, a in c.body:
                if isinstance(a, Atom) and a.name in self.unknowns and len(a.args) != 1:
                    raise HornError("only unary synthesized relations can be learned")

    def solve(self, n: int) -> dict:
        got = self.cache.get(n)
        if got is not None:
            return got
        facts = {u: set() for u in self.unknowns}
        changed = True
        while changed:
            changed = False
            for c in self.clauses:
                if c.head is None:
                    continue
                for env in self._bindings(c, n, facts):
                    w = env[c.head.args[0]]
                    if w not in facts[c.head.name]:
                        facts[c.head.name].add(w)
                        changed = True
        self.cache[n] = facts
        return facts

    def violations(self, n: int):
        """Goal clauses whose body is derivable in the least solution."""
        facts = self.solve(n)
        for c in self.clauses:
            if c.head is None:
                for env in self._bindings(c, n, facts):
                    yield c, env

    def _bindings(self, c: HornClause, n: int, facts: dict):
        positives = [a for pos, a in c.body if pos and isinstance(a, Atom)]
        checks = [(pos, a) for pos, a in c.body]
        needed = set(c.vars)

        def extend(env, todo):
            if needed <= set(env):
                if all(self._holds(pos, a, env, facts) for pos, a in checks):
                    yield env
                return
            best = None
            for a in todo:
                free = [v for v in a.args if v not in env]
                if not free:
                    continue
                if a.name in self.unknowns:
                    best = (a, [(w,) for w in facts[a.name] if len(w) == n]) if len(free) == 1 else best
                elif len(a.args) == 1:
                    cand = [(w,) for w in self._slice_words(to_language(self.s.relations[a.name]), n)]
                    if best is None or len(cand) < len(best[1]):
                        best = (a, cand)
                elif len(a.args) == 2 and len(free) == 1:
                    other = [v for v in a.args if v in env][0]
                    track = a.args.index(other)
                    cand = [(w,) for w in image(self.s.relations[a.name], env[other], track)]
                    if best is None or len(cand) < len(best[1]):
                        best = (a, cand)
                if best is not None and len(best[1]) == 0:
                    break
            if best is None:
                raise HornError(f"{c.source}: cannot bind variables {sorted(needed - set(env))}")
            a, cands = best
            free = [v for v in a.args if v not in env]
            rest = [t for t in todo if t is not a]
            for vals in cands:
                yield from extend({**env, free[0]: vals[0]}, rest)

        yield from extend({}, positives)

    def _holds(self, pos, a, env, facts):
        if isinstance(a, Equal):
            val = env[a.left] == env[a.right]
        elif a.name in self.unknowns:
            val = env[a.args[0]] in facts[a.name]
        else:
            val = member(self.s.relations[a.name], tuple(env[v] for v in a.args))
        return val == pos


class FixpointTeacher(Teacher):
    """Teacher for the least solution of a Horn matrix in one unknown language."""

    def __init__(self, structure: Structure, matrix: list, unknown: str, k: int = 4,
                 max_k: int = 64):
        self.structure = structure
        self.matrix = matrix
        self.unknown = unknown
        self.clauses = horn_clauses(matrix, [unknown])
        self.solver = SliceSolver(structure, self.clauses, [unknown])
        self.k = k
        self.max_k = max_k
        self.log: list = []

    def membership(self, word):
        w = tuple(word)
        return w in self.solver.solve(len(w))[self.unknown]

    def _goal_check(self, n):
        for c, env in self.solver.violations(n):
            raise NoSolution(f"{c.source} is violated by the least solution", env)

    def equivalence(self, hypothesis):
        while True:
            for n in range(self.k + 1):
                self._goal_check(n)
                target = self.solver.solve(n)[self.unknown]
                for w in target:
                    if not accepts(hypothesis, w):
                        return w
                from .oracle import slice_words

                for w in slice_words(hypothesis, n):
                    if w not in target:
                        return w
            cand = self.structure.extend({self.unknown: from_language(hypothesis)})
            failed = None
            for cid, sentence in self.matrix:
                r = holds(sentence, cand)
                if not r.valid:
                    failed = (cid, sentence, r.counterexample)
                    break
            if failed is None:
                return None
            w = self._resolve(failed, hypothesis)
            self.log.append({"k": self.k, "condition": failed[0], "word": w})
            if w is not None:
                self.k = max(self.k, len(w))
                return w
            if self.k >= self.max_k:
                raise QueryBudgetExceeded(f"length bound {self.k} reached")
            self.k *= 2

    def _resolve(self, failed, hypothesis):
        cid, sentence, env = failed
        clause = next(c for c in self.clauses if c.source == cid)
        for pos, a in clause.body:
            if isinstance(a, Atom) and a.name == self.unknown:
                w = env[a.args[0]]
                if not self.membership(w):
                    return w  # accepted by the hypothesis, not in the least solution
        if clause.head is None:
            raise NoSolution(f"{cid} is violated by the least solution", env)
        return env[clause.head.args[0]]


def fixpoint_teacher(structure: Structure, matrix: list, unknown: str, k: int = 4) -> FixpointTeacher:
    return FixpointTeacher(structure, matrix, unknown, k)


class BoundedTeacher(Teacher):
    """Teacher for the reachable configurations of a safety or liveness problem."""

    def __init__(self, problem, k: int = 4, max_k: int = 64):
        from .conditions import eso_problem

        self.problem = problem
        self.k = k
        self.max_k = max_k
        self.eso = eso_problem(problem)
        self.matrix = [(cid, f) for cid, f in self.eso.matrix
                       if set(_names(f)) & set(self.eso.unknowns) <= {"Inv"}]
        self.slices: dict = {}
        self.log: list = []

    def reach(self, n: int) -> set:
        from .oracle import reachable

        got = self.slices.get(n)
        if got is None:
            got = self.slices[n] = reachable(self.problem.init, self.problem.delta, n)
        return got

    def membership(self, word):
        return tuple(word) in self.reach(len(word))

    def equivalence(self, hypothesis):
        from .oracle import slice_words

        while True:
            for n in range(self.k + 1):
                target = self.reach(n)
                for w in sorted(target):
                    if not accepts(hypothesis, w):
                        return w
                for w in slice_words(hypothesis, n):
                    if w not in target:
                        return w
            s = self.eso.structure.extend({"Inv": from_language(hypothesis)})
            failed = None
            for cid, sentence in self.matrix:
                r = holds(sentence, s)
                if not r.valid:
                    failed = (cid, r.counterexample)
                    break
            if failed is None:
                return None
            w = self._resolve(*failed)
            self.log.append({"k": self.k, "condition": failed[0], "word": w})
            if w is not None:
                self.k = max(self.k, len(w))
                return w
            if self.k >= self.max_k:
                raise QueryBudgetExceeded(f"length bound {self.k} reached")
            self.k *= 2

    def _resolve(self, cid, env):
        if cid.endswith("init-subset"):
            return env["x"]
        if cid.endswith("bad-disjoint"):
            w = env["x"]
            if self.membership(w):
                raise NoSolution("a Bad configuration is reachable", w)
            return w
        if cid.endswith("inductive"):
            x, y = env["x"], env["y"]
            return y if self.membership(x) else x
        return None


def _names(f):
    from .logic import relation_names

    return relation_names(f)


def bounded_teacher(problem, k: int = 4) -> BoundedTeacher:
    return BoundedTeacher(problem, k)


# ---------------------------------------------------------------------------
# stratified solving


@dataclass
class StratifiedResult:
    status: str
    witness: object = None
    learned: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)
    log: list = field(default_factory=list)
    reason: str = ""
    elapsed: float = 0.0

    @property
    def found(self):
        return self.status == "found"


def stratify(matrix: list, unknowns: Sequence[str]):
    """Find ``R1`` whose own conjuncts are Horn and which occurs only negatively elsewhere."""
    for r1 in unknowns:
        own = [(cid, f) for cid, f in matrix if set(_names(f)) & set(unknowns) <= {r1}]
        rest = [(cid, f) for cid, f in matrix if (cid, f) not in own]
        if not own:
            continue
        try:
            horn_clauses(own, [r1])
        except HornError:
            continue
        if all(polarity(f, r1) <= {"-"} for _, f in rest):
            return r1, own, rest
    return None


def game_reach_matrix() -> list:
    return [
        ("reach.init", parse_formula("forall x. Init(x) -> Reach(x)")),
        ("reach.step", parse_formula("forall x y z. Reach(x) & Delta1(x,y) & Delta2(y,z) -> Reach(z)")),
    ]


def _restricted_game_matrix():
    from .conditions import game_matrix

    out = []
    for cid, f in game_matrix():
        if cid == "game.progress":
            f = parse_formula(
                "forall s t. Reach(s) & Inv(s) & !Final(s) & Delta1(s,t) & !Final(t)"
                " -> exists u. Delta2(t,u) & Inv(u) & Rank(s,u)"
            )
        out.append((cid, f))
    return out


def stratified_solve(problem, options=None, k: int = 4) -> StratifiedResult:
    """Learn the lowest stratum with L*, then synthesize the rest with SAT."""
    from .automata import product
    from .conditions import check, eso_problem, make_witness
    from .synthesis import SynthesisOptions, synthesize, synthesize_eso

    opts = options or SynthesisOptions()
    t0 = time.monotonic()
    eso = eso_problem(problem)
    base = problem.base
    log: list = []
    if problem.kind == "game":
        r1, own, rest = "Reach", game_reach_matrix(), _restricted_game_matrix()
        remaining = {"Inv": 1, "Rank": 2}
    else:
        found = stratify(eso.matrix, list(eso.unknowns))
        if found is None:
            res = synthesize(problem, opts)
            return StratifiedResult(res.status, res.witness, {}, res.states, res.log,
                                    "no stratification; plain synthesis", time.monotonic() - t0)
        r1, own, rest = found
        remaining = {u: a for u, a in eso.unknowns.items() if u != r1}
    teacher = FixpointTeacher(eso.structure, own, r1, k)
    learn_log = LearningLog()
    try:
        learned = minimize(lstar(teacher, base, log=learn_log))
    except NoSolution as exc:
        return StratifiedResult("refuted", reason=str(exc), elapsed=time.monotonic() - t0)
    log.append({"learned": r1, "states": learned.n, "rounds": len(learn_log.rounds),
                "membership": learn_log.membership_queries})
    parts = {r1: learned}
    if remaining:
        s1 = eso.structure.extend({r1: from_language(learned)})
        out = synthesize_eso(s1, remaining, rest, opts)
        log.extend(out.log)
        if not out.found:
            return StratifiedResult("exhausted", learned={r1: learned}, log=log,
                                    reason=out.reason, elapsed=time.monotonic() - t0)
        parts.update(out.relations)
    if problem.kind == "game":
        inv = minimize(product(to_language(parts["Inv"]), learned, "intersect"))
        parts = {"Inv": inv, "Rank": parts["Rank"]}
        learned_parts = {"Reach": learned}
    else:
        learned_parts = {r1: learned}
    witness = make_witness(problem.kind, parts)
    verdict = check(problem, witness)
    if not verdict.valid:
        raise AssertionError(f"stratified witness fails {verdict.condition}")
    states = {name: (r.nfa.n if isinstance(r, AutomaticRelation) else r.n) for name, r in parts.items()}
    return StratifiedResult("found", witness, learned_parts, states, log, elapsed=time.monotonic() - t0)


def learn_invariant(problem, k: int = 4, log: Optional[LearningLog] = None):
    """L* with the bounded teacher: learns the reachable set as an invariant."""
    teacher = BoundedTeacher(problem, k)
    return minimize(lstar(teacher, problem.base, log=log)), teacher
