"""SAT-based synthesis of automata satisfying a first-order matrix.

Each unknown relation is an n-state deterministic automaton hypothesis
(a :class:`DfaSkeleton`): variables ``z_i`` (state i accepting) and
``x_{i,a,j}`` (reading ``a`` in state i leads to j). Skeletons are
*partial*: a missing transition goes to an implicit rejecting sink that is
not counted among the n states. Every state is reachable (enforced through
breadth-first numbering) and, for n >= 2, can reach an accepting state.

The loop alternates solving, decoding, checking the matrix conjunct by
conjunct and turning the counterexample into a clause set. A violated
instance ``phi(w1..wk)`` is grounded into a propositional formula over
membership literals "skeleton R accepts (u1..um)" whenever its inner
quantifiers range over a finite set that the fixed relations (or the
length-preservation of the unknowns) pin down exactly; otherwise the
current assignment is blocked.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .automata import Alphabet, Nfa, enumerate_words
from .logic import (
    And,
    Atom,
    Const,
    Equal,
    Exists,
    Forall,
    Implies,
    Not,
    Or,
    Formula,
    Structure,
    holds,
    parse_formula,
    split_universal,
)
from .relations import AutomaticRelation, PaddedAlphabet, image, member
from .sat import UNKNOWN, UNSAT, make_solver

STRUCTURAL = ("reflexive", "irreflexive", "functional", "transitive")


class SynthesisError(ValueError):
    pass


class GroundingError(Exception):
    """The instance has no exact finite propositional form."""


# ---------------------------------------------------------------------------
# skeletons


def skeleton_letters(base: Alphabet, arity: int) -> list:
    if arity == 1:
        return list(base.letters)
    if arity == 2:
        return list(itertools.product(base.letters, repeat=2))
    raise SynthesisError("skeletons are built for unary and binary relations only")


class DfaSkeleton:
    """Boolean encoding of all partial DFAs with ``n`` states over ``letters``."""

    def __init__(self, sink, base: Alphabet, arity: int, n: int, name: str = "A"):
        if n < 1:
            raise SynthesisError("a skeleton needs at least one state")
        self.sink = sink
        self.base = base
        self.arity = arity
        self.n = n
        self.name = name
        self.alphabet = base if arity == 1 else PaddedAlphabet(base, arity)
        self.letters = sorted(skeleton_letters(base, arity), key=self.alphabet.key)
        self.z = [sink.new_var() for _ in range(n)]
        self.x = {}
        for i in range(n):
            for a in self.letters:
                for j in range(n):
                    self.x[i, a, j] = sink.new_var()
        self.true = sink.new_var()
        sink.add_clause([self.true])
        self._runs: dict = {(): {0: self.true}}
        self._acc: dict = {}

    @property
    def core_vars(self) -> list:
        return list(self.z) + list(self.x.values())

    # runs ------------------------------------------------------------------

    def run(self, word: tuple) -> dict:
        """State literals after reading ``word``: ``{state: literal}``."""
        got = self._runs.get(word)
        if got is not None:
            return got
        prev = self.run(word[:-1])
        a = word[-1]
        sink = self.sink
        if len(prev) == 1 and self.true in prev.values():
            # deterministic start: one known state
            (i, _), = prev.items()
            cur = {j: self.x[i, a, j] for j in range(self.n)}
        else:
            cur = {}
            for j in range(self.n):
                s = sink.new_var()
                cur[j] = s
                for i, p in prev.items():
                    sink.add_clause([-p, -self.x[i, a, j], s])
                    sink.add_clause([-s, -p, self.x[i, a, j]])
                sink.add_clause([-s] + list(prev.values()))
        self._runs[word] = cur
        return cur

    def accept_literal(self, word) -> int:
        word = tuple(word)
        lit = self._acc.get(word)
        if lit is not None:
            return lit
        if not word:
            lit = self.z[0]
        else:
            states = self.run(word)
            lit = self.sink.new_var()
            for j, s in states.items():
                self.sink.add_clause([-s, -self.z[j], lit])
                self.sink.add_clause([-lit, -s, self.z[j]])
            self.sink.add_clause([-lit] + list(states.values()))
        self._acc[word] = lit
        return lit

    def member_literal(self, words: Sequence[tuple]):
        """Literal for ``(u1..um)`` in the skeleton's relation, or a constant."""
        if self.arity == 1:
            return self.accept_literal(words[0])
        if len({len(w) for w in words}) != 1:
            return False  # skeleton relations are length-preserving
        return self.accept_literal(tuple(zip(*words)))

    # decoding --------------------------------------------------------------

    def decode(self, model) -> Nfa:
        trans = [dict() for _ in range(self.n)]
        for (i, a, j), v in self.x.items():
            if model[v]:
                trans[i].setdefault(a, []).append(j)
        rows = [{a: tuple(sorted(ds)) for a, ds in row.items()} for row in trans]
        acc = [i for i in range(self.n) if model[self.z[i]]]
        return Nfa._raw(self.alphabet, self.n, 0, rows, acc)

    def decode_relation(self, model):
        nfa = self.decode(model)
        if self.arity == 1:
            from .relations import from_language

            return from_language(nfa)
        return AutomaticRelation(nfa, trusted=True)

    def blocking_clause(self, model) -> list:
        return [-v if model[v] else v for v in self.core_vars]

    def fix(self, dfa: Nfa) -> list:
        """Unit clauses forcing the skeleton to equal ``dfa`` (same numbering)."""
        if dfa.n != self.n:
            raise SynthesisError("state count mismatch")
        units = []
        for i in range(self.n):
            units.append(self.z[i] if i in dfa.accepting else -self.z[i])
            for a in self.letters:
                targets = dfa.trans[i].get(a, ())
                for j in range(self.n):
                    units.append(self.x[i, a, j] if j in targets else -self.x[i, a, j])
        return units


# ---------------------------------------------------------------------------
# eager encodings


def encode_wellformed(sk: DfaSkeleton) -> None:
    """Determinism, BFS numbering (which implies reachability), co-reachability."""
    sink, n, L = sk.sink, sk.n, sk.letters
    x = sk.x
    for i in range(n):
        for a in L:
            for j in range(n):
                for k in range(j + 1, n):
                    sink.add_clause([-x[i, a, j], -x[i, a, k]])
    if n == 1:
        return
    # edge indicators
    edge = {}
    for i in range(n):
        for j in range(n):
            e = sink.new_var()
            edge[i, j] = e
            lits = [x[i, a, j] for a in L]
            sink.add_clause([-e] + lits)
            for l in lits:
                sink.add_clause([-l, e])
    # BFS parents: parent[j, i] for i < j
    parent = {}
    for j in range(1, n):
        for i in range(j):
            p = sink.new_var()
            parent[j, i] = p
            sink.add_clause([-p, edge[i, j]])
            for k in range(i):
                sink.add_clause([-p, -edge[k, j]])
            sink.add_clause([p, -edge[i, j]] + [edge[k, j] for k in range(i)])
        sink.add_clause([parent[j, i] for i in range(j)])
    for j in range(1, n - 1):
        for i in range(j):
            for k in range(i):
                sink.add_clause([-parent[j, i], -parent[j + 1, k]])
    # minimal letter on the parent edge
    minlet = {}
    for j in range(1, n):
        for i in range(j):
            for ai, a in enumerate(L):
                m = sink.new_var()
                minlet[i, a, j] = m
                sink.add_clause([-m, x[i, a, j]])
                for b in L[:ai]:
                    sink.add_clause([-m, -x[i, b, j]])
                sink.add_clause([m, -x[i, a, j]] + [x[i, b, j] for b in L[:ai]])
    for j in range(1, n - 1):
        for i in range(j):
            for ai, a in enumerate(L):
                for b in L[ai + 1:]:
                    sink.add_clause([-parent[j, i], -parent[j + 1, i],
                                     -minlet[i, a, j + 1], -minlet[i, b, j]])
    # every state reaches acceptance within n-1 steps
    prev = list(sk.z)
    for d in range(1, n):
        cur = []
        for i in range(n):
            c = sink.new_var()
            via = []
            for j in range(n):
                e = sink.new_var()
                sink.add_clause([-e, edge[i, j]])
                sink.add_clause([-e, prev[j]])
                via.append(e)
            sink.add_clause([-c, prev[i]] + via)
            cur.append(c)
        prev = cur
    for c in prev:
        sink.add_clause([c])


def _diagonal(sk: DfaSkeleton) -> list:
    sink, n = sk.sink, sk.n
    d = [sink.new_var() for _ in range(n)]
    sink.add_clause([d[0]])
    for i in range(n):
        for a in sk.base.letters:
            for j in range(n):
                sink.add_clause([-d[i], -sk.x[i, (a, a), j], d[j]])
    return d


def encode_structural(sk: DfaSkeleton, prop: str) -> None:
    """Closure encodings of relation properties for a length-preserving binary skeleton."""
    if prop not in STRUCTURAL:
        raise SynthesisError(f"unknown structural property {prop!r}")
    if sk.arity != 2:
        raise SynthesisError(f"{prop} needs a binary skeleton")
    sink, n, x, z = sk.sink, sk.n, sk.x, sk.z
    sigma = sk.base.letters
    if prop == "irreflexive":
        for i, di in enumerate(_diagonal(sk)):
            sink.add_clause([-di, -z[i]])
    elif prop == "reflexive":
        for i, di in enumerate(_diagonal(sk)):
            sink.add_clause([-di, z[i]])
            for a in sigma:
                sink.add_clause([-di] + [x[i, (a, a), j] for j in range(n)])
    elif prop == "transitive":
        _encode_transitive(sk)
    else:
        _encode_functional(sk)


def _encode_transitive(sk: DfaSkeleton) -> None:
    # t[p,q,r]: some x,y,z reach p on x*y, q on y*z, r on x*z; r == n means
    # the run on x*z has died (the skeleton is partial)
    sink, n, x, z = sk.sink, sk.n, sk.x, sk.z
    sigma = sk.base.letters
    S = range(n)
    R = range(n + 1)
    dead = n
    t = {k: sink.new_var() for k in itertools.product(S, S, R)}
    sink.add_clause([t[0, 0, 0]])
    u1 = {}
    for p2, q, r in itertools.product(S, S, R):
        for a in sigma:
            for b in sigma:
                u1[p2, q, r, a, b] = sink.new_var()
    u2 = {}
    for p2, q2, r in itertools.product(S, S, R):
        for a in sigma:
            for c in sigma:
                u2[p2, q2, r, a, c] = sink.new_var()
    for (p, q, r), tv in t.items():
        for a in sigma:
            for b in sigma:
                for p2 in S:
                    sink.add_clause([-tv, -x[p, (a, b), p2], u1[p2, q, r, a, b]])
    for (p2, q, r, a, b), uv in u1.items():
        for c in sigma:
            for q2 in S:
                sink.add_clause([-uv, -x[q, (b, c), q2], u2[p2, q2, r, a, c]])
    for (p2, q2, r, a, c), uv in u2.items():
        if r == dead:
            sink.add_clause([-uv, t[p2, q2, dead]])
            continue
        moves = [x[r, (a, c), r2] for r2 in S]
        for r2, m in zip(S, moves):
            sink.add_clause([-uv, -m, t[p2, q2, r2]])
        sink.add_clause([-uv] + moves + [t[p2, q2, dead]])
    for (p, q, r), tv in t.items():
        if r == dead:
            sink.add_clause([-tv, -z[p], -z[q]])
        else:
            sink.add_clause([-tv, -z[p], -z[q], z[r]])


def _encode_functional(sk: DfaSkeleton) -> None:
    # f[p,q,flag]: some x,y,z reach p on x*y and q on x*z; flag = y and z differ
    sink, n, x, z = sk.sink, sk.n, sk.x, sk.z
    sigma = sk.base.letters
    S = range(n)
    f = {k: sink.new_var() for k in itertools.product(S, S, (0, 1))}
    sink.add_clause([f[0, 0, 0]])
    mid = {}
    for p2, q, flag, a, b in itertools.product(S, S, (0, 1), sigma, sigma):
        mid[p2, q, flag, a, b] = sink.new_var()
    for (p, q, flag), fv in f.items():
        for a in sigma:
            for b in sigma:
                for p2 in S:
                    sink.add_clause([-fv, -x[p, (a, b), p2], mid[p2, q, flag, a, b]])
    for (p2, q, flag, a, b), mv in mid.items():
        for c in sigma:
            nflag = 1 if flag or b != c else 0
            for q2 in S:
                sink.add_clause([-mv, -x[q, (a, c), q2], f[p2, q2, nflag]])
    for p in S:
        for q in S:
            sink.add_clause([-f[p, q, 1], -z[p], -z[q]])


# ---------------------------------------------------------------------------
# grounding of counterexample instances


def _conjuncts(f: Formula) -> list:
    if isinstance(f, And):
        out = []
        for p in f.parts:
            out.extend(_conjuncts(p))
        return out
    return [f]


class Grounder:
    def __init__(self, structure: Structure, unknowns: dict, cap: int = 5000):
        self.s = structure
        self.unknowns = unknowns
        self.cap = cap
        self.base = structure.base

    def ground(self, f: Formula, env: dict):
        if isinstance(f, Const):
            return f.value
        if isinstance(f, Equal):
            return env[f.left] == env[f.right]
        if isinstance(f, Atom):
            words = tuple(env[a] for a in f.args)
            if f.name in self.unknowns:
                return ("atom", f.name, words)
            return member(self.s.relations[f.name], words)
        if isinstance(f, Not):
            return _neg(self.ground(f.body, env))
        if isinstance(f, And):
            return _and([self.ground(p, env) for p in f.parts])
        if isinstance(f, Or):
            return _or([self.ground(p, env) for p in f.parts])
        if isinstance(f, Implies):
            left = self.ground(f.left, env)
            if left is False:
                return True
            return _or([_neg(left), self.ground(f.right, env)])
        if isinstance(f, Exists):
            dom = self.domain(f.var, _conjuncts(f.body), env)
            return _or([self.ground(f.body, {**env, f.var: w}) for w in dom])
        if isinstance(f, Forall):
            guard = f.body.left if isinstance(f.body, Implies) else None
            if guard is None:
                raise GroundingError("unguarded universal quantifier")
            dom = self.domain(f.var, _conjuncts(guard), env)
            return _and([self.ground(f.body, {**env, f.var: w}) for w in dom])
        raise GroundingError(f"cannot ground {f!r}")

    def domain(self, var: str, conjuncts: list, env: dict) -> list:
        """An exact finite range for ``var`` implied by a positive conjunct."""
        best = None
        for c in conjuncts:
            if not isinstance(c, Atom) or var not in c.args or len(c.args) != 2:
                continue
            other = c.args[1 - c.args.index(var)]
            if other == var or other not in env:
                continue
            track = c.args.index(other)
            w = env[other]
            if c.name in self.unknowns:
                size = len(self.base) ** len(w)
                if size > self.cap:
                    continue
                cand = list(itertools.product(self.base.letters, repeat=len(w)))
            else:
                rel = self.s.relations[c.name]
                if not rel.length_preserving:
                    continue
                cand = image(rel, w, track=track)
            if best is None or len(cand) < len(best):
                best = cand
        if best is None:
            raise GroundingError(f"no finite range for {var}")
        return best


def _neg(g):
    if isinstance(g, bool):
        return not g
    if g[0] == "not":
        return g[1]
    return ("not", g)


def _and(parts):
    out = []
    for p in parts:
        if p is False:
            return False
        if p is not True:
            out.append(p)
    if not out:
        return True
    return out[0] if len(out) == 1 else ("and", out)


def _or(parts):
    out = []
    for p in parts:
        if p is True:
            return True
        if p is not False:
            out.append(p)
    if not out:
        return False
    return out[0] if len(out) == 1 else ("or", out)


def evaluate_ground(g, member_fn) -> bool:
    if isinstance(g, bool):
        return g
    kind = g[0]
    if kind == "atom":
        return member_fn(g[1], g[2])
    if kind == "not":
        return not evaluate_ground(g[1], member_fn)
    if kind == "and":
        return all(evaluate_ground(p, member_fn) for p in g[1])
    return any(evaluate_ground(p, member_fn) for p in g[1])


def ground_size(g) -> int:
    if isinstance(g, bool) or g[0] == "atom":
        return 1
    if g[0] == "not":
        return 1 + ground_size(g[1])
    return 1 + sum(ground_size(p) for p in g[1])


class GroundEncoder:
    """Plaisted-Greenbaum encoding of ground formulas over skeleton memberships."""

    def __init__(self, sink, skeletons: dict):
        self.sink = sink
        self.sk = skeletons

    def lit(self, g, positive: bool = True):
        if isinstance(g, bool):
            g = g == positive
            return None if g else False
        kind = g[0]
        if kind == "not":
            return self.lit(g[1], not positive)
        if kind == "atom":
            l = self.sk[g[1]].member_literal(g[2])
            if l is False:
                return None if not positive else False
            return l if positive else -l
        is_and = (kind == "and") == positive
        subs = [self.lit(p, positive) for p in g[1]]
        if is_and:
            if any(s is False for s in subs):
                return False
            subs = [s for s in subs if s is not None]
            if not subs:
                return None
            if len(subs) == 1:
                return subs[0]
            v = self.sink.new_var()
            for s in subs:
                self.sink.add_clause([-v, s])
            return v
        if any(s is None for s in subs):
            return None
        subs = [s for s in subs if s is not False]
        if not subs:
            return False
        if len(subs) == 1:
            return subs[0]
        v = self.sink.new_var()
        self.sink.add_clause([-v] + subs)
        return v

    def assert_(self, g) -> bool:
        """Add ``g``; returns False if it is trivially unsatisfiable."""
        l = self.lit(g)
        if l is None:
            return True
        if l is False:
            self.sink.add_clause([self._false()])
            return False
        if isinstance(g, tuple) and g[0] == "or":
            pass
        self.sink.add_clause([l])
        return True

    def _false(self):
        v = self.sink.new_var()
        self.sink.add_clause([-v])
        return v


# ---------------------------------------------------------------------------
# shape recognition for eager constraints


def structural_properties(name: str, matrix: list) -> list:
    templates = {
        "transitive": "forall x y z. {R}(x,y) & {R}(y,z) -> {R}(x,z)",
        "irreflexive": "forall x. !{R}(x,x)",
        "reflexive": "forall x. {R}(x,x)",
        "functional": "forall x y z. {R}(x,y) & {R}(x,z) -> y = z",
    }
    out = []
    sentences = [f for _, f in matrix]
    for prop, text in templates.items():
        if parse_formula(text.format(R=name)) in sentences:
            out.append(prop)
    return out


def eager_positive_sources(name: str, matrix: list, fixed: set) -> list:
    """Unary fixed relations A with a conjunct ``forall x. A(x) -> name(x)``."""
    out = []
    for _, f in matrix:
        if (isinstance(f, Forall) and isinstance(f.body, Implies)
                and isinstance(f.body.left, Atom) and isinstance(f.body.right, Atom)):
            left, right = f.body.left, f.body.right
            if (right.name == name and left.name in fixed and left.args == (f.var,)
                    and right.args == (f.var,)):
                out.append(left.name)
    return out


# ---------------------------------------------------------------------------
# the loop


@dataclass
class SynthesisOptions:
    min_states: int = 1
    max_states: int = 12
    state_ranges: Optional[dict] = None
    conflict_limit: Optional[int] = 2_000_000
    time_limit: Optional[float] = None
    eager_length: int = 4
    cex_cap: int = 20
    solver: str = "internal"
    seed: Optional[int] = None
    max_iterations: int = 100_000
    check_budget: int = 10 ** 5


@dataclass
class SynthesisOutcome:
    status: str                      # "found" | "exhausted"
    relations: dict = field(default_factory=dict)
    sizes: dict = field(default_factory=dict)
    log: list = field(default_factory=list)
    iterations: int = 0
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.status == "found"


def size_order(ranges: list) -> list:
    combos = list(itertools.product(*[range(lo, hi + 1) for lo, hi in ranges]))
    combos.sort(key=lambda c: (sum(c), c))
    return combos


def _check_skeleton(nfa: Nfa, n: int):
    seen = {0}
    stack = [0]
    while stack:
        q = stack.pop()
        for ds in nfa.trans[q].values():
            assert len(ds) == 1, "decoded candidate is not deterministic"
            for d in ds:
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
    assert len(seen) == n, "decoded candidate has unreachable states"


def synthesize_eso(structure: Structure, unknowns: dict, matrix: list,
                   options: Optional[SynthesisOptions] = None) -> SynthesisOutcome:
    """Search for automata interpreting ``unknowns`` that satisfy every conjunct."""
    opts = options or SynthesisOptions()
    names = list(unknowns)
    ranges = []
    for name in names:
        r = (opts.state_ranges or {}).get(name, (opts.min_states, opts.max_states))
        ranges.append(tuple(r))
    base = structure.base
    fixed = set(structure.relations)
    grounder = Grounder(structure, unknowns)
    props = {name: structural_properties(name, matrix) if unknowns[name] == 2 else [] for name in names}
    seeds = []
    for name in names:
        if unknowns[name] != 1:
            continue
        for src in eager_positive_sources(name, matrix, fixed):
            from .relations import to_language

            for w in enumerate_words(to_language(structure.relations[src]), opts.eager_length):
                seeds.append(("atom", name, (w,)))
    learned: list = []
    out = SynthesisOutcome("exhausted")
    start = time.monotonic()
    cap = opts.cex_cap
    for sizes in size_order(ranges):
        sink = make_solver(opts.solver, seed=opts.seed)
        sks = {}
        for name, n in zip(names, sizes):
            sk = DfaSkeleton(sink, base, unknowns[name], n, name)
            encode_wellformed(sk)
            for prop in props[name]:
                encode_structural(sk, prop)
            sks[name] = sk
        enc = GroundEncoder(sink, sks)
        ok = all(enc.assert_(g) for g in seeds + learned)
        while ok:
            if opts.time_limit is not None and time.monotonic() - start > opts.time_limit:
                out.reason = f"time limit reached at sizes {dict(zip(names, sizes))}"
                return out
            if out.iterations >= opts.max_iterations:
                out.reason = "iteration limit reached"
                return out
            res = sink.solve(conflict_limit=opts.conflict_limit)
            if res.status == UNSAT:
                break
            if res.status == UNKNOWN:
                out.reason = f"conflict limit reached at sizes {dict(zip(names, sizes))}"
                return out
            out.iterations += 1
            cands = {}
            nfas = {}
            for name, sk in sks.items():
                nfas[name] = sk.decode(res.model)
                _check_skeleton(nfas[name], sk.n)
                cands[name] = sk.decode_relation(res.model)
            s2 = structure.extend(cands)
            failure = None
            for cid, sentence in matrix:
                r = holds(sentence, s2, opts.check_budget)
                if not r.valid:
                    failure = (cid, sentence, r.counterexample)
                    break
            entry = {"sizes": dict(zip(names, sizes)), "iteration": out.iterations}
            if failure is None:
                entry["result"] = "valid"
                out.log.append(entry)
                out.status = "found"
                out.relations = cands
                out.sizes = dict(zip(names, sizes))
                return out
            cid, sentence, cex = failure
            entry.update(condition=cid, counterexample={k: base.decode(v) for k, v in cex.items()})
            longest = max((len(w) for w in cex.values()), default=0)
            if longest > cap:
                cap = max(2 * cap, longest)
                entry["cap"] = cap

            def mem(name, words):
                return member(cands[name], words)

            g = None
            try:
                outer, inner = split_universal(sentence)
                g = grounder.ground(inner, dict(cex))
            except GroundingError as exc:
                entry["grounding"] = str(exc)
            if g is not None and g is not True and not evaluate_ground(g, mem):
                learned.append(g)
                entry["constraint"] = ground_size(g)
                ok = enc.assert_(g)
            else:
                clause = []
                for sk in sks.values():
                    clause.extend(sk.blocking_clause(res.model))
                entry["constraint"] = "block"
                sink.add_clause(clause)
            out.log.append(entry)
    out.reason = "state ranges exhausted"
    return out


# ---------------------------------------------------------------------------
# problem-level entry point


@dataclass
class SynthesisTask:
    problem: object
    options: SynthesisOptions = field(default_factory=SynthesisOptions)


@dataclass
class SynthesisResult:
    status: str
    witness: object = None
    states: dict = field(default_factory=dict)
    log: list = field(default_factory=list)
    reason: str = ""
    elapsed: float = 0.0

    @property
    def found(self):
        return self.status == "found"


def synthesize(task, options: Optional[SynthesisOptions] = None) -> SynthesisResult:
    """Synthesize a witness for a verification problem; re-checks before returning."""
    from .conditions import check, eso_problem, make_witness

    if not isinstance(task, SynthesisTask):
        task = SynthesisTask(task, options or SynthesisOptions())
    problem = task.problem
    t0 = time.monotonic()
    eso = eso_problem(problem)
    outcome = synthesize_eso(eso.structure, eso.unknowns, eso.matrix, task.options)
    elapsed = time.monotonic() - t0
    if not outcome.found:
        return SynthesisResult("exhausted", log=outcome.log, reason=outcome.reason, elapsed=elapsed)
    witness = make_witness(problem.kind, outcome.relations)
    verdict = check(problem, witness)
    if not verdict.valid:
        raise AssertionError(f"synthesized witness fails {verdict.condition}")
    return SynthesisResult("found", witness, outcome.sizes, outcome.log, elapsed=elapsed)
