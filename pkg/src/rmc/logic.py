"""First-order logic over automatic structures.

A formula with free variables ``x1..xm`` compiles to an automaton over the
convolution of ``m`` words. Internally every compiled subformula is a pair
``(nfa, vars)`` where ``vars`` may be a subset of the free variables (the
relation is understood as cylindrified over the rest); a bare ``bool`` is a
relation over no variables at all.

Negation is pushed inward first. ``not`` on an atom and ``forall`` are the
only places where complementation (a subset construction) happens, each at
the arity of the subformula involved.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .automata import Alphabet, AutomatonError, BudgetExceeded, Nfa, is_empty, shortest_word, trim
from .relations import (
    AutomaticRelation,
    PaddedAlphabet,
    complement_tracks,
    cylinder,
    deconvolve,
    erase,
    identity,
    join,
    reduce_partial_dfa,
)

COMPILE_BUDGET = 10 ** 5


class LogicError(ValueError):
    pass


# ---------------------------------------------------------------------------
# syntax


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str
    args: tuple


@dataclass(frozen=True)
class Equal(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    parts: tuple


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


TRUE = Const(True)
FALSE = Const(False)


def atom(name: str, *args: str) -> Atom:
    return Atom(name, tuple(args))


def conj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def disj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def exists(vars_: Sequence[str], body: Formula) -> Formula:
    for v in reversed(tuple(vars_)):
        body = Exists(v, body)
    return body


def forall(vars_: Sequence[str], body: Formula) -> Formula:
    for v in reversed(tuple(vars_)):
        body = Forall(v, body)
    return body


def free_variables(f: Formula) -> tuple:
    """Free variables in order of first occurrence."""
    out: list = []

    def walk(g, bound):
        if isinstance(g, Atom):
            for a in g.args:
                if a not in bound and a not in out:
                    out.append(a)
        elif isinstance(g, Equal):
            for a in (g.left, g.right):
                if a not in bound and a not in out:
                    out.append(a)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                walk(p, bound)
        elif isinstance(g, Implies):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body, bound | {g.var})

    walk(f, frozenset())
    return tuple(out)


def relation_names(f: Formula) -> dict:
    """Map each relation name used in ``f`` to its arity."""
    out: dict = {}

    def walk(g):
        if isinstance(g, Atom):
            if out.setdefault(g.name, len(g.args)) != len(g.args):
                raise LogicError(f"relation {g.name} used with different arities")
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                walk(p)
        elif isinstance(g, Implies):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body)

    walk(f)
    return out


_PREC = {Implies: 1, Or: 2, And: 3}


def show(f: Formula, prec: int = 0) -> str:
    if isinstance(f, Atom):
        return f"{f.name}({','.join(f.args)})"
    if isinstance(f, Equal):
        return f"{f.left} = {f.right}"
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        return "!" + show(f.body, 4)
    if isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        me = _PREC[type(f)]
        text = op.join(show(p, me + 1) for p in f.parts)
    elif isinstance(f, Implies):
        me = 1
        text = f"{show(f.left, 2)} -> {show(f.right, 1)}"
    else:
        kind = "forall" if isinstance(f, Forall) else "exists"
        vars_ = [f.var]
        body = f.body
        while type(body) is type(f):
            vars_.append(body.var)
            body = body.body
        me = 0
        text = f"{kind} {' '.join(vars_)}. {show(body, 0)}"
    return f"({text})" if me < prec else text


_TOKEN = re.compile(r"\s*(?:(->)|([!&|().,=])|([A-Za-z_][A-Za-z0-9_']*))")


def parse_formula(text: str) -> Formula:
    """Parse ``forall x y. (R(x,y) -> exists z. S(y,z))`` style syntax."""
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LogicError(f"unexpected character at position {pos}: {text[pos:pos + 10]!r}")
        tok = m.group(1) or m.group(2) or m.group(3)
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    parser = _FormulaParser(tokens)
    f = parser.formula()
    if parser.peek() != "<end>":
        raise LogicError(f"trailing input at position {parser.pos()}")
    return f


class _FormulaParser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def pos(self):
        return self.tokens[self.i][1]

    def take(self, expected=None):
        tok = self.peek()
        if expected is not None and tok != expected:
            raise LogicError(f"expected {expected!r} at position {self.pos()}, found {tok!r}")
        self.i += 1
        return tok

    def ident(self):
        tok = self.peek()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok) or tok in ("forall", "exists"):
            raise LogicError(f"identifier expected at position {self.pos()}, found {tok!r}")
        return self.take()

    def formula(self):
        if self.peek() in ("forall", "exists"):
            return self.quant()
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def quant(self):
        kind = self.take()
        vars_ = [self.ident()]
        while self.peek() != ".":
            if self.peek() == ",":
                self.take()
            vars_.append(self.ident())
        self.take(".")
        body = self.formula()
        return forall(vars_, body) if kind == "forall" else exists(vars_, body)

    def disj(self):
        parts = [self.conj()]
        while self.peek() == "|":
            self.take()
            parts.append(self.conj())
        return disj(*parts)

    def conj(self):
        parts = [self.unary()]
        while self.peek() == "&":
            self.take()
            parts.append(self.unary())
        return conj(*parts)

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in ("forall", "exists"):
            return self.quant()
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if tok in ("true", "false"):
            self.take()
            return Const(tok == "true")
        name = self.ident()
        if self.peek() == "=":
            self.take()
            return Equal(name, self.ident())
        self.take("(")
        args = [self.ident()]
        while self.peek() == ",":
            self.take()
            args.append(self.ident())
        self.take(")")
        return Atom(name, tuple(args))


# ---------------------------------------------------------------------------
# structures and problems


class Structure:
    """An automatic structure: interpretations of relation names over ``base*``."""

    def __init__(self, base: Alphabet, relations: Mapping[str, AutomaticRelation]):
        self.base = base
        self.relations = dict(relations)
        for name, r in self.relations.items():
            if name == "=":
                raise LogicError("'=' is built in")
            if r.base != base:
                raise LogicError(f"relation {name} is over a different alphabet")

    @property
    def vocabulary(self) -> dict:
        return {name: r.arity for name, r in self.relations.items()}

    def extend(self, extra: Mapping[str, AutomaticRelation]) -> "Structure":
        merged = dict(self.relations)
        merged.update(extra)
        return Structure(self.base, merged)

    def __getitem__(self, name):
        return self.relations[name]


@dataclass
class EsoProblem:
    """``exists R1..Rn. phi`` where ``phi`` is a list of named conjuncts."""

    structure: Structure
    unknowns: dict
    matrix: list

    def __post_init__(self):
        clash = set(self.unknowns) & set(self.structure.relations)
        if clash:
            raise LogicError(f"synthesis variables clash with the vocabulary: {sorted(clash)}")

    @property
    def formula(self) -> Formula:
        return conj(*[f for _, f in self.matrix])


def with_candidates(problem: EsoProblem, witnesses: Mapping[str, AutomaticRelation]) -> Structure:
    bound = {}
    for name, arity in problem.unknowns.items():
        if name not in witnesses:
            raise LogicError(f"no candidate for {name}")
        r = witnesses[name]
        if isinstance(r, Nfa):
            from .relations import from_language

            r = from_language(r)
        if r.arity != arity:
            raise LogicError(f"candidate for {name} has arity {r.arity}, expected {arity}")
        bound[name] = r
    extra = set(witnesses) - set(problem.unknowns)
    if extra:
        raise LogicError(f"unexpected candidates: {sorted(extra)}")
    return problem.structure.extend(bound)


# ---------------------------------------------------------------------------
# compilation


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Push negations to atoms; ``forall`` is kept and compiled as a complement."""
    if isinstance(f, (Atom, Equal)):
        return Not(f) if negate else f
    if isinstance(f, Const):
        return Const(f.value != negate)
    if isinstance(f, Not):
        return nnf(f.body, not negate)
    if isinstance(f, Implies):
        return nnf(Or((Not(f.left), f.right)), negate)
    if isinstance(f, (And, Or)):
        parts = tuple(nnf(p, negate) for p in f.parts)
        flip = isinstance(f, And) == negate
        return Or(parts) if flip else And(parts)
    if isinstance(f, Exists):
        return Forall(f.var, nnf(f.body, True)) if negate else Exists(f.var, nnf(f.body))
    if isinstance(f, Forall):
        return Exists(f.var, nnf(f.body, True)) if negate else Forall(f.var, nnf(f.body))
    raise LogicError(f"not a formula: {f!r}")


class _Compiler:
    def __init__(self, structure: Structure, budget: int):
        self.s = structure
        self.base = structure.base
        self.budget = budget

    def run(self, f):
        if isinstance(f, Const):
            return f.value
        if isinstance(f, Atom):
            return self.atom(f)
        if isinstance(f, Equal):
            if f.left == f.right:
                return True
            return identity(self.base).nfa, (f.left, f.right)
        if isinstance(f, Not):
            inner = self.run(f.body)
            return self.negate(inner)
        if isinstance(f, And):
            return self.conjunction(f.parts)
        if isinstance(f, Or):
            return self.disjunction(f.parts)
        if isinstance(f, Exists):
            return self.project(self.run(f.body), f.var)
        if isinstance(f, Forall):
            inner = self.run(nnf(f.body, True))
            return self.negate(self.project(inner, f.var))
        raise LogicError(f"cannot compile {f!r}")

    def atom(self, f: Atom):
        try:
            r = self.s.relations[f.name]
        except KeyError:
            raise LogicError(f"relation {f.name} is not interpreted") from None
        if r.arity != len(f.args):
            raise LogicError(f"{f.name} has arity {r.arity}, used with {len(f.args)} arguments")
        distinct = tuple(dict.fromkeys(f.args))
        if len(distinct) == len(f.args):
            return r.nfa, f.args
        pos = [distinct.index(a) for a in f.args]
        first = [f.args.index(v) for v in distinct]
        trans = []
        for row in r.nfa.trans:
            new = {}
            for letter, ds in row.items():
                if all(letter[i] == letter[first[pos[i]]] for i in range(len(letter))):
                    new[tuple(letter[j] for j in first)] = ds
            trans.append(new)
        nfa = Nfa._raw(PaddedAlphabet(self.base, len(distinct)), r.nfa.n, r.nfa.initial,
                       trans, r.nfa.accepting)
        return trim(nfa), distinct

    def negate(self, rel):
        if isinstance(rel, bool):
            return not rel
        nfa, vars_ = rel
        return complement_tracks(nfa, self.budget), vars_

    def project(self, rel, var):
        if isinstance(rel, bool):
            return rel
        nfa, vars_ = rel
        if var not in vars_:
            return rel
        out = erase(nfa, vars_.index(var))
        if isinstance(out, bool):
            return out
        return shrink(out), tuple(v for v in vars_ if v != var)

    def conjunction(self, parts):
        rels = []
        for p in parts:
            r = self.run(p)
            if r is False:
                return False
            if r is not True:
                if is_empty(r[0]):
                    return False
                rels.append(r)
        if not rels:
            return True
        rels.sort(key=lambda r: (r[0].n, len(r[1])))
        nfa, vars_ = rels.pop(0)
        while rels:
            # prefer a conjunct sharing variables with what we have
            best = max(range(len(rels)), key=lambda i: (len(set(rels[i][1]) & set(vars_)), -rels[i][0].n))
            other, ovars = rels.pop(best)
            nfa, vars_ = join(nfa, vars_, other, ovars, budget=self.budget * 10)
            if is_empty(nfa):
                return False
        return nfa, vars_

    def disjunction(self, parts):
        from .automata import union_nfa

        rels = []
        for p in parts:
            r = self.run(p)
            if r is True:
                return True
            if r is not False:
                rels.append(r)
        if not rels:
            return False
        vars_ = tuple(dict.fromkeys(v for _, vs in rels for v in vs))
        out = None
        for nfa, vs in rels:
            nfa = cylinder(nfa, vs, vars_)
            out = nfa if out is None else union_nfa(out, nfa)
        return out, vars_


def shrink(nfa: Nfa, factor: int = 4) -> Nfa:
    """Cheap size reduction: partial subset construction if it stays small."""
    if nfa.is_deterministic():
        return reduce_partial_dfa(trim(nfa))
    limit = factor * nfa.n + 16
    start = frozenset((nfa.initial,))
    index = {start: 0}
    order = [start]
    trans = []
    i = 0
    while i < len(order):
        cur = order[i]
        i += 1
        moves: dict = {}
        for s in cur:
            for letter, ds in nfa.trans[s].items():
                moves.setdefault(letter, set()).update(ds)
        row = {}
        for letter, ds in moves.items():
            nxt = frozenset(ds)
            j = index.get(nxt)
            if j is None:
                if len(order) >= limit:
                    return nfa
                j = index[nxt] = len(order)
                order.append(nxt)
            row[letter] = (j,)
        trans.append(row)
    acc = [k for k, sub in enumerate(order) if not sub.isdisjoint(nfa.accepting)]
    d = reduce_partial_dfa(trim(Nfa._raw(nfa.alphabet, len(order), 0, trans, acc)))
    return d if d.n <= nfa.n else nfa


def compile_raw(f: Formula, structure: Structure, budget: int = COMPILE_BUDGET):
    """Compile to ``bool`` or ``(nfa, vars)`` with ``vars`` a subset of the free variables."""
    return _Compiler(structure, budget).run(nnf(f))


def compile_formula(f: Formula, structure: Structure, budget: int = COMPILE_BUDGET,
                    order: Optional[Sequence[str]] = None):
    """Automaton of ``f`` over its free variables (or ``bool`` for sentences).

    Tracks follow ``order`` if given, else the first-occurrence order.
    """
    fv = tuple(order) if order is not None else free_variables(f)
    if set(fv) != set(free_variables(f)) or len(set(fv)) != len(fv):
        if not set(free_variables(f)) <= set(fv):
            raise LogicError("track order must cover the free variables")
    raw = compile_raw(f, structure, budget)
    if not fv:
        if isinstance(raw, bool):
            return raw
        raise AssertionError("closed formula compiled to a relation")
    return AutomaticRelation(_align(raw, fv, structure.base), trusted=True)


def _align(raw, fv, base) -> Nfa:
    from .relations import empty_relation, universal_tracks

    if raw is True:
        return universal_tracks(base, len(fv))
    if raw is False:
        return empty_relation(base, len(fv)).nfa
    nfa, vars_ = raw
    return cylinder(nfa, vars_, fv)


@dataclass
class HoldsResult:
    valid: bool
    counterexample: Optional[dict] = None

    def __bool__(self):
        return self.valid


def split_universal(f: Formula) -> tuple[tuple, Formula]:
    vars_ = []
    while isinstance(f, Forall):
        vars_.append(f.var)
        f = f.body
    return tuple(vars_), f


def holds(sentence: Formula, structure: Structure, budget: int = COMPILE_BUDGET) -> HoldsResult:
    """Decide a sentence; on failure report values for its outer universal variables."""
    outer, inner = split_universal(sentence)
    rest = set(free_variables(inner)) - set(outer)
    if rest:
        raise LogicError(f"free variables {sorted(rest)} in a sentence")
    outer = tuple(dict.fromkeys(outer))
    raw = compile_raw(Not(inner), structure, budget)
    if not outer:
        bad = raw if isinstance(raw, bool) else not is_empty(raw[0])
        return HoldsResult(True) if not bad else HoldsResult(False, {})
    nfa = _align(raw, outer, structure.base)
    w = shortest_word(nfa)
    assert (w is None) == is_empty(nfa)
    if w is None:
        return HoldsResult(True)
    words = deconvolve(w, len(outer))
    return HoldsResult(False, dict(zip(outer, words)))


__all__ = [
    "Atom", "Equal", "Const", "Not", "And", "Or", "Implies", "Exists", "Forall",
    "TRUE", "FALSE", "atom", "conj", "disj", "exists", "forall",
    "free_variables", "relation_names", "show", "parse_formula", "nnf",
    "Structure", "EsoProblem", "with_candidates",
    "compile_formula", "compile_raw", "holds", "HoldsResult", "split_universal",
    "LogicError", "BudgetExceeded", "AutomatonError",
]
