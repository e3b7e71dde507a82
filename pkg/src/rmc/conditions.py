"""Verification problems, their first-order matrices, and witness checking.

Each problem kind produces an ordered list of ``(condition_id, sentence)``
pairs over the problem's relations plus the synthesized ones (``Inv``,
``Rank``, ``F``). A witness is checked one conjunct at a time so that the
first failure names its condition and comes with a shortest counterexample.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .automata import Alphabet, Nfa, universal
from .logic import (
    Atom,
    EsoProblem,
    Structure,
    holds,
    parse_formula,
    with_candidates,
)
from .relations import AutomaticRelation, from_language, shortest_tuple


class WitnessError(ValueError):
    pass


def _a(name, *args):
    return Atom(name, tuple(args))


def _implies(body, head):
    from .logic import Implies

    return Implies(body, head)


# ---------------------------------------------------------------------------
# problems


@dataclass
class SafetyProblem:
    base: Alphabet
    init: Nfa
    bad: Nfa
    delta: AutomaticRelation
    dom: Optional[Nfa] = None
    name: str = "safety"
    kind = "safety"
    unknowns = {"Inv": 1}

    def languages(self):
        return {"Init": self.init, "Bad": self.bad, "Dom": self.dom or universal(self.base)}

    def relations(self):
        return {"Delta": self.delta}


@dataclass
class LivenessProblem:
    base: Alphabet
    init: Nfa
    delta: AutomaticRelation
    dom: Optional[Nfa] = None
    name: str = "liveness"
    kind = "liveness"
    unknowns = {"Inv": 1, "Rank": 2}

    def languages(self):
        return {"Init": self.init, "Dom": self.dom or universal(self.base)}

    def relations(self):
        return {"Delta": self.delta}


@dataclass
class GameProblem:
    base: Alphabet
    init: Nfa
    final: Nfa
    delta1: AutomaticRelation
    delta2: AutomaticRelation
    dom: Optional[Nfa] = None
    name: str = "game"
    kind = "game"
    unknowns = {"Inv": 1, "Rank": 2}

    def languages(self):
        return {"Init": self.init, "Final": self.final, "Dom": self.dom or universal(self.base)}

    def relations(self):
        return {"Delta1": self.delta1, "Delta2": self.delta2}


@dataclass
class IsoProblem:
    base: Alphabet
    dom1: Nfa
    dom2: Nfa
    r1: AutomaticRelation
    r2: AutomaticRelation
    name: str = "iso"
    kind = "iso"
    unknowns = {"F": 2}

    def languages(self):
        return {"Dom1": self.dom1, "Dom2": self.dom2}

    def relations(self):
        return {"R1": self.r1, "R2": self.r2}


Problem = Union[SafetyProblem, LivenessProblem, GameProblem, IsoProblem]


def structure_of(problem: Problem) -> Structure:
    rels = {k: from_language(v) for k, v in problem.languages().items()}
    rels.update(problem.relations())
    return Structure(problem.base, rels)


# ---------------------------------------------------------------------------
# witnesses


@dataclass
class SafetyWitness:
    inv: Nfa

    def bindings(self):
        return {"Inv": from_language(self.inv)}


@dataclass
class LivenessWitness:
    inv: Nfa
    rank: AutomaticRelation

    def bindings(self):
        return {"Inv": from_language(self.inv), "Rank": self.rank}


@dataclass
class GameWitness:
    inv: Nfa
    rank: AutomaticRelation

    def bindings(self):
        return {"Inv": from_language(self.inv), "Rank": self.rank}


@dataclass
class IsoWitness:
    f: AutomaticRelation

    def bindings(self):
        return {"F": self.f}


Witness = Union[SafetyWitness, LivenessWitness, GameWitness, IsoWitness]

_WITNESS_KIND = {
    SafetyWitness: "safety",
    LivenessWitness: "liveness",
    GameWitness: "game",
    IsoWitness: "iso",
}


def make_witness(kind: str, parts: dict) -> Witness:
    """Build a witness from named automata (``Inv`` languages, ``Rank``/``F`` relations)."""
    from .relations import to_language

    def lang(x):
        return to_language(x) if isinstance(x, AutomaticRelation) else x

    try:
        if kind == "safety":
            return SafetyWitness(lang(parts["Inv"]))
        if kind == "liveness":
            return LivenessWitness(lang(parts["Inv"]), parts["Rank"])
        if kind == "game":
            return GameWitness(lang(parts["Inv"]), parts["Rank"])
        if kind == "iso":
            return IsoWitness(parts["F"])
    except KeyError as exc:
        raise WitnessError(f"{kind} witness needs {exc.args[0]}") from None
    raise WitnessError(f"unknown problem kind {kind!r}")


# ---------------------------------------------------------------------------
# matrices


def _f(text):
    return parse_formula(text)


def safety_matrix(p: Optional[SafetyProblem] = None) -> list:
    return [
        ("safety.init-subset", _f("forall x. Init(x) -> Inv(x)")),
        ("safety.bad-disjoint", _f("forall x. !(Inv(x) & Bad(x))")),
        ("safety.inductive", _f("forall x y. Inv(x) & Delta(x,y) -> Inv(y)")),
    ]


def _rank_conditions(prefix):
    return [
        (f"{prefix}.transitive", _f("forall x y z. Rank(x,y) & Rank(y,z) -> Rank(x,z)")),
        (f"{prefix}.irreflexive", _f("forall x. !Rank(x,x)")),
    ]


def liveness_matrix(p: Optional[LivenessProblem] = None) -> list:
    return [
        ("live.init-subset", _f("forall x. Init(x) -> Inv(x)")),
        ("live.inductive", _f("forall x y. Inv(x) & Delta(x,y) -> Inv(y)")),
        ("live.rank-covers", _f("forall x y. Inv(x) & Inv(y) & Delta(x,y) -> Rank(x,y)")),
    ] + _rank_conditions("live")


def game_matrix(p: Optional[GameProblem] = None) -> list:
    progress = _f(
        "forall s t. Inv(s) & !Final(s) & Delta1(s,t) & !Final(t)"
        " -> exists u. Delta2(t,u) & Inv(u) & Rank(s,u)"
    )
    return ([("game.init-subset", _f("forall x. Init(x) -> Inv(x)"))]
            + _rank_conditions("game")
            + [("game.progress", progress)])


def iso_matrix(p: Optional[IsoProblem] = None) -> list:
    return [
        ("iso.domain", _f("forall x y. F(x,y) -> Dom1(x) & Dom2(y)")),
        ("iso.functional", _f("forall x y z. F(x,y) & F(x,z) -> y = z")),
        ("iso.injective", _f("forall x y z. F(x,z) & F(y,z) -> x = y")),
        ("iso.total", _f("forall x. Dom1(x) -> exists y. F(x,y)")),
        ("iso.surjective", _f("forall y. Dom2(y) -> exists x. F(x,y)")),
        ("iso.hom-fwd", _f("forall x y u v. R1(x,y) & F(x,u) & F(y,v) -> R2(u,v)")),
        ("iso.hom-bwd", _f("forall x y u v. R2(u,v) & F(x,u) & F(y,v) -> R1(x,y)")),
    ]


MATRIX = {
    "safety": safety_matrix,
    "liveness": liveness_matrix,
    "game": game_matrix,
    "iso": iso_matrix,
}


def matrix_of(problem: Problem) -> list:
    return MATRIX[problem.kind](problem)


def eso_problem(problem: Problem) -> EsoProblem:
    return EsoProblem(structure_of(problem), dict(problem.unknowns), matrix_of(problem))


# ---------------------------------------------------------------------------
# checking


@dataclass
class CheckResult:
    valid: bool
    condition: Optional[str] = None
    counterexample: Optional[dict] = None
    checked: list = field(default_factory=list)

    def __bool__(self):
        return self.valid

    def describe(self, base: Alphabet) -> str:
        if self.valid:
            return "valid"
        parts = ", ".join(f"{k}={base.decode(w) or 'ε'!s}" for k, w in self.counterexample.items())
        return f"violated {self.condition}: {parts}"


def _validate(problem: Problem, witness: Witness):
    if _WITNESS_KIND.get(type(witness)) != problem.kind:
        raise WitnessError(f"{type(witness).__name__} does not fit a {problem.kind} problem")
    for name, r in witness.bindings().items():
        if r.base != problem.base:
            raise WitnessError(f"{name} is over a different alphabet")
    rank = getattr(witness, "rank", None)
    if rank is not None and not rank.length_preserving:
        raise WitnessError("Rank must be length-preserving")


def check(problem: Problem, witness: Witness, budget: int = 10 ** 5,
          conditions: Optional[list] = None) -> CheckResult:
    """Evaluate each conjunct in order; stop at the first violated one."""
    _validate(problem, witness)
    eso = eso_problem(problem)
    s = with_candidates(eso, witness.bindings())
    done = []
    for cid, sentence in (conditions or eso.matrix):
        res = holds(sentence, s, budget)
        if not res.valid:
            return CheckResult(False, cid, res.counterexample, done)
        done.append(cid)
    return CheckResult(True, checked=done)


def lasso_check(rank: AutomaticRelation) -> Optional[tuple]:
    """A pair ``(x, y)`` with ``Rank(x,y)`` and ``Rank(y,y)``, or ``None``."""
    from .logic import compile_formula

    s = Structure(rank.base, {"Rank": rank})
    r = compile_formula(_f("Rank(x,y) & Rank(y,y)"), s, order=("x", "y"))
    return shortest_tuple(r)
