"""Problem files and witness files.

Problem grammar::

    # comment to end of line
    alphabet T N ;
    property safety ;            # safety | liveness | game | iso
    init  : T N* ;
    bad   : .* T .* T .* ;
    delta : ((T,T)|(N,N))* (T,N)(N,T) ((T,T)|(N,N))* ;
    dom   : { states 2 ; initial 0 ; accepting 1 ; 0 -T-> 1 ; 1 -N-> 1 ; } ;

A section is a regular expression or an inline automaton in braces using the
exchange format body. Relations in problem files are length-preserving, so
padding ``_`` is not allowed.

Witness files hold one or more automata in the exchange format; the header
``over sigma`` marks a language and ``over sigma^2`` a binary relation.
"""
from __future__ import annotations

import re
from typing import Optional

from .automata import (
    PAD,
    Alphabet,
    AutomatonError,
    Nfa,
    is_subset,
    parse_body,
    to_text,
)
from .conditions import (
    GameProblem,
    IsoProblem,
    LivenessProblem,
    SafetyProblem,
    Witness,
    make_witness,
)
from .regex import RegexError, parse_regex
from .relations import AutomaticRelation, PaddedAlphabet, from_language, join

SECTIONS = {
    "safety": ({"init", "bad", "delta"}, {"dom"}),
    "liveness": ({"init", "delta"}, {"dom"}),
    "game": ({"init", "final", "delta1", "delta2"}, {"dom"}),
    "iso": ({"dom1", "dom2", "r1", "r2"}, set()),
}
RELATION_SECTIONS = {"delta", "delta1", "delta2", "r1", "r2"}


class ProblemError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def _statements(text: str):
    """Split on ';' outside braces; yields (statement, line, column)."""
    out = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth < 0:
                raise ProblemError("unbalanced '}'", *_pos(text, i))
        elif ch == ";" and depth == 0:
            out.append((text[start:i], start))
            start = i + 1
    if depth:
        raise ProblemError("unterminated '{'", *_pos(text, start))
    if text[start:].strip():
        raise ProblemError("statement not terminated by ';'", *_pos(text, start))
    result = []
    for stmt, off in out:
        lead = len(stmt) - len(stmt.lstrip())
        if stmt.strip():
            result.append((stmt.strip(), *_pos(text, off + lead)))
    return result


def _pos(text: str, index: int):
    line = text.count("\n", 0, index) + 1
    col = index - (text.rfind("\n", 0, index) + 1) + 1
    return line, col


def parse_problem(text: str, name: str = "problem"):
    clean = _strip_comments(text)
    stmts = _statements(clean)
    base = None
    kind = None
    sections: dict = {}
    for stmt, line, col in stmts:
        head = stmt.split(None, 1)
        if head[0] == "alphabet" and ":" not in stmt:
            if base is not None:
                raise ProblemError("alphabet declared twice", line, col)
            try:
                base = Alphabet(stmt.split()[1:])
            except AutomatonError as exc:
                raise ProblemError(str(exc), line, col) from None
            continue
        if head[0] == "property" and ":" not in stmt:
            if len(head) != 2 or head[1].strip() not in SECTIONS:
                raise ProblemError(f"unknown property {stmt!r}", line, col)
            kind = head[1].strip()
            continue
        m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)\s*:(.*)\Z", stmt, re.S)
        if not m:
            raise ProblemError(f"cannot parse statement {stmt[:40]!r}", line, col)
        sec = m.group(1)
        if sec in sections:
            raise ProblemError(f"section {sec} defined twice", line, col)
        sections[sec] = (m.group(2).strip(), line, col)
    if base is None:
        raise ProblemError("missing alphabet declaration")
    if kind is None:
        raise ProblemError("missing property declaration")
    required, optional = SECTIONS[kind]
    missing = required - set(sections)
    if missing:
        raise ProblemError(f"property {kind} needs section(s): {', '.join(sorted(missing))}")
    extra = set(sections) - required - optional
    if extra:
        sec = sorted(extra)[0]
        raise ProblemError(f"section {sec} is not used by property {kind}", *sections[sec][1:])
    built = {}
    for sec, (body, line, col) in sections.items():
        arity = 2 if sec in RELATION_SECTIONS else 1
        built[sec] = _section(body, base, arity, sec, line, col)
    return _assemble(kind, base, built, sections, name)


def _section(body: str, base: Alphabet, arity: int, sec: str, line: int, col: int):
    alphabet = base if arity == 1 else PaddedAlphabet(base, arity)
    try:
        if body.startswith("{"):
            if not body.endswith("}"):
                raise ProblemError(f"inline automaton for {sec} must end with '}}'", line, col)
            nfa = parse_body(alphabet, body[1:-1])
        else:
            nfa = parse_regex(body, alphabet)
    except RegexError as exc:
        raise ProblemError(f"{sec}: {exc}", line, col) from None
    except AutomatonError as exc:
        raise ProblemError(f"{sec}: {exc}", line, col) from None
    if arity == 1:
        return nfa
    if any(PAD in letter for row in nfa.trans for letter in row):
        raise ProblemError(f"padding '_' is not allowed in problem files ({sec})", line, col)
    rel = AutomaticRelation(nfa)
    if not rel.length_preserving:
        raise ProblemError(f"relation {sec} is not length-preserving", line, col)
    return rel


def restrict(rel: AutomaticRelation, left: Nfa, right: Nfa) -> AutomaticRelation:
    """``rel`` intersected with ``left x right``."""
    nfa, vars_ = join(rel.nfa, ("x", "y"), from_language(left).nfa, ("x",))
    nfa, vars_ = join(nfa, vars_, from_language(right).nfa, ("y",))
    return AutomaticRelation(nfa, trusted=True)


def _assemble(kind, base, b, sections, name):
    def within(sec, dom_sec, dom):
        if not is_subset(b[sec], dom):
            raise ProblemError(f"{sec} is not contained in {dom_sec}", *sections[sec][1:])

    if kind == "iso":
        for sec, dom_sec in (("r1", "dom1"), ("r2", "dom2")):
            b[sec] = restrict(b[sec], b[dom_sec], b[dom_sec])
        return IsoProblem(base, b["dom1"], b["dom2"], b["r1"], b["r2"], name=name)
    dom = b.get("dom")
    if dom is not None:
        for sec in b:
            if sec not in RELATION_SECTIONS and sec != "dom":
                within(sec, "dom", dom)
        for sec in RELATION_SECTIONS & set(b):
            b[sec] = restrict(b[sec], dom, dom)
    if kind == "safety":
        return SafetyProblem(base, b["init"], b["bad"], b["delta"], dom, name=name)
    if kind == "liveness":
        return LivenessProblem(base, b["init"], b["delta"], dom, name=name)
    return GameProblem(base, b["init"], b["final"], b["delta1"], b["delta2"], dom, name=name)


def load_problem(path: str):
    import os

    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_problem(text, os.path.splitext(os.path.basename(path))[0])


# ---------------------------------------------------------------------------
# printing


def _inline(nfa: Nfa) -> str:
    body = to_text(nfa).split("\n", 1)[1].strip()
    return "{ " + " ".join(body.split("\n")) + " }"


def print_problem(problem) -> str:
    lines = [f"alphabet {' '.join(problem.base.symbols)} ;", f"property {problem.kind} ;"]
    if problem.kind == "iso":
        items = [("dom1", problem.dom1), ("dom2", problem.dom2), ("r1", problem.r1), ("r2", problem.r2)]
    else:
        items = [("init", problem.init)]
        if problem.kind == "safety":
            items += [("bad", problem.bad), ("delta", problem.delta)]
        elif problem.kind == "liveness":
            items += [("delta", problem.delta)]
        else:
            items += [("final", problem.final), ("delta1", problem.delta1), ("delta2", problem.delta2)]
        if problem.dom is not None:
            items.append(("dom", problem.dom))
    for sec, value in items:
        nfa = value.nfa if isinstance(value, AutomaticRelation) else value
        lines.append(f"{sec} : {_inline(nfa)} ;")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# witness files

_HEADER = re.compile(r"^\s*(nfa|dfa)\s+(\S+)\s+over\s+(\S+)\s*$")


def write_witness(witness: Witness) -> str:
    blocks = []
    for name, r in witness.bindings().items():
        if r.arity == 1:
            from .relations import to_language

            blocks.append(to_text(to_language(r), name, "sigma"))
        else:
            blocks.append(to_text(r.nfa, name, "sigma^2"))
    return "\n".join(blocks)


def parse_witness_automata(text: str, base: Alphabet) -> dict:
    blocks: list = []
    for raw in _strip_comments(text).splitlines():
        m = _HEADER.match(raw)
        if m:
            blocks.append([m.groups(), []])
        elif raw.strip():
            if not blocks:
                raise ProblemError("witness text before the first header")
            blocks[-1][1].append(raw)
    out = {}
    for (kind, name, over), body in blocks:
        if over == "sigma":
            alphabet = base
        elif re.fullmatch(r"sigma\^(\d+)", over):
            alphabet = PaddedAlphabet(base, int(over.split("^")[1]))
        else:
            raise ProblemError(f"unknown alphabet {over!r} in witness {name}")
        try:
            nfa = parse_body(alphabet, "\n".join(body), deterministic=False)
        except AutomatonError as exc:
            raise ProblemError(f"witness {name}: {exc}") from None
        if name in out:
            raise ProblemError(f"witness {name} given twice")
        out[name] = nfa if alphabet is base else AutomaticRelation(nfa)
    return out


def read_witness(text: str, problem) -> Witness:
    parts = parse_witness_automata(text, problem.base)
    try:
        return make_witness(problem.kind, parts)
    except ValueError as exc:
        raise ProblemError(str(exc)) from None
