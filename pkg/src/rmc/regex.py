"""Regular expressions over token alphabets.

Grammar::

    alt   := cat ('|' cat)*
    cat   := post+
    post  := atom ('*' | '+' | '?')*
    atom  := SYMBOL | '.' | '(' alt ')' | '(' comp (',' comp)+ ')'
    comp  := (SYMBOL | '_' | '.')+

Symbols are matched longest-first against the declared alphabet, so
``0 1 1``, ``011`` and ``p1 1 1`` all tokenize as expected. A parenthesised
group containing a top-level comma is a tuple letter; ``(11,00)`` stands for
``(1,0)(1,0)``. ``.`` is any symbol (or, in a relation, any unpadded letter).
"""
from __future__ import annotations

import itertools

from .automata import PAD, Alphabet, AutomatonError, Nfa, trim

_OPS = set("|*+?.")


class RegexError(AutomatonError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


def _lex(text: str, base: Alphabet):
    tokens = []
    longest = max(len(s) for s in base.symbols)
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "(),":
            tokens.append((ch, None, i))
            i += 1
            continue
        for size in range(min(longest, len(text) - i), 0, -1):
            cand = text[i:i + size]
            idx = base._index.get(cand)
            if idx is not None:
                tokens.append(("sym", idx, i))
                i += size
                break
        else:
            if ch == "_":
                tokens.append(("pad", None, i))
            elif ch in _OPS:
                tokens.append((ch, None, i))
            else:
                raise RegexError(f"unknown symbol starting with {ch!r}", i)
            i += 1
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, alphabet):
        self.alphabet = alphabet
        self.base = alphabet.base
        self.arity = getattr(alphabet, "arity", 0)
        self.tokens = _lex(text, self.base)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise RegexError(f"expected {kind!r}, found {tok[0]!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise RegexError("empty regular expression", 0)
        node = self.alt()
        tok = self.peek()
        if tok[0] != "end":
            raise RegexError(f"unexpected {tok[0]!r}", tok[2])
        return node

    def alt(self):
        parts = [self.cat()]
        while self.peek()[0] == "|":
            self.take()
            parts.append(self.cat())
        return parts[0] if len(parts) == 1 else ("alt", parts)

    def cat(self):
        parts = []
        while self.peek()[0] in ("sym", "(", ".", "pad"):
            parts.append(self.post())
        if not parts:
            tok = self.peek()
            raise RegexError(f"expected an expression, found {tok[0]!r}", tok[2])
        return parts[0] if len(parts) == 1 else ("cat", parts)

    def post(self):
        node = self.atom()
        while self.peek()[0] in ("*", "+", "?"):
            op = self.take()[0]
            node = ({"*": "star", "+": "plus", "?": "opt"}[op], node)
        return node

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "sym":
            self.take()
            if self.arity:
                raise RegexError("bare symbol in a relation; write a tuple letter like (a,b)", pos)
            return ("set", frozenset((val,)))
        if kind == ".":
            self.take()
            if self.arity:
                letters = itertools.product(range(len(self.base)), repeat=self.arity)
                return ("set", frozenset(letters))
            return ("set", frozenset(self.base.letters))
        if kind == "pad":
            raise RegexError("padding '_' outside a tuple letter", pos)
        if kind == "(":
            # tuple letter if a comma occurs at this nesting depth before ')'
            depth = 0
            j = self.i
            is_tuple = False
            while True:
                k = self.tokens[j][0]
                if k == "(":
                    depth += 1
                elif k == ")":
                    depth -= 1
                    if depth == 0:
                        break
                elif k == "," and depth == 1:
                    is_tuple = True
                    break
                elif k == "end":
                    break
                j += 1
            if is_tuple:
                return self.tuple_letter()
            self.take("(")
            node = self.alt()
            self.take(")")
            return node
        raise RegexError(f"unexpected {kind!r}", pos)

    def tuple_letter(self):
        _, _, pos = self.take("(")
        comps = []
        while True:
            comp = []
            while self.peek()[0] in ("sym", "pad", "."):
                k, v, _ = self.take()
                if k == "sym":
                    comp.append((v,))
                elif k == "pad":
                    comp.append((PAD,))
                else:
                    comp.append(tuple(self.base.letters))
            if not comp:
                tok = self.peek()
                raise RegexError("empty tuple component", tok[2])
            comps.append(comp)
            tok = self.take()
            if tok[0] == ")":
                break
            if tok[0] != ",":
                raise RegexError(f"unexpected {tok[0]!r} in tuple letter", tok[2])
        if not self.arity:
            raise RegexError("tuple letter in a language over plain symbols", pos)
        if len(comps) != self.arity:
            raise RegexError(f"tuple letter has {len(comps)} tracks, expected {self.arity}", pos)
        if len({len(c) for c in comps}) != 1:
            raise RegexError("tuple components of unequal length", pos)
        positions = []
        for column in zip(*comps):
            letters = frozenset(l for l in itertools.product(*column) if any(c != PAD for c in l))
            if not letters:
                raise RegexError("tuple letter padded on every track", pos)
            positions.append(("set", letters))
        return positions[0] if len(positions) == 1 else ("cat", positions)


def _thompson(node, alphabet):
    trans: list[dict] = []
    eps: list[set] = []

    def new():
        trans.append({})
        eps.append(set())
        return len(trans) - 1

    def build(nd):
        kind = nd[0]
        if kind == "set":
            s, e = new(), new()
            for letter in nd[1]:
                trans[s].setdefault(letter, set()).add(e)
            return s, e
        if kind == "cat":
            first = build(nd[1][0])
            s, e = first
            for part in nd[1][1:]:
                ps, pe = build(part)
                eps[e].add(ps)
                e = pe
            return s, e
        if kind == "alt":
            s, e = new(), new()
            for part in nd[1]:
                ps, pe = build(part)
                eps[s].add(ps)
                eps[pe].add(e)
            return s, e
        inner_s, inner_e = build(nd[1])
        s, e = new(), new()
        eps[s].add(inner_s)
        eps[inner_e].add(e)
        if kind in ("star", "plus"):
            eps[inner_e].add(inner_s)
        if kind in ("star", "opt"):
            eps[s].add(e)
        return s, e

    start, end = build(node)
    n = len(trans)
    closure = []
    for q in range(n):
        seen = {q}
        stack = [q]
        while stack:
            p = stack.pop()
            for r in eps[p]:
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        closure.append(seen)
    out = []
    for q in range(n):
        row: dict = {}
        for p in closure[q]:
            for letter, ds in trans[p].items():
                row.setdefault(letter, set()).update(ds)
        out.append({a: tuple(sorted(ds)) for a, ds in row.items()})
    acc = [q for q in range(n) if end in closure[q]]
    return trim(Nfa._raw(alphabet, n, start, out, acc))


def parse_regex(text: str, alphabet) -> Nfa:
    """Compile ``text`` to an NFA over ``alphabet`` (plain or padded product)."""
    node = _Parser(text, alphabet).parse()
    return _thompson(node, alphabet)
