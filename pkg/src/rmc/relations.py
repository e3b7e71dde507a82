"""Automatic relations: k-ary word relations read as automata over convolutions.

A convolution letter is a k-tuple of base symbol indices where ``PAD`` (-1)
marks a track whose word has already ended. Automata of relations only
accept well-formed convolutions: on every track padding, once started,
persists, and no letter is padded on every track.

The track-level primitives (:func:`join`, :func:`erase`,
:func:`complement_tracks`, :func:`cylinder`, :func:`permute`) operate on raw
NFAs plus a list of variable names and are what the first-order compiler in
:mod:`rmc.logic` is built from.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Optional, Sequence

from .automata import (
    PAD,
    PAD_TOKEN,
    Alphabet,
    AlphabetError,
    AutomatonError,
    BudgetExceeded,
    Nfa,
    accepts,
    enumerate_words,
    is_empty,
    shortest_word,
    trim,
)
from .regex import parse_regex


class PaddedAlphabet:
    """All k-tuples over ``base`` plus padding, except the all-padding tuple."""

    __slots__ = ("base", "arity", "_letters")

    def __init__(self, base: Alphabet, arity: int):
        if arity < 1:
            raise AlphabetError("arity must be at least 1")
        self.base = base
        self.arity = arity
        self._letters = None

    @property
    def letters(self) -> tuple:
        if self._letters is None:
            self._letters = _all_letters(len(self.base), self.arity, 0)
        return self._letters

    def __len__(self):
        return (len(self.base) + 1) ** self.arity - 1

    def __eq__(self, other):
        return (isinstance(other, PaddedAlphabet) and other.arity == self.arity
                and other.base == self.base)

    def __hash__(self):
        return hash((self.base, self.arity))

    def __repr__(self):
        return f"PaddedAlphabet({list(self.base.symbols)!r}, {self.arity})"

    def contains(self, letter) -> bool:
        if not isinstance(letter, tuple) or len(letter) != self.arity:
            return False
        m = len(self.base)
        return all(c == PAD or 0 <= c < m for c in letter) and any(c != PAD for c in letter)

    def key(self, letter):
        m = len(self.base)
        return tuple(m if c == PAD else c for c in letter)

    def show(self, letter) -> str:
        syms = self.base.symbols
        return "(" + ",".join(PAD_TOKEN if c == PAD else syms[c] for c in letter) + ")"

    def parse_letter(self, token: str):
        token = token.strip()
        if not (token.startswith("(") and token.endswith(")")):
            raise AlphabetError(f"tuple letter expected, got {token!r}")
        parts = [p.strip() for p in token[1:-1].split(",")]
        if len(parts) != self.arity:
            raise AlphabetError(f"letter {token!r} has wrong arity")
        letter = tuple(PAD if p == PAD_TOKEN else self.base.index(p) for p in parts)
        if not self.contains(letter):
            raise AlphabetError(f"letter {token!r} is padded on every track")
        return letter


@lru_cache(maxsize=None)
def _all_letters(m: int, k: int, mask: int) -> tuple:
    """Letters of arity k that are padded on (at least) the tracks in ``mask``."""
    cols = [(PAD,) if mask >> i & 1 else tuple(range(m)) + (PAD,) for i in range(k)]
    out = [l for l in itertools.product(*cols) if any(c != PAD for c in l)]
    out.sort(key=lambda l: tuple(m if c == PAD else c for c in l))
    return tuple(out)


def pad_mask(letter) -> int:
    mask = 0
    for i, c in enumerate(letter):
        if c == PAD:
            mask |= 1 << i
    return mask


# ---------------------------------------------------------------------------
# words


def convolve(words: Sequence[Sequence[int]]) -> tuple:
    if not words:
        raise ValueError("cannot convolve zero words")
    n = max(len(w) for w in words)
    return tuple(tuple(w[i] if i < len(w) else PAD for w in words) for i in range(n))


def deconvolve(word: Sequence[tuple], arity: int) -> tuple:
    tracks = [[] for _ in range(arity)]
    for letter in word:
        for i, c in enumerate(letter):
            if c != PAD:
                tracks[i].append(c)
    return tuple(tuple(t) for t in tracks)


# ---------------------------------------------------------------------------
# track-level primitives


def restrict_wellformed(nfa: Nfa) -> Nfa:
    """Intersect with the well-formed-convolution checker."""
    k = nfa.alphabet.arity
    full = (1 << k) - 1
    start = (nfa.initial, 0)
    index = {start: 0}
    order = [start]
    trans = []
    i = 0
    while i < len(order):
        q, mask = order[i]
        i += 1
        row: dict = {}
        for letter, ds in nfa.trans[q].items():
            pm = pad_mask(letter)
            if pm & mask != mask or pm == full:
                continue
            targets = []
            for d in ds:
                st = (d, pm)
                j = index.get(st)
                if j is None:
                    j = index[st] = len(order)
                    order.append(st)
                targets.append(j)
            row[letter] = tuple(sorted(targets))
        trans.append(row)
    acc = [j for j, (q, _) in enumerate(order) if q in nfa.accepting]
    return trim(Nfa._raw(nfa.alphabet, len(order), 0, trans, acc))


FIN = -1


def join(a: Nfa, avars: Sequence[str], b: Nfa, bvars: Sequence[str],
         budget: int = 10 ** 6) -> tuple[Nfa, tuple]:
    """Natural join of two relations with named tracks (conjunction).

    A component whose words have all ended passes to the ``FIN`` marker and
    from then on reads padding on all of its tracks.
    """
    avars, bvars = tuple(avars), tuple(bvars)
    out_vars = avars + tuple(v for v in bvars if v not in avars)
    k = len(out_vars)
    base = a.alphabet.base
    alphabet = PaddedAlphabet(base, k)
    a_pos = [out_vars.index(v) for v in avars]
    b_pos = [out_vars.index(v) for v in bvars]
    shared_b = [i for i, v in enumerate(bvars) if v in avars]
    shared_a = [avars.index(bvars[i]) for i in shared_b]
    a_pad = (PAD,) * len(avars)
    b_pad = (PAD,) * len(bvars)

    def options(m: Nfa, q: int, padded: tuple):
        if q == FIN:
            return [(padded, (FIN,))]
        opts = list(m.trans[q].items())
        if q in m.accepting:
            opts.append((padded, (FIN,)))
        return opts

    b_index_cache: dict = {}

    def b_index(q):
        got = b_index_cache.get(q)
        if got is None:
            got = {}
            for letter, ds in options(b, q, b_pad):
                got.setdefault(tuple(letter[i] for i in shared_b), []).append((letter, ds))
            b_index_cache[q] = got
        return got

    start = (a.initial, b.initial)
    index = {start: 0}
    order = [start]
    trans = []
    i = 0
    while i < len(order):
        p, q = order[i]
        i += 1
        row: dict = {}
        bi = b_index(q)
        for la, pa in options(a, p, a_pad):
            matches = bi.get(tuple(la[j] for j in shared_a))
            if not matches:
                continue
            for lb, qb in matches:
                letter = [PAD] * k
                for j, pos in enumerate(a_pos):
                    letter[pos] = la[j]
                for j, pos in enumerate(b_pos):
                    letter[pos] = lb[j]
                letter = tuple(letter)
                if all(c == PAD for c in letter):
                    continue
                dests = row.setdefault(letter, set())
                for x in pa:
                    for y in qb:
                        st = (x, y)
                        j = index.get(st)
                        if j is None:
                            if len(order) >= budget:
                                raise BudgetExceeded("join", budget)
                            j = index[st] = len(order)
                            order.append(st)
                        dests.add(j)
        trans.append({l: tuple(sorted(ds)) for l, ds in row.items()})
    acc = [j for j, (p, q) in enumerate(order)
           if (p == FIN or p in a.accepting) and (q == FIN or q in b.accepting)]
    return trim(Nfa._raw(alphabet, len(order), 0, trans, acc)), out_vars


def erase(nfa: Nfa, track: int):
    """Existentially project away ``track``.

    Returns an NFA of arity k-1, or a bool when k == 1. The erased track may
    outlive all others; letters that become fully padded form a suffix and
    are folded into the accepting set.
    """
    alphabet = nfa.alphabet
    k = alphabet.arity
    if not 0 <= track < k:
        raise IndexError(f"track {track} out of range for arity {k}")
    if k == 1:
        return not is_empty(nfa)
    new_alpha = PaddedAlphabet(alphabet.base, k - 1)
    trans = []
    tail_edges: list[set] = [set() for _ in range(nfa.n)]
    for s, row in enumerate(nfa.trans):
        new_row: dict = {}
        for letter, ds in row.items():
            rest = letter[:track] + letter[track + 1:]
            if all(c == PAD for c in rest):
                tail_edges[s].update(ds)
            else:
                new_row.setdefault(rest, set()).update(ds)
        trans.append({l: tuple(sorted(ds)) for l, ds in new_row.items()})
    # states that reach acceptance through fully padded letters only
    back: list[set] = [set() for _ in range(nfa.n)]
    for s, ds in enumerate(tail_edges):
        for d in ds:
            back[d].add(s)
    acc = set(nfa.accepting)
    stack = list(acc)
    while stack:
        q = stack.pop()
        for p in back[q]:
            if p not in acc:
                acc.add(p)
                stack.append(p)
    return trim(Nfa._raw(new_alpha, nfa.n, nfa.initial, trans, acc))


def complement_tracks(nfa: Nfa, budget: int = 10 ** 5) -> Nfa:
    """Complement relative to well-formed convolutions (a partial DFA).

    Absent letters are exactly the ill-formed ones.
    """
    alphabet = nfa.alphabet
    m = len(alphabet.base)
    k = alphabet.arity
    start = (frozenset((nfa.initial,)), 0)
    index = {start: 0}
    order = [start]
    trans = []
    i = 0
    while i < len(order):
        sub, mask = order[i]
        i += 1
        moves: dict = {}
        for s in sub:
            for letter, ds in nfa.trans[s].items():
                moves.setdefault(letter, set()).update(ds)
        row = {}
        for letter in _all_letters(m, k, mask):
            nxt = (frozenset(moves.get(letter, ())), pad_mask(letter))
            j = index.get(nxt)
            if j is None:
                if len(order) >= budget:
                    raise BudgetExceeded("complement", budget)
                j = index[nxt] = len(order)
                order.append(nxt)
            row[letter] = (j,)
        trans.append(row)
    acc = [j for j, (sub, _) in enumerate(order) if sub.isdisjoint(nfa.accepting)]
    return reduce_partial_dfa(trim(Nfa._raw(alphabet, len(order), 0, trans, acc)))


def reduce_partial_dfa(d: Nfa) -> Nfa:
    """Merge equivalent states of a trimmed deterministic (possibly partial) automaton."""
    if not d.is_deterministic() or d.n == 1:
        return d
    key = d.alphabet.key
    rows = [sorted(row.items(), key=lambda kv: key(kv[0])) for row in d.trans]
    cls = [1 if q in d.accepting else 0 for q in range(d.n)]
    count = len(set(cls))
    while True:
        sigs = {}
        new = []
        for q in range(d.n):
            sig = (cls[q], tuple((a, cls[ds[0]]) for a, ds in rows[q]))
            new.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == count:
            break
        cls, count = new, len(sigs)
    if count == d.n:
        return d
    # renumber with the initial class first, in order of first appearance
    order = {}
    order[cls[d.initial]] = 0
    for q in range(d.n):
        order.setdefault(cls[q], len(order))
    trans: list = [None] * count
    for q in range(d.n):
        c = order[cls[q]]
        if trans[c] is None:
            trans[c] = {a: (order[cls[ds[0]]],) for a, ds in d.trans[q].items()}
    acc = {order[cls[q]] for q in d.accepting}
    return Nfa._raw(d.alphabet, count, 0, trans, acc)


def permute(nfa: Nfa, order: Sequence[int]) -> Nfa:
    """Reorder tracks: new track i is old track ``order[i]``."""
    trans = []
    for row in nfa.trans:
        trans.append({tuple(l[j] for j in order): ds for l, ds in row.items()})
    return Nfa._raw(nfa.alphabet, nfa.n, nfa.initial, trans, nfa.accepting)


def cylinder(nfa: Nfa, avars: Sequence[str], out_vars: Sequence[str]) -> Nfa:
    """Extend a relation over ``avars`` to ``out_vars`` (unconstrained new tracks)."""
    avars, out_vars = tuple(avars), tuple(out_vars)
    extra = [v for v in out_vars if v not in avars]
    if extra:
        nfa, got = join(nfa, avars, universal_tracks(nfa.alphabet.base, len(extra)), extra)
    else:
        got = avars
    if got != out_vars:
        nfa = permute(nfa, [got.index(v) for v in out_vars])
    return nfa


@lru_cache(maxsize=64)
def universal_tracks(base: Alphabet, k: int) -> Nfa:
    """All well-formed convolutions of arity k; states are padding masks."""
    m = len(base)
    n = 1 << k
    trans = []
    for mask in range(n):
        trans.append({l: (pad_mask(l),) for l in _all_letters(m, k, mask)})
    return Nfa._raw(PaddedAlphabet(base, k), n, 0, trans, range(n))


# ---------------------------------------------------------------------------
# relations as values


class AutomaticRelation:
    """A k-ary relation over ``Sigma*`` recognized by an automaton on convolutions."""

    __slots__ = ("nfa",)

    def __init__(self, nfa: Nfa, *, trusted: bool = False):
        if not isinstance(nfa.alphabet, PaddedAlphabet):
            raise AutomatonError("relations need a padded product alphabet")
        self.nfa = nfa if trusted else restrict_wellformed(nfa)

    @property
    def arity(self) -> int:
        return self.nfa.alphabet.arity

    @property
    def base(self) -> Alphabet:
        return self.nfa.alphabet.base

    @property
    def alphabet(self) -> PaddedAlphabet:
        return self.nfa.alphabet

    def __repr__(self):
        return f"<AutomaticRelation arity={self.arity} states={self.nfa.n}>"

    def __contains__(self, words):
        return member(self, words)

    @property
    def length_preserving(self) -> bool:
        t = trim(self.nfa)
        return all(PAD not in letter for row in t.trans for letter in row)


def relation(nfa: Nfa) -> AutomaticRelation:
    return AutomaticRelation(nfa)


def parse_relation(text: str, base: Alphabet, arity: int = 2) -> AutomaticRelation:
    return AutomaticRelation(parse_regex(text, PaddedAlphabet(base, arity)))


def from_language(lang: Nfa) -> AutomaticRelation:
    base = lang.alphabet
    alpha = PaddedAlphabet(base, 1)
    trans = [{(a,): ds for a, ds in row.items()} for row in lang.trans]
    return AutomaticRelation(Nfa._raw(alpha, lang.n, lang.initial, trans, lang.accepting), trusted=True)


def to_language(r: AutomaticRelation) -> Nfa:
    if r.arity != 1:
        raise AutomatonError("only unary relations are languages")
    trans = [{l[0]: ds for l, ds in row.items()} for row in r.nfa.trans]
    return Nfa._raw(r.base, r.nfa.n, r.nfa.initial, trans, r.nfa.accepting)


def identity(base: Alphabet, arity: int = 2) -> AutomaticRelation:
    alpha = PaddedAlphabet(base, arity)
    row = {(a,) * arity: (0,) for a in base.letters}
    return AutomaticRelation(Nfa._raw(alpha, 1, 0, [row], [0]), trusted=True)


def full_relation(base: Alphabet, arity: int = 2, length_preserving: bool = True) -> AutomaticRelation:
    alpha = PaddedAlphabet(base, arity)
    if not length_preserving:
        return AutomaticRelation(universal_tracks(base, arity), trusted=True)
    row = {l: (0,) for l in itertools.product(base.letters, repeat=arity)}
    return AutomaticRelation(Nfa._raw(alpha, 1, 0, [row], [0]), trusted=True)


def empty_relation(base: Alphabet, arity: int = 2) -> AutomaticRelation:
    return AutomaticRelation(Nfa._raw(PaddedAlphabet(base, arity), 1, 0, [{}], ()), trusted=True)


def member(r: AutomaticRelation, words: Sequence[Sequence[int]]) -> bool:
    if len(words) != r.arity:
        raise ValueError(f"expected {r.arity} words, got {len(words)}")
    return accepts(r.nfa, convolve([tuple(w) for w in words]))


def _tracks(k):
    return tuple(f"t{i}" for i in range(k))


def intersect(r: AutomaticRelation, s: AutomaticRelation) -> AutomaticRelation:
    _same(r, s)
    nfa, _ = join(r.nfa, _tracks(r.arity), s.nfa, _tracks(s.arity))
    return AutomaticRelation(nfa, trusted=True)


def union(r: AutomaticRelation, s: AutomaticRelation) -> AutomaticRelation:
    from .automata import union_nfa

    _same(r, s)
    return AutomaticRelation(union_nfa(r.nfa, s.nfa), trusted=True)


def complement(r: AutomaticRelation, budget: int = 10 ** 5) -> AutomaticRelation:
    return AutomaticRelation(complement_tracks(r.nfa, budget), trusted=True)


def _same(r, s):
    if r.base != s.base or r.arity != s.arity:
        raise AlphabetError("relations over different alphabets or arities")


def project(r: AutomaticRelation, track: int):
    out = erase(r.nfa, track)
    if isinstance(out, bool):
        return out
    return AutomaticRelation(out, trusted=True)


def cylindrify(r: AutomaticRelation, at: int) -> AutomaticRelation:
    """Insert an unconstrained track at position ``at``."""
    k = r.arity
    if not 0 <= at <= k:
        raise IndexError(f"cannot insert track at {at} for arity {k}")
    old = _tracks(k)
    new = old[:at] + ("fresh",) + old[at:]
    return AutomaticRelation(cylinder(r.nfa, old, new), trusted=True)


def compose(r: AutomaticRelation, s: AutomaticRelation) -> AutomaticRelation:
    if r.base != s.base:
        raise AlphabetError("composition over different alphabets")
    nfa, vars_ = join(r.nfa, ("x", "y"), s.nfa, ("y", "z"))
    return AutomaticRelation(erase(nfa, vars_.index("y")), trusted=True)


def post_image(r: AutomaticRelation, lang: Nfa) -> Nfa:
    if lang.alphabet != r.base:
        raise AlphabetError("post image over different alphabets")
    nfa, vars_ = join(from_language(lang).nfa, ("x",), r.nfa, ("x", "y"))
    out = erase(nfa, vars_.index("x"))
    return trim(to_language(AutomaticRelation(out, trusted=True)))


def pre_image(r: AutomaticRelation, lang: Nfa) -> Nfa:
    nfa, vars_ = join(from_language(lang).nfa, ("y",), r.nfa, ("x", "y"))
    out = erase(nfa, vars_.index("y"))
    return trim(to_language(AutomaticRelation(out, trusted=True)))


def is_subset(r: AutomaticRelation, s: AutomaticRelation) -> bool:
    _same(r, s)
    nfa, _ = join(r.nfa, _tracks(r.arity), complement_tracks(s.nfa), _tracks(s.arity))
    return is_empty(nfa)


def equal(r: AutomaticRelation, s: AutomaticRelation) -> bool:
    return is_subset(r, s) and is_subset(s, r)


def shortest_tuple(r: AutomaticRelation) -> Optional[tuple]:
    w = shortest_word(r.nfa)
    return None if w is None else deconvolve(w, r.arity)


def enumerate_tuples(r: AutomaticRelation, max_len: int) -> list[tuple]:
    return [deconvolve(w, r.arity) for w in enumerate_words(r.nfa, max_len)]


def image(r: AutomaticRelation, word: Sequence[int], track: int = 0, extra: int = 0) -> list[tuple]:
    """Words ``y`` related to ``word`` (placed on ``track``) in a binary relation.

    Only ``|y| <= |word| + extra`` is explored, which is exact for
    length-preserving relations with ``extra = 0``.
    """
    if r.arity != 2:
        raise ValueError("image is defined for binary relations")
    nfa = r.nfa
    x = tuple(word)
    n = len(x)
    symbols = sorted(r.base.letters)
    out = []

    def mk(a, b):
        return (a, b) if track == 0 else (b, a)

    def rec(i, states, y, ended):
        if not states:
            return
        if i >= n:
            if not states.isdisjoint(nfa.accepting):
                out.append(tuple(y))
            if ended or len(y) >= n + extra:
                return
            for b in symbols:
                rec(i + 1, nfa.step(states, mk(PAD, b)), y + [b], False)
            return
        a = x[i]
        if not ended:
            for b in symbols:
                rec(i + 1, nfa.step(states, mk(a, b)), y + [b], False)
        # y ends before position i
        rec_ended(i, states, y)

    def rec_ended(i, states, y):
        for j in range(i, n):
            states = nfa.step(states, mk(x[j], PAD))
            if not states:
                return
        if not states.isdisjoint(nfa.accepting):
            out.append(tuple(y))

    rec(0, frozenset((nfa.initial,)), [], False)
    return sorted(set(out), key=lambda w: (len(w), w))
