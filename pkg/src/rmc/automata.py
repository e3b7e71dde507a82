"""Finite automata over explicit finite alphabets.

Words are tuples of letters. For a base :class:`Alphabet` a letter is the
index of a symbol; padded product alphabets (see :mod:`rmc.relations`) use
tuples of indices. Every algorithm here only relies on the small alphabet
protocol (``letters``, ``key``, ``show``, ``parse_letter``, ``contains``), so
the same code serves languages and relations.

Automata are treated as immutable values once constructed.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Optional, Sequence

PAD = -1
PAD_TOKEN = "_"
_FORBIDDEN = set(" \t\r\n,()")

Word = tuple


class AutomatonError(ValueError):
    pass


class AlphabetError(AutomatonError):
    pass


class BudgetExceeded(RuntimeError):
    """A construction exceeded its configured state budget."""

    def __init__(self, what: str, budget: int):
        super().__init__(f"{what}: state budget of {budget} exceeded")
        self.budget = budget


class Alphabet:
    """An ordered list of distinct symbol names."""

    __slots__ = ("symbols", "_index", "letters")

    def __init__(self, symbols: Iterable[str]):
        symbols = tuple(symbols)
        if not symbols:
            raise AlphabetError("alphabet must be non-empty")
        for s in symbols:
            if not isinstance(s, str) or not s:
                raise AlphabetError(f"bad symbol {s!r}")
            if s == PAD_TOKEN:
                raise AlphabetError("'_' is reserved for padding")
            if _FORBIDDEN & set(s):
                raise AlphabetError(f"symbol {s!r} contains whitespace, comma or parenthesis")
        if len(set(symbols)) != len(symbols):
            raise AlphabetError("duplicate symbols in alphabet")
        self.symbols = symbols
        self._index = {s: i for i, s in enumerate(symbols)}
        self.letters = tuple(range(len(symbols)))

    def __len__(self):
        return len(self.symbols)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and other.symbols == self.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"Alphabet({list(self.symbols)!r})"

    @property
    def base(self) -> "Alphabet":
        return self

    def contains(self, letter) -> bool:
        return isinstance(letter, int) and 0 <= letter < len(self.symbols)

    def key(self, letter):
        return letter

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise AlphabetError(f"unknown symbol {symbol!r}") from None

    def show(self, letter) -> str:
        return self.symbols[letter]

    def parse_letter(self, token: str):
        return self.index(token)

    def munch(self, text: str) -> list[int]:
        """Split ``text`` (no whitespace) into symbols, longest match first."""
        out = []
        i = 0
        longest = max(len(s) for s in self.symbols)
        while i < len(text):
            for size in range(min(longest, len(text) - i), 0, -1):
                idx = self._index.get(text[i:i + size])
                if idx is not None:
                    out.append(idx)
                    i += size
                    break
            else:
                raise AlphabetError(f"unknown symbol at {text[i:]!r}")
        return out

    def encode(self, text) -> Word:
        """Turn ``"0 1 1"``, ``"011"`` or ``["0", "1", "1"]`` into a word."""
        if isinstance(text, str):
            letters: list[int] = []
            for chunk in text.split():
                letters.extend(self.munch(chunk))
            return tuple(letters)
        return tuple(self.index(s) for s in text)

    def decode(self, word: Sequence[int]) -> str:
        return " ".join(self.symbols[a] for a in word)


def word_key(alphabet, word):
    return (len(word), tuple(alphabet.key(a) for a in word))


class Nfa:
    """A nondeterministic automaton with a single initial state.

    ``trans[s]`` maps a letter to the sorted tuple of successor states.
    """

    __slots__ = ("alphabet", "n", "initial", "trans", "accepting")

    def __init__(self, alphabet, n: int, initial: int = 0,
                 transitions: Iterable[tuple] = (), accepting: Iterable[int] = ()):
        if n < 1:
            raise AutomatonError("an automaton needs at least one state")
        if not 0 <= initial < n:
            raise AutomatonError(f"initial state {initial} out of range")
        acc = frozenset(accepting)
        if any(not 0 <= q < n for q in acc):
            raise AutomatonError("accepting state out of range")
        table: list[dict] = [dict() for _ in range(n)]
        for src, letter, dst in transitions:
            if not (0 <= src < n and 0 <= dst < n):
                raise AutomatonError(f"transition {src}->{dst} out of range")
            if not alphabet.contains(letter):
                raise AutomatonError(f"letter {letter!r} not in alphabet")
            table[src].setdefault(letter, set()).add(dst)
        trans = tuple({a: tuple(sorted(d)) for a, d in row.items()} for row in table)
        self._set(alphabet, n, initial, trans, acc)

    def _set(self, alphabet, n, initial, trans, accepting):
        self.alphabet = alphabet
        self.n = n
        self.initial = initial
        self.trans = trans
        self.accepting = accepting

    @classmethod
    def _raw(cls, alphabet, n, initial, trans, accepting):
        obj = cls.__new__(cls)
        obj._set(alphabet, n, initial, tuple(trans), frozenset(accepting))
        return obj

    @property
    def transitions(self) -> list[tuple]:
        key = self.alphabet.key
        out = [(s, a, d) for s, row in enumerate(self.trans) for a, ds in row.items() for d in ds]
        out.sort(key=lambda t: (t[0], key(t[1]), t[2]))
        return out

    @property
    def transition_count(self) -> int:
        return sum(len(ds) for row in self.trans for ds in row.values())

    def is_deterministic(self) -> bool:
        return all(len(ds) == 1 for row in self.trans for ds in row.values())

    def step(self, states: Iterable[int], letter) -> frozenset:
        out = set()
        for s in states:
            out.update(self.trans[s].get(letter, ()))
        return frozenset(out)

    def __repr__(self):
        kind = type(self).__name__
        return f"<{kind} states={self.n} transitions={self.transition_count} accepting={sorted(self.accepting)}>"


class Dfa(Nfa):
    """A complete deterministic automaton."""

    __slots__ = ()

    def __init__(self, alphabet, n, initial=0, transitions=(), accepting=()):
        super().__init__(alphabet, n, initial, transitions, accepting)
        self._check_complete()

    def _check_complete(self):
        letters = self.alphabet.letters
        for s, row in enumerate(self.trans):
            if len(row) != len(letters) or any(len(d) != 1 for d in row.values()):
                raise AutomatonError(f"state {s} is not complete and deterministic")

    def delta(self, state: int, letter) -> int:
        return self.trans[state][letter][0]


# ---------------------------------------------------------------------------
# queries


def accepts(a: Nfa, word: Sequence) -> bool:
    current = frozenset((a.initial,))
    for letter in word:
        current = a.step(current, letter)
        if not current:
            return False
    return not current.isdisjoint(a.accepting)


def _distance_to_accept(a: Nfa) -> list[Optional[int]]:
    back: list[set] = [set() for _ in range(a.n)]
    for s, row in enumerate(a.trans):
        for ds in row.values():
            for d in ds:
                back[d].add(s)
    dist: list[Optional[int]] = [None] * a.n
    queue = deque()
    for q in a.accepting:
        dist[q] = 0
        queue.append(q)
    while queue:
        q = queue.popleft()
        for p in back[q]:
            if dist[p] is None:
                dist[p] = dist[q] + 1
                queue.append(p)
    return dist


def shortest_word(a: Nfa) -> Optional[Word]:
    """Shortest accepted word, ties broken lexicographically; ``None`` if empty."""
    dist = _distance_to_accept(a)
    if dist[a.initial] is None:
        return None
    key = a.alphabet.key
    current = {a.initial}
    remaining = dist[a.initial]
    word = []
    while remaining > 0:
        best = None
        best_next: set = set()
        for s in current:
            for letter, ds in a.trans[s].items():
                good = [d for d in ds if dist[d] == remaining - 1]
                if not good:
                    continue
                if best is None or key(letter) < key(best):
                    best, best_next = letter, set(good)
                elif letter == best:
                    best_next.update(good)
        word.append(best)
        current = best_next
        remaining -= 1
    return tuple(word)


def is_empty(a: Nfa) -> bool:
    return _distance_to_accept(a)[a.initial] is None


def enumerate_words(a: Nfa, max_len: int) -> list[Word]:
    """All accepted words of length at most ``max_len`` in (length, lex) order."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    dist = _distance_to_accept(a)
    key = a.alphabet.key
    out = []
    layer = [((), frozenset((a.initial,)))]
    for length in range(max_len + 1):
        nxt = []
        for word, states in layer:
            if not states.isdisjoint(a.accepting):
                out.append(word)
            if length == max_len:
                continue
            moves: dict = {}
            for s in states:
                for letter, ds in a.trans[s].items():
                    moves.setdefault(letter, set()).update(ds)
            for letter in sorted(moves, key=key):
                succ = frozenset(d for d in moves[letter]
                                 if dist[d] is not None and dist[d] <= max_len - length - 1)
                if succ:
                    nxt.append((word + (letter,), succ))
        layer = nxt
    return out


# ---------------------------------------------------------------------------
# constructions


def trim(a: Nfa) -> Nfa:
    """Drop states that are unreachable or cannot reach acceptance."""
    reach = {a.initial}
    stack = [a.initial]
    while stack:
        s = stack.pop()
        for ds in a.trans[s].values():
            for d in ds:
                if d not in reach:
                    reach.add(d)
                    stack.append(d)
    dist = _distance_to_accept(a)
    keep = [s for s in sorted(reach) if dist[s] is not None]
    if a.initial not in keep:
        return Nfa._raw(a.alphabet, 1, 0, [{}], ())
    if len(keep) == a.n:
        return a
    keep.remove(a.initial)
    keep.insert(0, a.initial)
    ren = {s: i for i, s in enumerate(keep)}
    trans = []
    for s in keep:
        row = {}
        for letter, ds in a.trans[s].items():
            nd = tuple(sorted(ren[d] for d in ds if d in ren))
            if nd:
                row[letter] = nd
        trans.append(row)
    return Nfa._raw(a.alphabet, len(keep), 0, trans, [ren[q] for q in a.accepting if q in ren])


def determinize(a: Nfa, budget: int = 10 ** 6) -> Dfa:
    """Subset construction; the result is complete (a sink is added if needed)."""
    if isinstance(a, Dfa):
        return a
    letters = a.alphabet.letters
    start = frozenset((a.initial,))
    index = {start: 0}
    order = [start]
    trans = []
    i = 0
    while i < len(order):
        cur = order[i]
        i += 1
        row = {}
        for letter in letters:
            nxt = a.step(cur, letter)
            j = index.get(nxt)
            if j is None:
                if len(order) >= budget:
                    raise BudgetExceeded("determinize", budget)
                j = index[nxt] = len(order)
                order.append(nxt)
            row[letter] = (j,)
        trans.append(row)
    acc = [k for k, sub in enumerate(order) if not sub.isdisjoint(a.accepting)]
    return Dfa._raw(a.alphabet, len(order), 0, trans, acc)


def _reachable_dfa(d: Dfa) -> Dfa:
    order = [d.initial]
    seen = {d.initial: 0}
    letters = sorted(d.alphabet.letters, key=d.alphabet.key)
    i = 0
    while i < len(order):
        s = order[i]
        i += 1
        for letter in letters:
            t = d.trans[s][letter][0]
            if t not in seen:
                seen[t] = len(order)
                order.append(t)
    trans = [{a: (seen[d.trans[s][a][0]],) for a in d.alphabet.letters} for s in order]
    return Dfa._raw(d.alphabet, len(order), 0, trans, [seen[q] for q in d.accepting if q in seen])


def minimize(d: Dfa) -> Dfa:
    """Hopcroft minimization followed by canonical BFS renumbering."""
    if not isinstance(d, Dfa):
        d = determinize(d)
    d = _reachable_dfa(d)
    letters = d.alphabet.letters
    n = d.n
    inverse = {a: [[] for _ in range(n)] for a in letters}
    for s in range(n):
        for a in letters:
            inverse[a][d.trans[s][a][0]].append(s)
    acc = set(d.accepting)
    rej = set(range(n)) - acc
    blocks = [b for b in (acc, rej) if b]
    block_of = [0] * n
    for bi, b in enumerate(blocks):
        for q in b:
            block_of[q] = bi
    work = deque()
    pending = set()
    if len(blocks) == 2:
        small = 0 if len(blocks[0]) <= len(blocks[1]) else 1
        for a in letters:
            work.append((small, a))
            pending.add((small, a))
    while work:
        bi, a = work.popleft()
        pending.discard((bi, a))
        pred = set()
        inv_a = inverse[a]
        for q in blocks[bi]:
            pred.update(inv_a[q])
        touched = {}
        for p in pred:
            touched.setdefault(block_of[p], set()).add(p)
        for bj, inter in touched.items():
            block = blocks[bj]
            if len(inter) == len(block):
                continue
            rest = block - inter
            blocks[bj] = inter
            new = len(blocks)
            blocks.append(rest)
            for q in rest:
                block_of[q] = new
            for c in letters:
                if (bj, c) in pending:
                    work.append((new, c))
                    pending.add((new, c))
                else:
                    pick = bj if len(inter) <= len(rest) else new
                    work.append((pick, c))
                    pending.add((pick, c))
    key = d.alphabet.key
    ordered_letters = sorted(letters, key=key)
    # canonical numbering: BFS over blocks from the initial block
    start = block_of[d.initial]
    ren = {start: 0}
    order = [start]
    i = 0
    while i < len(order):
        b = order[i]
        i += 1
        rep = next(iter(blocks[b]))
        for a in ordered_letters:
            t = block_of[d.trans[rep][a][0]]
            if t not in ren:
                ren[t] = len(order)
                order.append(t)
    trans = []
    for b in order:
        rep = next(iter(blocks[b]))
        trans.append({a: (ren[block_of[d.trans[rep][a][0]]],) for a in letters})
    accepting = [ren[b] for b in order if next(iter(blocks[b])) in acc]
    return Dfa._raw(d.alphabet, len(order), 0, trans, accepting)


def complement(d: Nfa) -> Dfa:
    d = determinize(d)
    return Dfa._raw(d.alphabet, d.n, d.initial, d.trans, set(range(d.n)) - d.accepting)


_MODES = {
    "intersect": lambda x, y: x and y,
    "union": lambda x, y: x or y,
    "difference": lambda x, y: x and not y,
}


def product(a: Nfa, b: Nfa, mode: str = "intersect") -> Dfa:
    if a.alphabet != b.alphabet:
        raise AlphabetError("product of automata over different alphabets")
    try:
        op = _MODES[mode]
    except KeyError:
        raise ValueError(f"unknown product mode {mode!r}") from None
    a, b = determinize(a), determinize(b)
    letters = a.alphabet.letters
    start = (a.initial, b.initial)
    index = {start: 0}
    order = [start]
    trans = []
    i = 0
    while i < len(order):
        p, q = order[i]
        i += 1
        row = {}
        for letter in letters:
            nxt = (a.trans[p][letter][0], b.trans[q][letter][0])
            j = index.get(nxt)
            if j is None:
                j = index[nxt] = len(order)
                order.append(nxt)
            row[letter] = (j,)
        trans.append(row)
    acc = [k for k, (p, q) in enumerate(order) if op(p in a.accepting, q in b.accepting)]
    return Dfa._raw(a.alphabet, len(order), 0, trans, acc)


def union_nfa(a: Nfa, b: Nfa) -> Nfa:
    """Disjoint union with a fresh initial state (no epsilon moves)."""
    if a.alphabet != b.alphabet:
        raise AlphabetError("union of automata over different alphabets")
    off_a, off_b = 1, 1 + a.n
    trans: list[dict] = [dict()]
    for off, m in ((off_a, a), (off_b, b)):
        for row in m.trans:
            trans.append({x: tuple(d + off for d in ds) for x, ds in row.items()})
    for off, m in ((off_a, a), (off_b, b)):
        for x, ds in m.trans[m.initial].items():
            merged = set(trans[0].get(x, ())) | {d + off for d in ds}
            trans[0][x] = tuple(sorted(merged))
    acc = {q + off_a for q in a.accepting} | {q + off_b for q in b.accepting}
    if a.initial in a.accepting or b.initial in b.accepting:
        acc.add(0)
    return trim(Nfa._raw(a.alphabet, 1 + a.n + b.n, 0, trans, acc))


def universal(alphabet) -> Dfa:
    return Dfa._raw(alphabet, 1, 0, [{x: (0,) for x in alphabet.letters}], [0])


def empty(alphabet) -> Dfa:
    return Dfa._raw(alphabet, 1, 0, [{x: (0,) for x in alphabet.letters}], [])


def from_words(alphabet, words: Iterable[Sequence]) -> Nfa:
    """A trie automaton accepting exactly the given finite set of words."""
    trans: list[dict] = [dict()]
    acc = set()
    for w in words:
        s = 0
        for x in w:
            row = trans[s]
            if x not in row:
                row[x] = (len(trans),)
                trans.append(dict())
            s = row[x][0]
        acc.add(s)
    for row in trans:
        for x in row:
            if not alphabet.contains(x):
                raise AutomatonError(f"letter {x!r} not in alphabet")
    return Nfa._raw(alphabet, len(trans), 0, trans, acc)


def language_equal(a: Nfa, b: Nfa) -> bool:
    return is_empty(product(a, b, "difference")) and is_empty(product(b, a, "difference"))


def is_subset(a: Nfa, b: Nfa) -> bool:
    return is_empty(product(a, b, "difference"))


# ---------------------------------------------------------------------------
# exchange format


def to_text(a: Nfa, name: str = "A", alphabet_name: str = "sigma") -> str:
    kind = "dfa" if isinstance(a, Dfa) else "nfa"
    lines = [f"{kind} {name} over {alphabet_name}"]
    acc = " ".join(str(q) for q in sorted(a.accepting))
    lines.append(f"states {a.n} ; initial {a.initial} ; accepting {acc} ;".replace("  ", " "))
    for s, letter, d in a.transitions:
        lines.append(f"{s} -{a.alphabet.show(letter)}-> {d} ;")
    return "\n".join(lines) + "\n"


def parse_body(alphabet, text: str, deterministic: bool = False) -> Nfa:
    """Parse the ``states ...`` line and transition lines of the exchange format."""
    stmts = [s.strip() for s in _split_statements(text)]
    stmts = [s for s in stmts if s]
    n = initial = None
    accepting: list[int] = []
    transitions = []
    for st in stmts:
        head = st.split(None, 1)
        if head[0] == "states":
            n = int(head[1])
        elif head[0] == "initial":
            initial = int(head[1])
        elif head[0] == "accepting":
            accepting = [int(t) for t in head[1].split()] if len(head) > 1 else []
        else:
            try:
                src, rest = st.split("-", 1)
                letter, dst = rest.rsplit("->", 1)
                transitions.append((int(src), alphabet.parse_letter(letter.strip()), int(dst)))
            except (ValueError, AlphabetError) as exc:
                raise AutomatonError(f"bad transition {st!r}: {exc}") from None
    if n is None or initial is None:
        raise AutomatonError("automaton body needs 'states' and 'initial'")
    cls = Dfa if deterministic else Nfa
    return cls(alphabet, n, initial, transitions, accepting)


def _split_statements(text: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == ";" and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def to_dot(a: Nfa, name: str = "A") -> str:
    lines = [f'digraph "{name}" {{', "  rankdir=LR;", '  __start [shape=point];']
    for q in range(a.n):
        shape = "doublecircle" if q in a.accepting else "circle"
        lines.append(f"  {q} [shape={shape}];")
    lines.append(f"  __start -> {a.initial};")
    edges: dict = {}
    for s, letter, d in a.transitions:
        edges.setdefault((s, d), []).append(a.alphabet.show(letter))
    for (s, d), labels in edges.items():
        label = ", ".join(labels).replace('"', '\\"')
        lines.append(f'  {s} -> {d} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
