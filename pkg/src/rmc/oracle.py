"""Explicit-state ground truth on fixed word lengths.

Length-preserving transition relations never leave the slice ``Sigma^n``
they start in, so each slice is a finite graph. The functions here only use
automaton simulation (no first-order compilation), which keeps them an
independent check of the symbolic machinery.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .automata import BudgetExceeded, Nfa, accepts
from .relations import AutomaticRelation, image, member

SLICE_BUDGET = 2 * 10 ** 6


def slice_words(nfa: Nfa, n: int, budget: int = SLICE_BUDGET) -> list:
    """Accepted words of length exactly ``n`` in lexicographic order."""
    key = nfa.alphabet.key
    layer = [((), frozenset((nfa.initial,)))]
    for _ in range(n):
        nxt = []
        for word, states in layer:
            moves: dict = {}
            for s in states:
                for letter, ds in nfa.trans[s].items():
                    moves.setdefault(letter, set()).update(ds)
            for letter in sorted(moves, key=key):
                nxt.append((word + (letter,), frozenset(moves[letter])))
        if len(nxt) > budget:
            raise BudgetExceeded("slice enumeration", budget)
        layer = nxt
    return [w for w, states in layer if not states.isdisjoint(nfa.accepting)]


class _Graph:
    def __init__(self, relation: AutomaticRelation, budget: int):
        self.r = relation
        self.budget = budget
        self.cache: dict = {}

    def succ(self, w) -> list:
        got = self.cache.get(w)
        if got is None:
            if len(self.cache) >= self.budget:
                raise BudgetExceeded("slice exploration", self.budget)
            got = image(self.r, w)
            self.cache[w] = got
        return got


@dataclass
class SafetyVerdict:
    safe: bool
    trace: Optional[list] = None
    explored: int = 0


def slice_reach(problem, n: int, budget: int = SLICE_BUDGET) -> SafetyVerdict:
    """Breadth-first search from the Init slice; a shortest trace to Bad if any."""
    g = _Graph(problem.delta, budget)
    parent: dict = {}
    queue = deque()
    for w in slice_words(problem.init, n, budget):
        parent[w] = None
        queue.append(w)
    while queue:
        w = queue.popleft()
        if accepts(problem.bad, w):
            trace = []
            while w is not None:
                trace.append(w)
                w = parent[w]
            return SafetyVerdict(False, trace[::-1], len(parent))
        for v in g.succ(w):
            if v not in parent:
                parent[v] = w
                queue.append(v)
    return SafetyVerdict(True, None, len(parent))


def reachable(init: Nfa, delta: AutomaticRelation, n: int, budget: int = SLICE_BUDGET) -> set:
    g = _Graph(delta, budget)
    seen = set(slice_words(init, n, budget))
    queue = deque(seen)
    while queue:
        w = queue.popleft()
        for v in g.succ(w):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


@dataclass
class TerminationVerdict:
    terminating: bool
    cycle: Optional[list] = None
    explored: int = 0


def slice_terminates(problem, n: int, budget: int = SLICE_BUDGET) -> TerminationVerdict:
    """Look for a cycle reachable from the Init slice."""
    g = _Graph(problem.delta, budget)
    color: dict = {}
    for root in slice_words(problem.init, n, budget):
        if root in color:
            continue
        color[root] = 1
        path = [root]
        stack = [iter(g.succ(root))]
        while stack:
            v = next(stack[-1], None)
            if v is None:
                stack.pop()
                color[path.pop()] = 2
                continue
            c = color.get(v)
            if c == 1:
                cycle = path[path.index(v):] + [v]
                return TerminationVerdict(False, cycle, len(color))
            if c is None:
                color[v] = 1
                path.append(v)
                stack.append(iter(g.succ(v)))
    return TerminationVerdict(True, None, len(color))


@dataclass
class GameVerdict:
    player2_wins_from: set = field(default_factory=set)
    init_slice: list = field(default_factory=list)
    explored: int = 0

    @property
    def init_won(self) -> bool:
        return all(w in self.player2_wins_from for w in self.init_slice)


def slice_game(problem, n: int, budget: int = SLICE_BUDGET) -> GameVerdict:
    """Player 2's attractor of Final in the alternating game on the slice.

    Vertices are (word, player to move). A Final vertex is won by Player 2
    whoever moves next. Player 1 without moves has nothing to object with,
    so the vertex counts for Player 2; Player 2 without moves loses.
    """
    g1 = _Graph(problem.delta1, budget)
    g2 = _Graph(problem.delta2, budget)
    init = slice_words(problem.init, n, budget)
    vertices = {}
    order = []
    queue = deque()
    for w in init:
        vertices[(w, 1)] = None
        queue.append((w, 1))
    edges: dict = {}
    while queue:
        v = queue.popleft()
        order.append(v)
        w, turn = v
        succ = [(u, 3 - turn) for u in (g1 if turn == 1 else g2).succ(w)]
        edges[v] = succ
        for u in succ:
            if u not in vertices:
                if len(vertices) >= budget:
                    raise BudgetExceeded("game slice", budget)
                vertices[u] = None
                queue.append(u)
    preds: dict = {v: [] for v in order}
    for v, succ in edges.items():
        for u in succ:
            preds[u].append(v)
    remaining = {v: len(edges[v]) for v in order}
    won = set()
    work = deque()
    for v in order:
        w, turn = v
        if accepts(problem.final, w) or (turn == 1 and not edges[v]):
            won.add(v)
            work.append(v)
    while work:
        u = work.popleft()
        for v in preds[u]:
            if v in won:
                continue
            if v[1] == 2:
                won.add(v)
                work.append(v)
            else:
                remaining[v] -= 1
                if remaining[v] == 0:
                    won.add(v)
                    work.append(v)
    wins = {w for (w, turn) in won if turn == 1}
    return GameVerdict(wins, init, len(order))


# ---------------------------------------------------------------------------
# isomorphism on slices


@dataclass
class IsoVerdict:
    isomorphic: bool
    witness_ok: Optional[bool]
    sizes: tuple = ()
    reason: str = ""


def slice_graph(dom: Nfa, rel: AutomaticRelation, n: int, budget: int = SLICE_BUDGET):
    import networkx as nx

    g = nx.DiGraph()
    words = slice_words(dom, n, budget)
    g.add_nodes_from(words)
    inside = set(words)
    for w in words:
        for v in image(rel, w):
            if v in inside:
                g.add_edge(w, v)
    return g


def slice_iso(problem, n: int, f: Optional[AutomaticRelation] = None,
              budget: int = SLICE_BUDGET, graph_check: bool = True) -> IsoVerdict:
    """Compare the two systems on length-``n`` words.

    With ``f`` the map is checked to be an edge-preserving bijection between
    the slices. ``graph_check`` additionally runs a generic graph
    isomorphism test, which does not look at ``f`` at all.
    """
    import networkx as nx

    g1 = slice_graph(problem.dom1, problem.r1, n, budget)
    g2 = slice_graph(problem.dom2, problem.r2, n, budget)
    sizes = (g1.number_of_nodes(), g2.number_of_nodes(), g1.number_of_edges(), g2.number_of_edges())
    witness_ok = None
    reason = ""
    if f is not None:
        mapping = {}
        witness_ok = True
        for w in g1.nodes:
            imgs = [v for v in image(f, w) if v in g2]
            if len(imgs) != 1:
                witness_ok, reason = False, f"F maps a word to {len(imgs)} slice words"
                break
            mapping[w] = imgs[0]
        if witness_ok and len(set(mapping.values())) != g2.number_of_nodes():
            witness_ok, reason = False, "F is not a bijection on the slice"
        if witness_ok:
            for a, b in g1.edges:
                if not g2.has_edge(mapping[a], mapping[b]):
                    witness_ok, reason = False, "F does not preserve an edge"
                    break
            if witness_ok and g1.number_of_edges() != g2.number_of_edges():
                witness_ok, reason = False, "edge counts differ"
    if graph_check:
        same = sizes[0] == sizes[1] and sizes[2] == sizes[3]
        # networkx reports two empty graphs as non-isomorphic
        iso = same and (sizes[0] == 0 or nx.vf2pp_is_isomorphic(g1, g2))
    else:
        iso = bool(witness_ok)
    return IsoVerdict(iso, witness_ok, sizes, reason)


# ---------------------------------------------------------------------------
# brute-force first-order evaluation


def evaluate(f, structure, env: dict, domain: Callable[[str, dict], list], cache=None) -> bool:
    """Evaluate a formula by recursion; ``domain(var, env)`` lists candidate words."""
    from .logic import And, Atom, Const, Equal, Exists, Forall, Implies, Not, Or

    if cache is None:
        cache = {}
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Atom):
        key = (f.name, tuple(env[a] for a in f.args))
        got = cache.get(key)
        if got is None:
            got = cache[key] = member(structure.relations[f.name], key[1])
        return got
    if isinstance(f, Equal):
        return env[f.left] == env[f.right]
    if isinstance(f, Not):
        return not evaluate(f.body, structure, env, domain, cache)
    if isinstance(f, And):
        return all(evaluate(p, structure, env, domain, cache) for p in f.parts)
    if isinstance(f, Or):
        return any(evaluate(p, structure, env, domain, cache) for p in f.parts)
    if isinstance(f, Implies):
        return (not evaluate(f.left, structure, env, domain, cache)
                or evaluate(f.right, structure, env, domain, cache))
    if isinstance(f, Exists):
        return any(evaluate(f.body, structure, {**env, f.var: w}, domain, cache)
                   for w in domain(f.var, env))
    if isinstance(f, Forall):
        return all(evaluate(f.body, structure, {**env, f.var: w}, domain, cache)
                   for w in domain(f.var, env))
    raise TypeError(f"not a formula: {f!r}")


def words_up_to(letters, n: int):
    for k in range(n + 1):
        yield from itertools.product(letters, repeat=k)
