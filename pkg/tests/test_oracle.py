import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_lp_relation, random_nfa
from rmc.automata import Alphabet, accepts, enumerate_words
from rmc.conditions import GameProblem, LivenessProblem, SafetyProblem
from rmc.oracle import (
    evaluate,
    reachable,
    slice_game,
    slice_graph,
    slice_iso,
    slice_reach,
    slice_terminates,
    slice_words,
    words_up_to,
)
from rmc.logic import parse_formula
from rmc.regex import parse_regex
from rmc.relations import member, parse_relation
from rmc.synthesis import SynthesisOptions, synthesize

BITS = Alphabet(["0", "1"])


def test_slice_words_match_enumeration(bits):
    a = parse_regex("0 (0|1)* 1", bits)
    for n in range(6):
        expect = [w for w in enumerate_words(a, n) if len(w) == n]
        assert slice_words(a, n) == expect


class TestSafety:
    def test_rewrite_slice_safe(self, rewrite_safety):
        v = slice_reach(rewrite_safety, 4)
        assert v.safe and v.trace is None
        assert v.explored == len(reachable(rewrite_safety.init, rewrite_safety.delta, 4))

    def test_token_passing_safe(self, token_passing):
        assert slice_reach(token_passing, 5).safe

    def test_trace_to_bad(self, bits):
        p = SafetyProblem(bits, parse_regex("1 1 0", bits), parse_regex("0 1 1", bits),
                          parse_relation("((0,0)|(1,1))* (1,0)(0,1) ((0,0)|(1,1))*", bits))
        v = slice_reach(p, 3)
        assert not v.safe
        assert [bits.decode(w) for w in v.trace] == ["1 1 0", "1 0 1", "0 1 1"]

    def test_reachable_by_brute_force(self, token_passing):
        p = token_passing
        for n in range(5):
            seen = {w for w in itertools.product(p.base.letters, repeat=n) if accepts(p.init, w)}
            while True:
                new = {y for x in seen for y in itertools.product(p.base.letters, repeat=n)
                       if member(p.delta, (x, y))} - seen
                if not new:
                    break
                seen |= new
            assert reachable(p.init, p.delta, n) == seen


class TestTermination:
    def test_rewrite_terminates(self, rewrite_liveness):
        assert slice_terminates(rewrite_liveness, 5).terminating

    def test_cycle(self, bits):
        p = LivenessProblem(bits, parse_regex("0 1", bits), parse_relation("(0,1)(1,0)|(1,0)(0,1)", bits))
        v = slice_terminates(p, 2)
        assert not v.terminating
        assert v.cycle[0] == v.cycle[-1]


@pytest.fixture
def takeaway_all(takeaway):
    """Take-away with every Player-1 configuration initial."""
    init = parse_regex("p1 1* 0*", takeaway.base)
    return GameProblem(takeaway.base, init, takeaway.final, takeaway.delta1, takeaway.delta2)


class TestGame:
    def test_eight_chips_win(self, takeaway_all):
        v = slice_game(takeaway_all, 9)
        assert takeaway_all.base.encode("p1 1 1 1 1 1 1 1 1") in v.player2_wins_from

    def test_five_chips_lose(self, takeaway_all):
        v = slice_game(takeaway_all, 6)
        assert takeaway_all.base.encode("p1 1 1 1 1 1") not in v.player2_wins_from

    @pytest.mark.parametrize("n", range(1, 10))
    def test_winning_counts(self, takeaway_all, n):
        b = takeaway_all.base
        v = slice_game(takeaway_all, n)
        wins = sorted(sum(1 for a in w if a == b.index("1")) for w in v.player2_wins_from)
        assert wins == [k for k in range(n) if k % 4 == 0]

    def test_init_slice_won(self, takeaway):
        for n in range(13):
            assert slice_game(takeaway, n).init_won

    def test_stuck_player2_loses(self, bits):
        # Player 1 moves 0 -> 1; Player 2 has no move and Final is empty
        p = GameProblem(bits, parse_regex("0", bits), parse_regex("0 0", bits),
                        parse_relation("(0,1)", bits), parse_relation("(0,0)", bits))
        assert not slice_game(p, 1).init_won

    def test_stuck_player1_is_a_win(self, bits):
        p = GameProblem(bits, parse_regex("0", bits), parse_regex("0 0", bits),
                        parse_relation("(1,1)", bits), parse_relation("(0,0)", bits))
        assert slice_game(p, 1).init_won


class TestIso:
    def test_slice_sizes(self, dining):
        v = slice_iso(dining, 3)
        assert v.isomorphic
        # 9^3 words per system; edge count also counted by membership below
        assert v.sizes == (729, 729, 1782, 1782)

    def test_edges_by_membership(self, dining):
        g = slice_graph(dining.dom1, dining.r1, 3)
        words = list(g.nodes)
        assert sum(1 for a in words for b in words if member(dining.r1, (a, b))) == g.number_of_edges()

    def test_empty_slices(self, dining):
        v = slice_iso(dining, 2)
        assert v.isomorphic and v.sizes == (0, 0, 0, 0)

    def test_identity_is_rejected(self, dining):
        from rmc.relations import identity

        v = slice_iso(dining, 3, identity(dining.base), graph_check=False)
        assert v.witness_ok is False


def test_evaluate_brute_force(bits):
    from rmc.logic import Structure
    from rmc.relations import from_language

    s = Structure(bits, {"Bad": from_language(parse_regex("1* 0*", bits))})
    f = parse_formula("exists y. Bad(y) & !(y = x)")

    def domain(var, env):
        return list(words_up_to(bits.letters, 2))

    assert evaluate(f, s, {"x": ()}, domain)
    assert evaluate(parse_formula("forall y. Bad(y) | !Bad(y)"), s, {}, domain)


# the oracle and synthesis never disagree on random small systems -----------


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_safety_agreement(seed):
    rng = random.Random(seed)
    delta = random_lp_relation(rng, BITS, 2, 0.3)
    p = SafetyProblem(BITS, random_nfa(rng, BITS, 2), random_nfa(rng, BITS, 2), delta)
    res = synthesize(p, SynthesisOptions(max_states=3, time_limit=20))
    if res.found:
        assert all(slice_reach(p, n).safe for n in range(7))
    if not all(slice_reach(p, n).safe for n in range(7)):
        assert not res.found


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_liveness_agreement(seed):
    rng = random.Random(seed)
    delta = random_lp_relation(rng, BITS, 2, 0.25)
    p = LivenessProblem(BITS, random_nfa(rng, BITS, 2), delta)
    res = synthesize(p, SynthesisOptions(max_states=3, time_limit=20))
    if res.found:
        assert all(slice_terminates(p, n).terminating for n in range(7))
