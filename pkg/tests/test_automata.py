import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_dfa, random_nfa
from rmc.automata import (
    Alphabet,
    AlphabetError,
    AutomatonError,
    BudgetExceeded,
    Dfa,
    Nfa,
    accepts,
    complement,
    determinize,
    empty,
    enumerate_words,
    from_words,
    is_empty,
    is_subset,
    language_equal,
    minimize,
    parse_body,
    product,
    shortest_word,
    to_dot,
    to_text,
    trim,
    union_nfa,
    universal,
)
from rmc.regex import RegexError, parse_regex


def words(alphabet, n):
    for k in range(n + 1):
        yield from itertools.product(alphabet.letters, repeat=k)


def lang(a, n=5):
    return {w for w in words(a.alphabet, n) if accepts(a, w)}


class TestAlphabet:
    def test_encode_decode(self, bits):
        assert bits.encode("0 1 1") == (0, 1, 1)
        assert bits.encode("011") == (0, 1, 1)
        assert bits.decode((1, 0)) == "1 0"

    def test_longest_match(self):
        a = Alphabet(["p1", "p2", "1", "0"])
        assert a.encode("p110") == (0, 2, 3)
        assert a.encode("p1 1 1") == (0, 2, 2)

    @pytest.mark.parametrize("symbols", [[], ["a", "a"], ["_"], ["a b"], ["(x"]])
    def test_rejects_bad_symbols(self, symbols):
        with pytest.raises(AlphabetError):
            Alphabet(symbols)

    def test_unknown_symbol(self, bits):
        with pytest.raises(AlphabetError):
            bits.encode("012")


class TestRegex:
    def test_init_language(self, bits):
        a = parse_regex("0 (0|1)* 1", bits)
        accepted = {bits.decode(w).replace(" ", "") for w in enumerate_words(a, 3)}
        assert accepted == {"01", "001", "011"}

    def test_bad_language(self, bits):
        a = parse_regex("1* 0*", bits)
        for w in ["", "10", "1100"]:
            assert accepts(a, bits.encode(w))
        assert not accepts(a, bits.encode("01"))

    def test_dot_and_operators(self, bits):
        assert accepts(parse_regex(".", bits), (1,))
        plus = parse_regex("1+", bits)
        assert not accepts(plus, ()) and accepts(plus, (1, 1))
        opt = parse_regex("0 1?", bits)
        assert lang(opt) == {(0,), (0, 1)}

    @pytest.mark.parametrize("text", ["(0", "0 |", "2", "0)", "*"])
    def test_errors(self, bits, text):
        with pytest.raises(RegexError):
            parse_regex(text, bits)

    def test_error_position(self, bits):
        with pytest.raises(RegexError) as info:
            parse_regex("0 1 2", bits)
        assert info.value.pos == 4


class TestOperations:
    def test_minimize_factor(self, bits):
        a = parse_regex("(0|1)* 1 0 (0|1)*", bits)
        assert minimize(determinize(a)).n == 3

    def test_minimize_init(self, bits):
        d = minimize(determinize(parse_regex("0 (0|1)* 1", bits)))
        assert d.n == 4
        assert isinstance(d, Dfa)

    def test_difference_shortest(self, bits):
        init = parse_regex("0 (0|1)* 1", bits)
        assert shortest_word(product(universal(bits), init, "difference")) == ()

    def test_complement_contains(self, bits):
        c = complement(parse_regex("1* 0*", bits))
        assert accepts(c, bits.encode("01"))
        assert not accepts(c, bits.encode("10"))

    def test_shortest_word(self, bits):
        assert shortest_word(parse_regex("0 (0|1)* 1", bits)) == (0, 1)
        assert shortest_word(empty(bits)) is None

    def test_enumerate(self, bits):
        got = enumerate_words(parse_regex("1* 0*", bits), 2)
        assert [bits.decode(w).replace(" ", "") for w in got] == ["", "0", "1", "00", "10", "11"]

    def test_from_words(self, bits):
        a = from_words(bits, [(0, 1), (), (1,)])
        assert lang(a) == {(0, 1), (), (1,)}

    def test_union_and_subset(self, bits):
        a = parse_regex("0*", bits)
        b = parse_regex("1*", bits)
        u = union_nfa(a, b)
        assert is_subset(a, u) and is_subset(b, u)
        assert not is_subset(u, a)

    def test_determinize_budget(self, bits):
        # (0|1)* 1 (0|1)^12 needs 2^13 subsets
        a = parse_regex("(0|1)* 1" + " (0|1)" * 12, bits)
        with pytest.raises(BudgetExceeded):
            determinize(a, budget=100)

    def test_dfa_must_be_complete(self, bits):
        with pytest.raises(AutomatonError):
            Dfa(bits, 1, 0, [(0, 0, 0)], [])

    def test_trim(self, bits):
        a = Nfa(bits, 3, 0, [(0, 0, 1), (0, 1, 2)], [1])
        assert trim(a).n == 2


class TestExchangeFormat:
    def test_round_trip(self, bits):
        a = parse_regex("0 (0|1)* 1", bits)
        text = to_text(a, "Init")
        assert text.startswith("nfa Init over sigma")
        b = parse_body(bits, text.split("\n", 1)[1])
        assert language_equal(a, b)

    def test_dfa_header(self, bits):
        d = minimize(determinize(parse_regex("1*", bits)))
        assert to_text(d).startswith("dfa ")

    def test_parse_errors(self, bits):
        with pytest.raises(AutomatonError):
            parse_body(bits, "states 2 ; initial 0 ; accepting 1 ; 0 -2-> 1 ;")
        with pytest.raises(AutomatonError):
            parse_body(bits, "states 2 ; initial 5 ; accepting 1 ;")

    def test_dot(self, bits):
        dot = to_dot(parse_regex("0 1", bits), "W")
        assert dot.startswith('digraph "W"') and "doublecircle" in dot


# property tests ----------------------------------------------------------

BITS = Alphabet(["0", "1"])
ABC = Alphabet(["a", "b", "c"])


@st.composite
def dfas(draw, alphabet=BITS):
    seed = draw(st.integers(0, 10 ** 6))
    n = draw(st.integers(1, 5))
    return random_dfa(random.Random(seed), alphabet, n)


@st.composite
def nfas(draw, alphabet=BITS):
    seed = draw(st.integers(0, 10 ** 6))
    n = draw(st.integers(1, 4))
    return random_nfa(random.Random(seed), alphabet, n)


@settings(max_examples=60, deadline=None)
@given(dfas())
def test_minimize_preserves_language(d):
    m = minimize(d)
    assert lang(m, 6) == lang(d, 6)
    assert m.n <= d.n
    assert minimize(m).n == m.n


@settings(max_examples=60, deadline=None)
@given(dfas(), dfas())
def test_minimal_dfas_of_equal_languages_have_equal_size(a, b):
    if language_equal(a, b):
        assert minimize(a).n == minimize(b).n


@settings(max_examples=60, deadline=None)
@given(nfas(), nfas())
def test_product_modes_match_sets(a, b):
    la, lb = lang(a), lang(b)
    assert lang(product(a, b, "intersect")) == la & lb
    assert lang(product(a, b, "union")) == la | lb
    assert lang(product(a, b, "difference")) == la - lb


@settings(max_examples=60, deadline=None)
@given(nfas(ABC))
def test_complement_is_involutive(a):
    c = complement(a)
    every = set(words(ABC, 4))
    assert lang(c, 4) == every - lang(a, 4)
    assert language_equal(complement(c), a)


@settings(max_examples=60, deadline=None)
@given(nfas())
def test_shortest_word_is_shortest(a):
    w = shortest_word(a)
    accepted = sorted(lang(a, 6), key=len)
    if w is None:
        assert not accepted and is_empty(a)
    else:
        assert accepts(a, w)
        if accepted:
            assert len(w) == len(accepted[0])
        else:
            assert len(w) > 6


@settings(max_examples=40, deadline=None)
@given(nfas())
def test_text_round_trip(a):
    text = to_text(a)
    assert language_equal(parse_body(BITS, text.split("\n", 1)[1]), a)
