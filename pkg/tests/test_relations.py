import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_lp_relation, random_nfa, random_padded_relation
from rmc.automata import PAD, Alphabet, accepts, enumerate_words, language_equal
from rmc.regex import parse_regex
from rmc.relations import (
    AutomaticRelation,
    PaddedAlphabet,
    complement,
    compose,
    convolve,
    cylindrify,
    deconvolve,
    empty_relation,
    equal,
    from_language,
    full_relation,
    identity,
    image,
    intersect,
    is_subset,
    member,
    parse_relation,
    post_image,
    pre_image,
    project,
    shortest_tuple,
    to_language,
    union,
)

BITS = Alphabet(["0", "1"])
DELTA = "((0,0)|(1,1))* (1,0)(0,1) ((0,0)|(1,1))*"


def w(text):
    return BITS.encode(text)


def all_words(n, alphabet=BITS):
    for k in range(n + 1):
        yield from itertools.product(alphabet.letters, repeat=k)


@pytest.fixture
def delta():
    return parse_relation(DELTA, BITS)


class TestConvolution:
    def test_padding_rule(self):
        ab = Alphabet(["a", "b"])
        got = convolve([ab.encode("ab"), ab.encode("abba")])
        assert got == ((0, 0), (1, 1), (PAD, 1), (PAD, 0))

    def test_three_tracks(self):
        got = convolve([w("0"), w("01"), ()])
        assert got == ((0, 0, PAD), (PAD, 1, PAD))

    def test_deconvolve_inverts(self):
        words = (w("011"), w("1"), w(""))
        assert deconvolve(convolve(list(words)), 3) == words

    def test_letter_display(self):
        pad = PaddedAlphabet(BITS, 2)
        assert pad.show((1, PAD)) == "(1,_)"
        assert pad.parse_letter("(0,_)") == (0, PAD)


class TestExamples:
    def test_member(self, delta):
        assert member(delta, (w("10"), w("01")))
        assert not member(delta, (w("00"), w("00")))
        assert not member(delta, (w("10"), w("010")))

    def test_length_preserving(self, delta):
        assert delta.length_preserving
        assert not full_relation(BITS, 2, length_preserving=False).length_preserving

    def test_project_to_rewritable_words(self, delta):
        lang = to_language(project(delta, 1))
        expect = parse_regex("(0|1)* 1 0 (0|1)*", BITS)
        assert {x for x in enumerate_words(lang, 6)} == {x for x in enumerate_words(expect, 6)}
        assert language_equal(lang, expect)

    def test_cylindrify_with_init(self, delta):
        init = parse_regex("0 (0|1)* 1", BITS)
        r = intersect(cylindrify(from_language(init), 1), delta)
        for x, y in itertools.product(all_words(5), repeat=2):
            if len(x) == len(y):
                assert member(r, (x, y)) == (accepts(init, x) and member(delta, (x, y)))

    def test_compose_two_rewrites(self, delta):
        assert member(compose(delta, delta), (w("110"), w("011")))
        assert not member(compose(delta, delta), (w("10"), w("01")))

    def test_post_image(self, delta):
        out = post_image(delta, parse_regex("1 0", BITS))
        assert set(enumerate_words(out, 4)) == {w("01")}

    def test_post_image_token_passing(self, token_passing):
        t = token_passing.base
        out = post_image(token_passing.delta, parse_regex("T N N", t))
        assert set(enumerate_words(out, 5)) == {t.encode("N T N")}

    def test_pre_image(self, delta):
        out = pre_image(delta, parse_regex("0 1", BITS))
        assert set(enumerate_words(out, 4)) == {w("10")}

    def test_image(self, delta):
        assert image(delta, w("1010")) == sorted([w("0110"), w("1001")])
        assert image(delta, w("0110"), track=1) == [w("1010")]

    def test_identity_and_empty(self):
        ident = identity(BITS)
        assert member(ident, (w("01"), w("01")))
        assert not member(ident, (w("01"), w("0")))
        assert shortest_tuple(empty_relation(BITS)) is None

    def test_equal_and_subset(self, delta):
        assert is_subset(delta, full_relation(BITS))
        assert not is_subset(full_relation(BITS), delta)
        assert equal(union(delta, delta), delta)

    def test_complement_of_identity(self):
        c = complement(identity(BITS))
        assert member(c, (w("0"), w("00")))
        assert not member(c, (w("01"), w("01")))

    def test_malformed_input_is_cleaned(self):
        pad = PaddedAlphabet(BITS, 2)
        # (_,0)(0,0) is not a convolution: padding must be a suffix
        r = AutomaticRelation(parse_regex("(_,0)(0,0) | (0,0)", pad))
        assert shortest_tuple(r) == (w("0"), w("0"))
        assert not accepts(r.nfa, ((PAD, 0), (0, 0)))


# property tests ----------------------------------------------------------

seeds = st.integers(0, 10 ** 6)


def pairs(n):
    return [(x, y) for x in all_words(n) for y in all_words(n)]


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_accepts_only_convolutions(seed):
    r = random_padded_relation(random.Random(seed), BITS, 3)
    for word in enumerate_words(r.nfa, 4):
        assert convolve(list(deconvolve(word, 2))) == word


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_boolean_operations_pointwise(seed):
    rng = random.Random(seed)
    r = random_padded_relation(rng, BITS, 3)
    s = random_padded_relation(rng, BITS, 2)
    i, u, c = intersect(r, s), union(r, s), complement(r)
    for p in pairs(3):
        a, b = member(r, p), member(s, p)
        assert member(i, p) == (a and b)
        assert member(u, p) == (a or b)
        assert member(c, p) == (not a)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_compose_matches_brute_force(seed):
    rng = random.Random(seed)
    r = random_lp_relation(rng, BITS, 3)
    s = random_lp_relation(rng, BITS, 3)
    rs = compose(r, s)
    for x in all_words(3):
        for z in itertools.product(BITS.letters, repeat=len(x)):
            expect = any(member(r, (x, y)) and member(s, (y, z))
                         for y in itertools.product(BITS.letters, repeat=len(x)))
            assert member(rs, (x, z)) == expect


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_project_matches_brute_force(seed):
    r = random_padded_relation(random.Random(seed), BITS, 2)
    first = project(r, 1)
    # once x has ended only (_,b) letters remain, so a shortest y is at most
    # |x| + (number of states) long
    bound = 3 + r.nfa.n
    longer = list(all_words(bound))
    for x in all_words(3):
        assert member(first, (x,)) == any(member(r, (x, y)) for y in longer)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_lp_project_exact(seed):
    r = random_lp_relation(random.Random(seed), BITS, 3)
    first = project(r, 1)
    for x in all_words(4):
        expect = any(member(r, (x, y)) for y in itertools.product(BITS.letters, repeat=len(x)))
        assert member(first, (x,)) == expect


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_image_matches_membership(seed):
    r = random_lp_relation(random.Random(seed), BITS, 3)
    for x in all_words(3):
        expect = [y for y in itertools.product(BITS.letters, repeat=len(x)) if member(r, (x, y))]
        assert image(r, x) == sorted(expect)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_post_image_matches_brute_force(seed):
    rng = random.Random(seed)
    r = random_lp_relation(rng, BITS, 3)
    lang = random_nfa(rng, BITS, 3)
    post = post_image(r, lang)
    for y in all_words(4):
        expect = any(accepts(lang, x) and member(r, (x, y))
                     for x in itertools.product(BITS.letters, repeat=len(y)))
        assert accepts(post, y) == expect
