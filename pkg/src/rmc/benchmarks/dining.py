"""Generator for the dining-cryptographers isomorphism benchmark.

A configuration of n cryptographers is a word of letters ``c p a``:
``c`` in {0,1} says whether cryptographer i paid, ``p`` in {?,0,1} is the
coin shared by cryptographers i and i+1 (mod n) and ``a`` in {?,0,1} is the
announcement of cryptographer i. One step either tosses an undetermined coin
or lets a cryptographer whose two coins are known announce: the XOR of the
coins if it paid, the negated XOR otherwise. Cryptographer 1 reads the
coin of cryptographer n, so its announcement is checked against the last
letter of the word.

System 1 has payer 2 (c-track ``0 1 0 0*``), system 2 has payer 3
(``0 0 1 0*``). Inverting coin 2 and swapping the two payers maps one onto
the other.

Run ``python -m rmc.benchmarks.dining`` to rewrite the shipped files.
"""
from __future__ import annotations

import os

COINS = "?01"
BITS = "01"


def sym(c: str, p: str, a: str) -> str:
    return c + p + a


SYMBOLS = [sym(c, p, a) for c in BITS for p in COINS for a in COINS]


def _alt(parts) -> str:
    return "(" + " | ".join(parts) + ")"


def _pair(x: str, y: str) -> str:
    return f"({x},{y})"


def announcement(c: str, left: str, right: str) -> str:
    xor = int(left) ^ int(right)
    return str(xor if c == "1" else 1 - xor)


def _ident() -> str:
    return _alt(_pair(s, s) for s in SYMBOLS)


def _with_c(c: str) -> str:
    return _alt(s for s in SYMBOLS if s[0] == c)


def transition_regex() -> str:
    ident = _ident()
    toss = []
    for c in BITS:
        for a in COINS:
            for p in BITS:
                toss.append(_pair(sym(c, "?", a), sym(c, p, a)))
    # announcement of cryptographer i >= 2: previous letter holds coin i-1
    window = []
    for left in SYMBOLS:
        if left[1] == "?":
            continue
        for c in BITS:
            for p in BITS:
                a = announcement(c, left[1], p)
                window.append(_pair(left, left) + " " + _pair(sym(c, p, "?"), sym(c, p, a)))
    # announcement of cryptographer 1: the last letter holds coin n
    first = []
    for last in SYMBOLS:
        if last[1] == "?":
            continue
        for c in BITS:
            for p in BITS:
                a = announcement(c, last[1], p)
                first.append(_pair(sym(c, p, "?"), sym(c, p, a)) + f" {ident}* " + _pair(last, last))
    return (f"{ident}* {_alt(toss)} {ident}*"
            f" | {ident}* {_alt(window)} {ident}*"
            f" | {_alt(first)}")


def domain_regex(payer: int) -> str:
    cs = ["0", "0", "0"]
    cs[payer - 1] = "1"
    return " ".join(_with_c(c) for c in cs) + f" {_with_c('0')}*"


def problem_text() -> str:
    delta = transition_regex()
    return "\n".join([
        "# Dining cryptographers with n >= 3 participants (generated by",
        "# rmc.benchmarks.dining; edit the generator, not this file).",
        "# Letters are c p a: paid bit, coin shared with the right neighbour,",
        "# announcement; '?' marks a coin not yet tossed or an announcement not",
        "# yet made. System 1: cryptographer 2 paid. System 2: cryptographer 3 paid.",
        f"alphabet {' '.join(SYMBOLS)} ;",
        "property iso ;",
        f"dom1 : {domain_regex(2)} ;",
        f"dom2 : {domain_regex(3)} ;",
        f"r1 : {delta} ;",
        f"r2 : {delta} ;",
        "",
    ])


def flip(p: str) -> str:
    return {"?": "?", "0": "1", "1": "0"}[p]


def iso_regex() -> str:
    """Swap the payer bit of positions 2 and 3 and invert coin 2."""
    first = _alt(_pair(s, s) for s in SYMBOLS if s[0] == "0")
    second = _alt(_pair(sym("1", p, a), sym("0", flip(p), a)) for p in COINS for a in COINS)
    third = _alt(_pair(sym("0", p, a), sym("1", p, a)) for p in COINS for a in COINS)
    return f"{first} {second} {third} {first}*"


def witness_text() -> str:
    from rmc.automata import Alphabet, to_text
    from rmc.regex import parse_regex
    from rmc.relations import PaddedAlphabet

    base = Alphabet(SYMBOLS)
    nfa = parse_regex(iso_regex(), PaddedAlphabet(base, 2))
    from rmc.logic import shrink

    return ("# Isomorphism for dining-crypto-iso.rmc: invert coin 2, move the payer.\n"
            + to_text(shrink(nfa), "F", "sigma^2"))


HERE = os.path.dirname(os.path.abspath(__file__))


def main() -> None:
    with open(os.path.join(HERE, "dining-crypto-iso.rmc"), "w", encoding="utf-8") as fh:
        fh.write(problem_text())
    with open(os.path.join(HERE, "witnesses", "dining-crypto-iso.F.aut"), "w", encoding="utf-8") as fh:
        fh.write(witness_text())


if __name__ == "__main__":
    main()
