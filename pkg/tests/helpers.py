"""Random automata, relations and formulas shared by the property tests."""
import itertools
import random

from rmc.automata import Dfa, Nfa
from rmc.logic import And, Atom, Equal, Exists, Forall, Implies, Not, Or
from rmc.relations import AutomaticRelation, PaddedAlphabet


def random_dfa(rng: random.Random, alphabet, n: int) -> Dfa:
    trans = [(q, a, rng.randrange(n)) for q in range(n) for a in alphabet.letters]
    acc = [q for q in range(n) if rng.random() < 0.5]
    return Dfa(alphabet, n, 0, trans, acc)


def random_nfa(rng: random.Random, alphabet, n: int, density: float = 0.35) -> Nfa:
    trans = [(q, a, r) for q in range(n) for a in alphabet.letters for r in range(n)
             if rng.random() < density]
    acc = [q for q in range(n) if rng.random() < 0.5]
    return Nfa(alphabet, n, 0, trans, acc)


def random_lp_relation(rng: random.Random, base, n: int, density: float = 0.3) -> AutomaticRelation:
    pad = PaddedAlphabet(base, 2)
    letters = list(itertools.product(base.letters, repeat=2))
    trans = [(q, a, r) for q in range(n) for a in letters for r in range(n) if rng.random() < density]
    acc = [q for q in range(n) if rng.random() < 0.5]
    return AutomaticRelation(Nfa(pad, n, 0, trans, acc))


def random_padded_relation(rng: random.Random, base, n: int, density: float = 0.3) -> AutomaticRelation:
    """A binary relation that may relate words of different lengths."""
    pad = PaddedAlphabet(base, 2)
    trans = [(q, a, r) for q in range(n) for a in pad.letters for r in range(n) if rng.random() < density]
    acc = [q for q in range(n) if rng.random() < 0.5]
    return AutomaticRelation(Nfa(pad, n, 0, trans, acc))


def random_partial_dfa(rng: random.Random, base, n: int, p_edge: float = 0.6) -> Nfa:
    """Deterministic, possibly partial, length-preserving binary transducer."""
    pad = PaddedAlphabet(base, 2)
    letters = list(itertools.product(base.letters, repeat=2))
    trans = [(q, a, rng.randrange(n)) for q in range(n) for a in letters if rng.random() < p_edge]
    acc = [q for q in range(n) if rng.random() < 0.5]
    return Nfa(pad, n, 0, trans, acc)


def diagonal_biased_dfa(rng: random.Random, base, n: int, p_edge: float = 0.6) -> Nfa:
    """Like ``random_partial_dfa`` but diagonal letters stay among accepting states.

    State 0 and the targets of its diagonal moves are accepting, so the
    relation contains the identity far more often than a uniform draw does.
    """
    pad = PaddedAlphabet(base, 2)
    good = [0] + [q for q in range(1, n) if rng.random() < 0.5]
    trans = []
    for q in range(n):
        for a in itertools.product(base.letters, repeat=2):
            if a[0] == a[1] and q in good:
                trans.append((q, a, rng.choice(good)))
            elif rng.random() < p_edge:
                trans.append((q, a, rng.randrange(n)))
    acc = set(good) | {q for q in range(n) if rng.random() < 0.5}
    return Nfa(pad, n, 0, trans, sorted(acc))


class FormulaGen:
    """Random formulas whose quantifiers are guarded by length-preserving atoms.

    ``anchor`` maps every bound variable to the variable its guard relates
    it to, so a brute-force evaluator knows the exact length of its range.
    """

    def __init__(self, rng, unary, binary, guards, max_nodes: int = 7):
        self.rng = rng
        self.nodes = max_nodes
        self.unary = unary
        self.binary = binary
        self.guards = guards
        self.anchor: dict = {}
        self.fresh = itertools.count()

    def formula(self, scope, depth):
        rng = self.rng
        self.nodes -= 1
        if self.nodes <= 0:
            return self.literal(scope)
        roll = rng.random()
        if depth > 0 and roll < 0.35:
            x = rng.choice(scope)
            y = f"v{next(self.fresh)}"
            self.anchor[y] = x
            guard = Atom(rng.choice(self.guards), (x, y))
            body = self.formula(scope + [y], depth - 1)
            if rng.random() < 0.5:
                return Exists(y, And((guard, body)))
            return Forall(y, Implies(guard, body))
        if roll < 0.55:
            parts = (self.formula(scope, depth), self.formula(scope, depth))
            return And(parts) if rng.random() < 0.5 else Or(parts)
        if roll < 0.65:
            return Not(self.formula(scope, depth))
        return self.literal(scope)

    def literal(self, scope):
        rng = self.rng
        r = rng.random()
        if r < 0.4:
            return Atom(rng.choice(self.unary), (rng.choice(scope),))
        if r < 0.9 or len(scope) < 2:
            return Atom(rng.choice(self.binary), (rng.choice(scope), rng.choice(scope)))
        a, b = rng.sample(scope, 2)
        return Equal(a, b)


def random_interpretation(rng, base):
    """Unary P, Q; length-preserving R, S (quantifier guards); padded T."""
    from rmc.logic import Structure
    from rmc.relations import from_language

    rels = {
        "P": from_language(random_nfa(rng, base, rng.randint(1, 3))),
        "Q": from_language(random_nfa(rng, base, rng.randint(1, 3))),
        "R": random_lp_relation(rng, base, rng.randint(1, 3), 0.4),
        "S": random_lp_relation(rng, base, rng.randint(1, 3), 0.4),
        "T": random_padded_relation(rng, base, rng.randint(1, 3), 0.3),
    }
    return Structure(base, rels)


def fo_case(seed, base, max_len=4, depth=2):
    """Compile one random formula and compare with brute force on all tuples.

    Returns ``(formula, mismatches)`` where mismatches lists disagreeing tuples.
    """
    from rmc.logic import compile_formula, free_variables
    from rmc.oracle import evaluate, words_up_to
    from rmc.relations import member

    rng = random.Random(seed)
    s = random_interpretation(rng, base)
    gen = FormulaGen(rng, ["P", "Q"], ["R", "S", "T"], ["R", "S"])
    scope = ["x", "y"] if rng.random() < 0.5 else ["x"]
    f = gen.formula(scope, depth)
    fv = [v for v in scope if v in free_variables(f)]
    compiled = compile_formula(f, s, order=fv) if fv else compile_formula(f, s)

    def domain(var, env):
        return list(itertools.product(base.letters, repeat=len(env[gen.anchor[var]])))

    cache: dict = {}
    mismatches = []
    words = list(words_up_to(base.letters, max_len))
    for tup in itertools.product(words, repeat=len(fv)):
        env = dict(zip(fv, tup))
        brute = evaluate(f, s, env, domain, cache)
        got = member(compiled, tup) if fv else compiled
        if brute != got:
            mismatches.append(tup)
    return f, mismatches


def random_cnf(rng, max_vars: int = 16):
    from rmc.sat import Cnf

    n = rng.randint(1, max_vars)
    # around the 4.26 clause/variable threshold, so both outcomes occur
    m = rng.randint(1, int(4.6 * n) + 2)
    cnf = Cnf(n)
    for _ in range(m):
        k = rng.randint(1, min(3, n))
        vs = rng.sample(range(1, n + 1), k)
        cnf.add_clause([v if rng.random() < 0.5 else -v for v in vs])
    return cnf


def model_lines(model) -> str:
    lits = [v if val else -v for v, val in sorted(model.items())]
    return "s SATISFIABLE\nv " + " ".join(map(str, lits)) + " 0\n"


STRUCTURAL_FORMULAS = {
    "reflexive": "forall x. R(x,x)",
    "irreflexive": "forall x. !R(x,x)",
    "transitive": "forall x y z. R(x,y) & R(y,z) -> R(x,z)",
    "functional": "forall x y z. R(x,y) & R(x,z) -> y = z",
}


def structural_verdicts(dfa, base):
    """``{prop: (eager clauses satisfiable, holds verdict)}`` for one transducer."""
    from rmc.logic import Structure, holds, parse_formula
    from rmc.sat import Solver
    from rmc.synthesis import DfaSkeleton, encode_structural

    out = {}
    s = Structure(base, {"R": AutomaticRelation(dfa, trusted=True)})
    for prop, text in STRUCTURAL_FORMULAS.items():
        solver = Solver()
        sk = DfaSkeleton(solver, base, 2, dfa.n)
        encode_structural(sk, prop)
        sat = solver.solve(sk.fix(dfa)).sat
        out[prop] = (sat, holds(parse_formula(text), s).valid)
    return out


# (alphabet, regex) targets for the learner
LSTAR_CORPUS = [
    ("0 1", "0 (0|1)* 1"),
    ("T N", "N* T N*"),
    ("0 1", "(0|1)*"),
    ("0 1", "1* 0*"),
    ("0 1", "(0|1)* 1 0 (0|1)*"),
    ("0 1", "((0|1)(0|1))*"),
    ("0 1", "(0|1)* 1 (0|1) (0|1)"),
    ("0 1", "(0* 1 0* 1)* 0*"),
    ("a b c", "a* b* c*"),
    ("a b c", "(a|b|c)* a b c (a|b|c)*"),
    ("a b", "(a b)* | (b a)*"),
    ("a b", "a (a|b)* a | b (a|b)* b | a | b"),
    ("0 1", "0 1 1 0"),
    ("0 1", "(0 | 1 0* 1)*"),
    ("0 1 2", "(0|1|2)* 2 (0|1)*"),
    ("p1 p2 0 1", "p1 (1 1 1 1)* 0*"),
    ("a", "(a a a)* | (a a)*"),
    ("a b", "(a|b)* a (a|b) (a|b) (a|b)"),
    ("0 1", "(0 0 | 1 1)* (0 1 | 1 0) (0 0 | 1 1)*"),
    ("x y", "(x y* x | y)*"),
]
