import pytest

from helpers import LSTAR_CORPUS
from rmc.automata import Alphabet, determinize, language_equal, minimize, product
from rmc.conditions import SafetyProblem, check, eso_problem, liveness_matrix, safety_matrix
from rmc.learning import (
    BoundedTeacher,
    FixpointTeacher,
    HornError,
    LanguageTeacher,
    LearningLog,
    NoSolution,
    ObservationTable,
    QueryBudgetExceeded,
    SliceSolver,
    horn_clauses,
    learn_invariant,
    lstar,
    polarity,
    stratified_solve,
    stratify,
)
from rmc.logic import parse_formula
from rmc.oracle import reachable
from rmc.regex import parse_regex
from rmc.relations import parse_relation


def target(symbols, regex):
    a = Alphabet(symbols.split())
    return a, parse_regex(regex, a)


class TestLstar:
    @pytest.mark.parametrize("symbols,regex,states", [
        ("0 1", "0 (0|1)* 1", 4),
        ("T N", "N* T N*", 3),
    ])
    def test_examples(self, symbols, regex, states):
        a, t = target(symbols, regex)
        d = lstar(LanguageTeacher(t), a)
        assert d.n == states
        assert language_equal(d, t)

    @pytest.mark.parametrize("symbols,regex", LSTAR_CORPUS)
    def test_corpus_minimal(self, symbols, regex):
        a, t = target(symbols, regex)
        d = lstar(LanguageTeacher(t), a)
        assert language_equal(d, t)
        assert d.n == minimize(determinize(t)).n

    def test_log_counts_queries(self):
        a, t = target("0 1", "0 (0|1)* 1")
        log = LearningLog()
        lstar(LanguageTeacher(t), a, log=log)
        assert log.equivalence_queries == len(log.rounds) >= 2
        assert log.membership_queries > 0
        assert log.rounds[-1]["counterexample"] is None

    def test_query_budget(self):
        a, t = target("0 1", "(0|1)* 1 (0|1) (0|1) (0|1)")
        with pytest.raises(QueryBudgetExceeded):
            lstar(LanguageTeacher(t), a, max_queries=10)

    def test_table_closedness(self):
        a, t = target("0 1", "0 (0|1)* 1")
        teacher = LanguageTeacher(t)
        table = ObservationTable(a, teacher.membership)
        # with suffixes {eps} every length-1 row is all-false
        assert table.find_unclosed() is None
        table.E.append((1,))
        assert table.find_unclosed() == (0,)


class TestBoundedTeacher:
    def test_membership_by_slice_search(self, token_passing):
        t = BoundedTeacher(token_passing)
        b = token_passing.base
        assert t.membership(b.encode("N T N"))
        assert not t.membership(b.encode("T T N"))

    def test_learns_an_invariant(self, token_passing):
        inv, teacher = learn_invariant(token_passing)
        assert check(token_passing, make_safety(inv)).valid
        assert language_equal(inv, parse_regex("N* T N*", token_passing.base))

    def test_unsafe_system(self, bits):
        p = SafetyProblem(bits, parse_regex("0 1", bits), parse_regex("1 0", bits),
                          parse_relation("(0,1)(1,0)", bits))
        with pytest.raises(NoSolution):
            learn_invariant(p)


def make_safety(inv):
    from rmc.conditions import SafetyWitness

    return SafetyWitness(inv)


class TestHorn:
    def test_safety_is_horn(self):
        clauses = horn_clauses(safety_matrix(), ["Inv"])
        heads = [c.head.name if c.head else None for c in clauses]
        assert heads == ["Inv", None, "Inv"]

    def test_two_positive_unknowns(self):
        m = [("c", parse_formula("forall x. A(x) -> Inv(x) | Inv(x) & B(x)"))]
        with pytest.raises(HornError):
            horn_clauses(m, ["Inv"])

    def test_existential_is_not_a_clause(self):
        m = [("c", parse_formula("forall x. A(x) -> exists y. R(x,y) & Inv(y)"))]
        with pytest.raises(HornError):
            horn_clauses(m, ["Inv"])

    def test_polarity(self):
        f = parse_formula("forall x y. Inv(x) & Delta(x,y) -> Inv(y)")
        assert polarity(f, "Inv") == {"+", "-"}
        assert polarity(parse_formula("forall x. !(Inv(x) & Bad(x))"), "Inv") == {"-"}
        assert polarity(f, "Rank") == set()

    def test_stratify_liveness(self):
        r1, own, rest = stratify(liveness_matrix(), ["Inv", "Rank"])
        assert r1 == "Inv"
        assert [c for c, _ in own] == ["live.init-subset", "live.inductive"]
        assert len(rest) == 3

    def test_least_solution_is_reachable_set(self, rewrite_safety):
        eso = eso_problem(rewrite_safety)
        own = [(c, f) for c, f in eso.matrix if c != "safety.bad-disjoint"]
        solver = SliceSolver(eso.structure, horn_clauses(own, ["Inv"]), ["Inv"])
        for n in range(5):
            assert solver.solve(n)["Inv"] == reachable(rewrite_safety.init, rewrite_safety.delta, n)

    def test_fixpoint_teacher(self, rewrite_safety):
        eso = eso_problem(rewrite_safety)
        teacher = FixpointTeacher(eso.structure, eso.matrix, "Inv")
        inv = lstar(teacher, rewrite_safety.base)
        assert check(rewrite_safety, make_safety(inv)).valid


class TestStratified:
    def test_liveness(self, rewrite_liveness):
        res = stratified_solve(rewrite_liveness)
        assert res.found and res.states["Rank"] == 2
        assert check(rewrite_liveness, res.witness).valid

    def test_game(self, takeaway):
        res = stratified_solve(takeaway)
        assert res.found
        assert check(takeaway, res.witness).valid
        base = takeaway.base
        p1 = product(res.witness.inv, parse_regex("p1 1* 0*", base), "intersect")
        assert language_equal(p1, parse_regex("p1 (1 1 1 1)* 0*", base))
        assert "Reach" in res.learned

    def test_unsafe(self, bits):
        p = SafetyProblem(bits, parse_regex("0 1", bits), parse_regex("1 0", bits),
                          parse_relation("(0,1)(1,0)", bits))
        assert stratified_solve(p).status == "refuted"


class TestAccounting:
    def test_universal_target(self):
        a, t = target("0 1", "(0|1)*")
        log = LearningLog()
        d = lstar(LanguageTeacher(t), a, log=log)
        assert d.n == 1
        assert log.membership_queries <= len(a.letters) + 2

    @pytest.mark.parametrize("symbols,regex", LSTAR_CORPUS[:8])
    def test_queries_bounded_by_table(self, symbols, regex):
        a, t = target(symbols, regex)
        log = LearningLog()
        lstar(LanguageTeacher(t), a, log=log)
        totals = [r["membership"] for r in log.rounds]
        assert totals == sorted(totals)
        last = log.rounds[-1]
        # queries are cached per word and every word asked is a cell of
        # (S u S.Sigma) x E; counterexamples end up in S through their prefixes
        assert log.membership_queries <= last["S"] * (1 + len(a.letters)) * last["E"]

    def test_cells_are_cached(self):
        calls = []
        a, t = target("0 1", "0 (0|1)* 1")
        teacher = LanguageTeacher(t)
        table = ObservationTable(a, lambda w: calls.append(w) or teacher.membership(w))
        table.row(())
        table.row(())
        assert len(calls) == len(set(calls)) == 1


@pytest.mark.parametrize("fixture", ["rewrite_safety", "token_passing"])
def test_bounded_membership_is_slice_reachability(request, fixture):
    from rmc.oracle import words_up_to

    p = request.getfixturevalue(fixture)
    t = BoundedTeacher(p)
    slices = {n: reachable(p.init, p.delta, n) for n in range(7)}
    for w in words_up_to(p.base.letters, 6):
        assert t.membership(w) == (w in slices[len(w)])
