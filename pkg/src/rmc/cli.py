"""Command line interface: ``rmc check|synth|learn|oracle|export-dot``.

Exit status: 0 verified or synthesized, 1 refuted or counterexample found,
2 inconclusive (budget or search exhausted), 3 input error.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional

from .automata import AutomatonError, BudgetExceeded, to_dot
from .conditions import WitnessError, check
from .problem import ProblemError, load_problem, parse_witness_automata, read_witness, write_witness
from .relations import AutomaticRelation

OK, REFUTED, INCONCLUSIVE, INPUT_ERROR = 0, 1, 2, 3


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _witness(problem, paths):
    return read_witness("\n".join(_read(p) for p in paths), problem)


def _options(args):
    from .synthesis import SynthesisOptions

    return SynthesisOptions(max_states=args.max_states, solver=args.solver, seed=args.seed,
                            time_limit=args.time_limit)


def _save(problem, witness, args, out):
    path = args.output or f"{problem.name}.witness.aut"
    text = write_witness(witness)
    if path == "-":
        out.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"witness written to {path}", file=out)


def _states(witness) -> str:
    parts = []
    for name, r in witness.bindings().items():
        parts.append(f"{name}={r.nfa.n}")
    return " ".join(parts)


def cmd_check(args, out) -> int:
    problem = load_problem(args.problem)
    if not args.witness:
        raise ProblemError("check needs --witness")
    witness = _witness(problem, args.witness)
    result = check(problem, witness)
    print(f"{problem.name}: {result.describe(problem.base)}", file=out)
    return OK if result.valid else REFUTED


def _active(problem, args):
    """Active learning: L* for the invariant, SAT for whatever remains."""
    from .conditions import eso_problem, make_witness
    from .learning import NoSolution, learn_invariant, stratified_solve
    from .relations import from_language
    from .synthesis import synthesize_eso

    if problem.kind == "iso":
        return "unsupported", None, "active learning needs a reachability-shaped unknown"
    if problem.kind == "game":
        res = stratified_solve(problem, _options(args))
        return res.status, res.witness, res.reason
    try:
        inv, _ = learn_invariant(problem)
    except NoSolution as exc:
        word = problem.base.decode(exc.word) if exc.word is not None else "?"
        return "refuted", None, f"{exc} ({word})"
    if problem.kind == "safety":
        witness = make_witness("safety", {"Inv": inv})
    else:
        eso = eso_problem(problem)
        s = eso.structure.extend({"Inv": from_language(inv)})
        rest = [(cid, f) for cid, f in eso.matrix if cid not in ("live.init-subset", "live.inductive")]
        outcome = synthesize_eso(s, {"Rank": 2}, rest, _options(args))
        if not outcome.found:
            return "exhausted", None, outcome.reason
        witness = make_witness("liveness", {"Inv": inv, "Rank": outcome.relations["Rank"]})
    verdict = check(problem, witness)
    if not verdict.valid:
        raise AssertionError(f"learned witness fails {verdict.condition}")
    return "found", witness, ""


def cmd_synth(args, out) -> int:
    from .learning import stratified_solve
    from .synthesis import synthesize

    problem = load_problem(args.problem)
    if args.strategy == "sat":
        res = synthesize(problem, _options(args))
        status, witness, reason = res.status, res.witness, res.reason
    elif args.strategy == "stratified":
        res = stratified_solve(problem, _options(args))
        status, witness, reason = res.status, res.witness, res.reason
    else:
        status, witness, reason = _active(problem, args)
    return _report(problem, status, witness, reason, args, out)


def cmd_learn(args, out) -> int:
    problem = load_problem(args.problem)
    status, witness, reason = _active(problem, args)
    return _report(problem, status, witness, reason, args, out)


def _report(problem, status, witness, reason, args, out) -> int:
    if status == "found":
        print(f"{problem.name}: witness found ({_states(witness)})", file=out)
        _save(problem, witness, args, out)
        return OK
    if status == "refuted":
        print(f"{problem.name}: no witness exists: {reason}", file=out)
        return REFUTED
    print(f"{problem.name}: {status}: {reason}", file=out)
    return INCONCLUSIVE


def cmd_oracle(args, out) -> int:
    from . import oracle

    problem = load_problem(args.problem)
    max_len = args.max_len if args.max_len is not None else (4 if problem.kind == "iso" else 8)
    f = None
    if problem.kind == "iso" and args.witness:
        f = _witness(problem, args.witness).f
    status = OK
    for n in range(max_len + 1):
        try:
            if problem.kind == "safety":
                v = oracle.slice_reach(problem, n)
                if v.safe:
                    line = "safe"
                else:
                    line = "unsafe trace=" + " > ".join(problem.base.decode(w) or "ε" for w in v.trace)
                    status = REFUTED
            elif problem.kind == "liveness":
                v = oracle.slice_terminates(problem, n)
                if v.terminating:
                    line = "terminating"
                else:
                    line = "cycle=" + " > ".join(problem.base.decode(w) or "ε" for w in v.cycle)
                    status = REFUTED
            elif problem.kind == "game":
                v = oracle.slice_game(problem, n)
                if v.init_won:
                    line = "player2 wins Init slice"
                else:
                    lost = [w for w in v.init_slice if w not in v.player2_wins_from]
                    line = f"player2 loses from {problem.base.decode(lost[0])}"
                    status = REFUTED
            else:
                v = oracle.slice_iso(problem, n, f)
                line = "isomorphic" if v.isomorphic else "not-isomorphic"
                if v.witness_ok is not None:
                    line += " witness=" + ("ok" if v.witness_ok else "bad")
                if not v.isomorphic or v.witness_ok is False:
                    status = REFUTED
        except BudgetExceeded as exc:
            print(f"len={n} verdict=budget ({exc})", file=out)
            return INCONCLUSIVE if status == OK else status
        print(f"len={n} verdict={line}", file=out)
    return status


def cmd_export_dot(args, out) -> int:
    problem = load_problem(args.problem)
    items = []
    if args.witness:
        for path in args.witness:
            items.extend(parse_witness_automata(_read(path), problem.base).items())
    else:
        items.extend(problem.languages().items())
        items.extend(problem.relations().items())
    if args.section:
        items = [(k, v) for k, v in items if k.lower() == args.section.lower()]
        if not items:
            raise ProblemError(f"no automaton named {args.section}")
    for name, a in items:
        nfa = a.nfa if isinstance(a, AutomaticRelation) else a
        out.write(to_dot(nfa, name) + "\n")
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmc", description="Regular model checking with regular proofs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, witness=False, search=False):
        p.add_argument("problem", help="problem file (.rmc)")
        if witness:
            p.add_argument("--witness", action="append", default=[], metavar="FILE",
                           help="witness automata file (repeatable)")
        if search:
            p.add_argument("--solver", default="internal", help="internal or external:<path>")
            p.add_argument("--max-states", type=int, default=12)
            p.add_argument("--seed", type=int, default=None)
            p.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
            p.add_argument("-o", "--output", default=None, help="witness output file ('-' for stdout)")

    p = sub.add_parser("check", help="verify a witness")
    common(p, witness=True)
    p.set_defaults(run=cmd_check)
    p = sub.add_parser("synth", help="synthesize a witness")
    common(p, search=True)
    p.add_argument("--strategy", choices=["sat", "active", "stratified"], default="sat")
    p.set_defaults(run=cmd_synth)
    p = sub.add_parser("learn", help="learn a witness with L*")
    common(p, search=True)
    p.set_defaults(run=cmd_learn)
    p = sub.add_parser("oracle", help="explicit-state verdicts per word length")
    common(p, witness=True)
    p.add_argument("--max-len", type=int, default=None)
    p.set_defaults(run=cmd_oracle)
    p = sub.add_parser("export-dot", help="print automata in DOT format")
    common(p, witness=True)
    p.add_argument("--section", default=None)
    p.set_defaults(run=cmd_export_dot)
    return parser


def main(argv: Optional[list] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        return args.run(args, out)
    except (ProblemError, WitnessError, AutomatonError, OSError) as exc:
        print(f"rmc: error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except BudgetExceeded as exc:
        print(f"rmc: budget exceeded: {exc}", file=sys.stderr)
        return INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
