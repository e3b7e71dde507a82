"""Regular model checking with regular proofs.

Proofs (invariants, ranking relations, isomorphisms) are automata, found by
solving existential second-order constraints over automatic structures.
"""
from .automata import Alphabet, Dfa, Nfa
from .conditions import check
from .problem import load_problem, parse_problem
from .relations import AutomaticRelation

__all__ = ["Alphabet", "AutomaticRelation", "Dfa", "Nfa", "check", "load_problem", "parse_problem"]
__version__ = "0.1.0"
