"""Quantified linear integer arithmetic via automata whose states are formulae."""

from .config import SolverConfig
from .formula import (
    BOT,
    TOP,
    Formula,
    LinearAtom,
    Rel,
    canonicalize,
    cong,
    decode,
    encode,
    eq,
    free_vars,
    leq,
    mk_and,
    mk_atom,
    mk_exists,
    mk_forall,
    mk_not,
    mk_or,
    substitute,
    to_text,
)
from .smtlib import parse, to_smtlib
from .solver import Result, solve_formula

__all__ = [
    "BOT", "TOP", "Formula", "LinearAtom", "Rel", "SolverConfig", "Result",
    "canonicalize", "cong", "decode", "encode", "eq", "free_vars", "leq",
    "mk_and", "mk_atom", "mk_exists", "mk_forall", "mk_not", "mk_or",
    "parse", "solve_formula", "substitute", "to_smtlib", "to_text",
]
