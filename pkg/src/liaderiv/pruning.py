"""Syntactic subsumption between formulae and disjunction pruning."""

from __future__ import annotations

from functools import cache

from .formula import Formula, Kind, Rel, mk_or, rebuild


def _atom_subsumes(f1: Formula, f2: Formula) -> bool:
    a1, a2 = f1.atom, f2.atom
    return a1.rel is Rel.LEQ and a2.rel is Rel.LEQ and a1.coeffs == a2.coeffs and a1.const <= a2.const


@cache
def subsumes(f1: Formula, f2: Formula) -> bool:
    """Sound syntactic check for ``f1 => f2``."""
    if f1 is f2:
        return True
    k1, k2 = f1.kind, f2.kind
    # rules that must hold for every part are tried before the existential ones
    if k1 is Kind.OR:
        return all(subsumes(c, f2) for c in f1.children)
    if k2 is Kind.AND:
        return all(subsumes(f1, c) for c in f2.children)
    if k1 is Kind.AND and any(subsumes(c, f2) for c in f1.children):
        return True
    if k2 is Kind.OR and any(subsumes(f1, c) for c in f2.children):
        return True
    if k1 is Kind.ATOM and k2 is Kind.ATOM:
        return _atom_subsumes(f1, f2)
    if k1 is Kind.NOT and k2 is Kind.NOT:
        return subsumes(f2.child, f1.child)
    if k1 is Kind.EXISTS and k2 is Kind.EXISTS and f1.bound == f2.bound:
        return subsumes(f1.body, f2.body)
    return False


def prune_disjunction(disjuncts: list[Formula]) -> list[Formula]:
    """Drop disjuncts subsumed by another kept disjunct.

    Larger formulae are considered first so that the more general of two
    comparable disjuncts tends to be the one kept; the output preserves the
    input order.
    """
    order = sorted(range(len(disjuncts)), key=lambda i: (-disjuncts[i].size, i))
    kept: list[int] = []
    for i in order:
        f = disjuncts[i]
        if any(subsumes(f, disjuncts[j]) for j in kept):
            continue
        kept = [j for j in kept if not subsumes(disjuncts[j], f)]
        kept.append(i)
    return [disjuncts[i] for i in sorted(kept)]


@cache
def prune(f: Formula) -> Formula:
    """Prune every disjunction in ``f``, bottom-up."""
    if not f.children:
        return f
    g = rebuild(f, [prune(c) for c in f.children])
    if g.kind is Kind.OR:
        return mk_or(prune_disjunction(list(g.children)))
    return g
