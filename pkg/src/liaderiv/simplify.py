"""State simplification: rewriting, instantiation and pruning to a fixpoint."""

from __future__ import annotations

from .config import SolverConfig
from .formula import Formula
from .instantiation import InstantiationConfig, instantiate
from .pruning import prune
from .rewrite import rewrite

MAX_ROUNDS = 16


def simplify_state(f: Formula, config: SolverConfig, hits: dict | None = None) -> Formula:
    """Model-preserving simplification of a state; the identity when all passes are off."""
    hits = hits if hits is not None else {}
    inst = InstantiationConfig(config.range_bound, config.linearize_exact)
    g = f
    for _ in range(MAX_ROUNDS):
        before = g
        if config.rewrite:
            h = rewrite(g)
            if h is not g:
                hits["rewrite"] = hits.get("rewrite", 0) + 1
            g = h
        if config.instantiate:
            g = instantiate(g, inst, hits)
        if config.prune:
            h = prune(g)
            if h is not g:
                hits["prune"] = hits.get("prune", 0) + 1
            g = h
        if g is before:
            break
    return g
