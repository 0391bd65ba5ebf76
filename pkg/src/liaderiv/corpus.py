"""Seeded random formulae for differential testing."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .formula import BOT, TOP, Formula, Rel, mk_and, mk_atom, mk_exists, mk_not, mk_or


@dataclass(frozen=True)
class CorpusConfig:
    free: tuple[str, ...] = ("x", "y", "z")
    binders: tuple[str, ...] = ("u", "v")
    max_coeff: int = 4
    max_const: int = 8
    max_modulus: int = 9
    depth: int = 3
    max_atom_vars: int = 2


class FormulaGenerator:
    def __init__(self, seed: int, config: CorpusConfig | None = None):
        self.rng = random.Random(seed)
        self.cfg = config or CorpusConfig()

    def atom(self, scope: list[str]) -> Formula:
        while True:
            f = self._atom(scope)
            if f is not TOP and f is not BOT:
                return f

    def _atom(self, scope: list[str]) -> Formula:
        rng, cfg = self.rng, self.cfg
        k = rng.randint(1, min(cfg.max_atom_vars, len(scope)))
        vs = rng.sample(scope, k)
        coeffs = [(v, rng.choice([c for c in range(-cfg.max_coeff, cfg.max_coeff + 1) if c])) for v in vs]
        rel = rng.choices([Rel.LEQ, Rel.EQ, Rel.CONG], weights=[5, 2, 2])[0]
        const = rng.randint(-cfg.max_const, cfg.max_const)
        if rel is Rel.CONG:
            return mk_atom(coeffs, rel, const, rng.randint(2, cfg.max_modulus))
        return mk_atom(coeffs, rel, const)

    def formula(self) -> Formula:
        self._binders = list(self.cfg.binders)
        return self._gen(self.cfg.depth, list(self.cfg.free))

    def _gen(self, depth: int, scope: list[str]) -> Formula:
        rng = self.rng
        if depth == 0:
            return self.atom(scope)
        kinds = ["atom", "and", "or", "not"]
        weights = [3, 3, 2, 1]
        if self._binders:
            kinds.append("exists")
            weights.append(3)
        kind = rng.choices(kinds, weights=weights)[0]
        if kind == "atom":
            return self.atom(scope)
        if kind == "not":
            return mk_not(self._gen(depth - 1, scope))
        if kind in ("and", "or"):
            parts = [self._gen(depth - 1, scope) for _ in range(rng.randint(2, 3))]
            return mk_and(parts) if kind == "and" else mk_or(parts)
        n = rng.randint(1, len(self._binders))
        bound = [self._binders.pop(0) for _ in range(n)]
        body = self._gen(depth - 1, scope + bound)
        return mk_exists(bound, body)


def random_corpus(seed: int, count: int, config: CorpusConfig | None = None) -> list[Formula]:
    gen = FormulaGenerator(seed, config)
    return [gen.formula() for _ in range(count)]
