"""Bottom-up automaton construction: atom automata, products, complement, projection.

This is the reference construction the derivative engine is checked against.
Every intermediate automaton is minimised, and the largest automaton seen
along the way is reported as the peak size.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import automata as fa
from .automata import FULL, Automaton, Cube
from .derivatives import Deadline, fin_atom, post_atom
from .errors import ResourceLimit
from .formula import Formula, Kind


@dataclass
class ClassicalStats:
    peak_states: int = 0
    steps: int = 0


class ClassicalBuilder:
    def __init__(self, order: Sequence[str] = (), max_states: int = 1_000_000, deadline: Deadline | None = None):
        self.rank = {v: i for i, v in enumerate(order)}
        self.max_states = max_states
        self.deadline = deadline or Deadline(None)
        self.stats = ClassicalStats()
        self._memo: dict[Formula, Automaton] = {}

    def _tracks(self, vs) -> tuple[str, ...]:
        return tuple(sorted(vs, key=lambda v: (self.rank.get(v, len(self.rank)), v)))

    def _seen(self, a: Automaton) -> Automaton:
        self.stats.steps += 1
        self.stats.peak_states = max(self.stats.peak_states, a.n_states)
        if a.n_states > self.max_states:
            raise ResourceLimit(f"intermediate automaton with {a.n_states} states")
        self.deadline.check()
        return a

    def atom(self, f: Formula) -> Automaton:
        tracked = self._tracks(f.fv)
        pos = {v: i for i, v in enumerate(tracked)}
        care = (1 << len(tracked)) - 1

        def succ(g: Formula):
            for s in range(1 << len(tracked)):
                sigma = frozenset(v for v in tracked if s >> pos[v] & 1)
                yield Cube(care, s), post_atom(g, sigma), fin_atom(g, sigma)

        return fa.explore(tracked, f, succ, self.max_states)

    def build(self, f: Formula) -> Automaton:
        """Minimal DFA over the tracks of ``fv(f)`` (in builder order)."""
        r = self._memo.get(f)
        if r is not None:
            return r
        k = f.kind
        if k is Kind.TOP:
            r = Automaton((), [[(FULL, 0, True)]], (0,), [], True)
        elif k is Kind.BOT:
            r = Automaton((), [], (), [], True)
        elif k is Kind.ATOM:
            r = self._seen(self.atom(f))
        elif k is Kind.NOT:
            r = self._seen(fa.complement(fa.complete(self.build(f.child))))
        elif k in (Kind.AND, Kind.OR):
            tracked = self._tracks(f.fv)
            parts = [fa.extend(self.build(c), tracked) for c in f.children]
            r = parts[0]
            for p in parts[1:]:
                r = self._seen(fa.intersect(r, p) if k is Kind.AND else fa.union(r, p))
                r = fa.minimize(r)
        else:
            r = self.build(f.body)
            for x in self._tracks(f.bound):
                r = self._seen(fa.project(r, x))
                r = self._seen(fa.determinize(r))
                r = fa.minimize(r)
        r = fa.minimize(r)
        self._memo[f] = r
        return r


def classical_build(f: Formula, tracked: Sequence[str] | None = None, **kw) -> Automaton:
    tracked = tuple(sorted(f.fv)) if tracked is None else tuple(tracked)
    b = ClassicalBuilder(tracked, **kw)
    return fa.extend(b.build(f), tracked)
