"""Formula derivatives: one-symbol successors and acceptance of LIA formulae.

``post(f, sigma)`` is the formula describing what remains of ``f`` after the
next (least significant) bit of every free variable has been read, and
``fin(f, sigma)`` says whether reading ``sigma`` as the final (sign) bit
completes a model.  Symbols are frozensets of the variables whose bit is 1.
"""

from __future__ import annotations

import itertools
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .automata import Automaton, Cube, explore
from .errors import ResourceLimit, Timeout
from .formula import (
    BOT,
    TOP,
    Formula,
    Kind,
    LinearAtom,
    Rel,
    mk_and,
    mk_atom,
    mk_exists,
    mk_not,
    mk_or,
)


class InvariantViolation(AssertionError):
    pass


def _check_atom_bounds(src: LinearAtom, out: Formula) -> None:
    if out.kind is not Kind.ATOM:
        return
    a = out.atom
    if a.rel is Rel.CONG:
        if not 0 <= a.const < a.modulus:
            raise InvariantViolation(f"residue {a.const} outside [0, {a.modulus - 1}]")
    elif a.rel is Rel.LEQ and src.rel is Rel.LEQ:
        bound = max(abs(src.const), sum(abs(c) for _, c in src.coeffs))
        if abs(a.const) > bound:
            raise InvariantViolation(f"constant {a.const} escapes bound {bound} of {src}")


def post_atom(f: Formula, sigma: frozenset, check: bool = True) -> Formula:
    """Successor of an atom (or TOP/BOT) under ``sigma``."""
    if f.kind is Kind.BOT or f.kind is Kind.TOP:
        return f
    a = f.atom
    zeta = a.const - a.dot(sigma)
    if a.rel is Rel.LEQ:
        out = mk_atom(a.coeffs, Rel.LEQ, zeta // 2)
    elif a.rel is Rel.EQ:
        out = mk_atom(a.coeffs, Rel.EQ, zeta // 2) if zeta % 2 == 0 else BOT
    else:
        m = a.modulus
        if m % 2 == 0:
            out = mk_atom(a.coeffs, Rel.CONG, (zeta // 2) % (m // 2), m // 2) if zeta % 2 == 0 else BOT
        else:
            half = zeta // 2 if zeta % 2 == 0 else (zeta + m) // 2
            out = mk_atom(a.coeffs, Rel.CONG, half % m, m)
    if check:
        _check_atom_bounds(a, out)
    return out


def fin_atom(f: Formula, sigma: frozenset) -> bool:
    """Does reading ``sigma`` as the sign bit satisfy the atom?"""
    if f.kind is Kind.BOT:
        return False
    if f.kind is Kind.TOP:
        return True
    a = f.atom
    v = a.const + a.dot(sigma)
    if a.rel is Rel.LEQ:
        return v >= 0
    if a.rel is Rel.EQ:
        return v == 0
    return v % a.modulus == 0


def projections(sigma: frozenset, xs) -> list[frozenset]:
    """All symbols agreeing with ``sigma`` outside ``xs`` (each x in xs takes both bits)."""
    xs = sorted(xs)
    base = sigma.difference(xs)
    out = []
    for bits in itertools.product((0, 1), repeat=len(xs)):
        out.append(base.union(x for x, b in zip(xs, bits) if b))
    return out


class Deadline:
    """Cooperative cancellation: ``check()`` raises Timeout once the budget is spent."""

    def __init__(self, seconds: float | None):
        self.end = None if seconds is None else time.monotonic() + seconds

    def check(self) -> None:
        if self.end is not None and time.monotonic() > self.end:
            raise Timeout("time limit exceeded")


@dataclass
class EngineStats:
    states_created: int = 0
    peak_live_states: int = 0
    reach_states: int = 0
    post_calls: int = 0


class DerivativeEngine:
    """Memoising post/fin/reach over hash-consed formulae.

    ``normalize`` is applied to every successor formula (automaton states and
    states of the acceptance closures alike); the identity gives the plain
    construction.
    """

    def __init__(
        self,
        normalize: Callable[[Formula], Formula] | None = None,
        max_states: int = 1_000_000,
        deadline: Deadline | None = None,
        check_invariants: bool = True,
    ):
        self.normalize = normalize or (lambda f: f)
        self.max_states = max_states
        self.deadline = deadline or Deadline(None)
        self.check = check_invariants
        self.stats = EngineStats()
        self._post: dict = {}
        self._fin: dict = {}
        self._reach: dict = {}
        self._norm: dict = {}

    def _normal(self, f: Formula) -> Formula:
        r = self._norm.get(f)
        if r is None:
            r = self._norm[f] = self.normalize(f)
        return r

    # -- derivatives ------------------------------------------------------

    def post(self, f: Formula, sigma: frozenset) -> Formula:
        sigma = sigma & f.fv
        key = (f, sigma)
        r = self._post.get(key)
        if r is not None:
            return r
        self.stats.post_calls += 1
        k = f.kind
        if k in (Kind.ATOM, Kind.TOP, Kind.BOT):
            r = post_atom(f, sigma, self.check)
        elif k is Kind.NOT:
            r = mk_not(self.post(f.child, sigma))
        elif k is Kind.AND:
            r = mk_and([self.post(c, sigma) for c in f.children])
        elif k is Kind.OR:
            r = mk_or([self.post(c, sigma) for c in f.children])
        else:
            body = f.body
            r = mk_exists(f.bound, mk_or([self.post(body, s) for s in projections(sigma, f.bound)]))
        self._post[key] = r
        return r

    def fin(self, f: Formula, sigma: frozenset) -> bool:
        sigma = sigma & f.fv
        key = (f, sigma)
        r = self._fin.get(key)
        if r is not None:
            return r
        k = f.kind
        if k in (Kind.ATOM, Kind.TOP, Kind.BOT):
            r = fin_atom(f, sigma)
        elif k is Kind.NOT:
            r = not self.fin(f.child, sigma)
        elif k is Kind.AND:
            r = all(self.fin(c, sigma) for c in f.children)
        elif k is Kind.OR:
            r = any(self.fin(c, sigma) for c in f.children)
        else:
            projected = projections(sigma, f.bound)
            r = any(self.fin(psi, s) for psi in self.reach([f.body], projected) for s in projected)
        self._fin[key] = r
        return r

    def reach(self, seeds: Sequence[Formula], symbols: Sequence[frozenset]) -> list[Formula]:
        """Least set containing ``seeds`` and closed under ``post`` by ``symbols``."""
        key = (tuple(seeds), frozenset(symbols))
        r = self._reach.get(key)
        if r is not None:
            return r
        seen = dict.fromkeys(seeds)
        queue = deque(seeds)
        while queue:
            g = queue.popleft()
            for s in symbols:
                h = self._normal(self.post(g, s))
                if h not in seen:
                    seen[h] = None
                    queue.append(h)
                    self.stats.reach_states += 1
                    if self.stats.reach_states % 256 == 0:
                        self.deadline.check()
                    if len(seen) > self.max_states:
                        raise ResourceLimit(f"reach closure exceeds {self.max_states} formulae")
        r = self._reach[key] = list(seen)
        return r

    # -- automaton --------------------------------------------------------

    def successors(self, f: Formula, tracked: Sequence[str]):
        pos = {v: i for i, v in enumerate(tracked)}
        vs = sorted(f.fv, key=pos.__getitem__)
        care = sum(1 << pos[v] for v in vs)
        for bits in itertools.product((0, 1), repeat=len(vs)):
            sigma = frozenset(v for v, b in zip(vs, bits) if b)
            value = sum(1 << pos[v] for v in sigma)
            yield Cube(care, value), self._normal(self.post(f, sigma)), self.fin(f, sigma)

    def build(self, f: Formula, tracked: Sequence[str]) -> Automaton:
        """Deterministic, complete automaton whose states are derivative formulae."""
        tracked = tuple(tracked)
        missing = f.fv - set(tracked)
        if missing:
            raise ValueError(f"free variables {sorted(missing)} are not tracked")

        def on_state(count: int) -> None:
            self.stats.peak_live_states = max(self.stats.peak_live_states, count)
            self.deadline.check()

        start = self._normal(f)
        a = explore(tracked, start, lambda g: self.successors(g, tracked), self.max_states, on_state)
        self.stats.states_created = a.n_states
        self.stats.peak_live_states = max(self.stats.peak_live_states, a.n_states)
        return a


def build_automaton(f: Formula, tracked: Sequence[str] | None = None, normalize=None, **kw) -> Automaton:
    tracked = tuple(sorted(f.fv)) if tracked is None else tuple(tracked)
    return DerivativeEngine(normalize, **kw).build(f, tracked)
