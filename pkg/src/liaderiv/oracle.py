"""Brute-force evaluation of formulae inside a finite box.

Used only as a test oracle.  Quantifiers range over ``[-B, B]``; when no
witness is found the search is conclusive only if the bound analysis shows
every candidate witness lies inside the box, otherwise the result is
``UNKNOWN``.
"""

from __future__ import annotations

import itertools
import math
from typing import Mapping

from .errors import ResourceLimit
from .formula import Formula, Kind, Rel, ceil_div, floor_div


class _Unknown:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "UNKNOWN"

    def __bool__(self):
        raise TypeError("UNKNOWN has no truth value")


UNKNOWN = _Unknown()


def _not(v):
    return UNKNOWN if v is UNKNOWN else not v


class BruteForce:
    def __init__(self, box: int, limit: int = 10**7):
        self.box = box
        self.limit = limit
        self.points = 0

    def _tick(self) -> None:
        self.points += 1
        if self.points > self.limit:
            raise ResourceLimit(f"more than {self.limit} evaluation points")

    def eval(self, f: Formula, env: Mapping[str, int]):
        k = f.kind
        if k is Kind.TOP:
            return True
        if k is Kind.BOT:
            return False
        if k is Kind.ATOM:
            return f.atom.holds(env)
        if k is Kind.NOT:
            return _not(self.eval(f.child, env))
        if k is Kind.AND:
            unknown = False
            for c in f.children:
                v = self.eval(c, env)
                if v is False:
                    return False
                if v is UNKNOWN:
                    unknown = True
            return UNKNOWN if unknown else True
        if k is Kind.OR:
            unknown = False
            for c in f.children:
                v = self.eval(c, env)
                if v is True:
                    return True
                if v is UNKNOWN:
                    unknown = True
            return UNKNOWN if unknown else False
        return self.exists(sorted(f.bound), f.body, env)

    def exists(self, xs, body: Formula, env: Mapping[str, int]):
        xs = [x for x in xs if x in body.fv]
        if not xs:
            return self.eval(body, env)
        if body.kind is Kind.OR:
            unknown = False
            for c in body.children:
                v = self.exists(xs, c, env)
                if v is True:
                    return True
                if v is UNKNOWN:
                    unknown = True
            return UNKNOWN if unknown else False
        spans = implied_intervals(xs, body, env)
        if spans is None:
            return False
        B = self.box
        ranges = []
        exact = True
        for x in xs:
            lo, hi = spans[x]
            if lo < -B or hi > B:
                exact = False
            lo, hi = max(lo, -B), min(hi, B)
            if lo > hi:
                ranges.append(range(0))
            else:
                ranges.append(range(int(lo), int(hi) + 1))
        unknown = False
        local = dict(env)
        for vals in itertools.product(*ranges):
            self._tick()
            local.update(zip(xs, vals))
            v = self.eval(body, local)
            if v is True:
                return True
            if v is UNKNOWN:
                unknown = True
        if unknown or not exact:
            return UNKNOWN
        return False


def implied_intervals(xs, body: Formula, env: Mapping[str, int], rounds: int = 8):
    """Intervals for ``xs`` implied by the linear conjuncts of ``body``.

    Interval propagation: each (in)equality bounds one unknown by the current
    intervals of the others.  Returns None when some interval is empty.
    """
    spans = {x: [-math.inf, math.inf] for x in xs}
    rows = []
    for c in body.children if body.kind is Kind.AND else (body,):
        neg = False
        if c.kind is Kind.NOT and c.child.kind is Kind.ATOM:
            neg, c = True, c.child
        if c.kind is not Kind.ATOM:
            continue
        a = c.atom
        if a.rel is Rel.CONG or (neg and a.rel is Rel.EQ):
            continue
        if any(v not in env and v not in spans for v in a.vars):
            continue
        unknown = [(v, cf) for v, cf in a.coeffs if v in spans]
        if not unknown:
            continue
        known = sum(cf * env[v] for v, cf in a.coeffs if v not in spans)
        if neg:
            # not (t <= c)  is  -t <= -c - 1
            rows.append(([(v, -cf) for v, cf in unknown], Rel.LEQ, -(a.const - known) - 1))
        else:
            rows.append((unknown, a.rel, a.const - known))

    def rest_range(terms, x):
        lo = hi = 0
        for v, cf in terms:
            if v == x:
                continue
            vlo, vhi = spans[v]
            lo += cf * vlo if cf > 0 else cf * vhi
            hi += cf * vhi if cf > 0 else cf * vlo
        return lo, hi

    for _ in range(rounds):
        changed = False
        for terms, rel, rhs in rows:
            for x, ax in terms:
                rlo, rhi = rest_range(terms, x)
                lo, hi = spans[x]
                # ax*x <= rhs - rlo, and for equations also ax*x >= rhs - rhi
                up = rhs - rlo
                if up != math.inf:
                    if ax > 0:
                        hi = min(hi, floor_div(up, ax))
                    else:
                        lo = max(lo, ceil_div(up, ax))
                if rel is Rel.EQ:
                    down = rhs - rhi
                    if down != -math.inf:
                        if ax > 0:
                            lo = max(lo, ceil_div(down, ax))
                        else:
                            hi = min(hi, floor_div(down, ax))
                    if len(terms) == 1 and rhs % ax:
                        return None
                if lo > hi:
                    return None
                if [lo, hi] != spans[x]:
                    spans[x] = [lo, hi]
                    changed = True
        if not changed:
            break
    return spans


def brute_force_eval(f: Formula, box: int, env: Mapping[str, int] | None = None, limit: int = 10**7):
    """Truth of ``f`` under ``env``; free variables missing from ``env`` are
    treated existentially over the box.  Returns True, False or UNKNOWN."""
    env = dict(env or {})
    bf = BruteForce(box, limit)
    free = sorted(f.fv - env.keys())
    if free:
        return bf.exists(free, f, env)
    return bf.eval(f, env)


def models_in_box(f: Formula, variables, lo: int, hi: int, box: int | None = None) -> dict:
    """Map every assignment of ``variables`` over ``[lo, hi]`` to its verdict."""
    box = box if box is not None else max(abs(lo), abs(hi))
    bf = BruteForce(box)
    out = {}
    variables = list(variables)
    for vals in itertools.product(range(lo, hi + 1), repeat=len(variables)):
        env = dict(zip(variables, vals))
        out[vals] = bf.eval(f, env)
    return out
