"""Quantifier instantiation driven by a small conjunction analysis.

``flow`` folds a per-atom estimate over a conjunction; ``dec``/``inc`` use it
to find the largest (smallest) useful value of a variable and ``range_of``
to find the interval it may take.  Three rewrites are built on top:

* substitute a monotone variable by its extreme value (optionally adjusted
  to a residue class),
* expand a variable whose range is a short interval into a disjunction,
* replace a two-variable congruence by the few equations that cross the
  relevant rectangle of values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import UndefinedSubstitution
from .formula import (
    BOT,
    Formula,
    Kind,
    Rel,
    ceil_div,
    crt,
    floor_div,
    mk_and,
    mk_atom,
    mk_exists,
    mk_or,
    rebuild,
    substitute,
)
from .rewrite import simplify_bool

INF = math.inf

# BoundEstimate: None (no information), an int, or +/-inf.


@dataclass(frozen=True)
class IntRange:
    lo: float | int
    hi: float | int

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    @property
    def finite(self) -> bool:
        return self.lo != -INF and self.hi != INF

    def meet(self, other: "IntRange") -> "IntRange":
        return IntRange(max(self.lo, other.lo), min(self.hi, other.hi))


FULL_RANGE = IntRange(-INF, INF)


def flow(f: Formula, y: str, atom_fn: Callable, meet: Callable):
    """Fold ``atom_fn`` over the conjunction ``f``; anything else yields None (bottom).

    Subformulae that do not mention ``y`` are handed to ``atom_fn`` as well,
    which maps them to the neutral element of ``meet``.
    """
    if f.kind is Kind.AND:
        acc = None
        first = True
        for c in f.children:
            v = flow(c, y, atom_fn, meet)
            if v is None:
                return None
            acc = v if first else meet(acc, v)
            first = False
        return acc
    if f.kind is Kind.ATOM or y not in f.fv:
        return atom_fn(f, y)
    return None


def decat(f: Formula, y: str):
    if y not in f.fv:
        return INF
    if f.kind is not Kind.ATOM or f.atom.rel is not Rel.LEQ:
        return None
    a = f.atom
    ay = a.coeff(y)
    if len(a.coeffs) == 1:
        return floor_div(a.const, ay) if ay > 0 else None
    return INF if ay < 0 else None


def incat(f: Formula, y: str):
    if y not in f.fv:
        return -INF
    if f.kind is not Kind.ATOM or f.atom.rel is not Rel.LEQ:
        return None
    a = f.atom
    ay = a.coeff(y)
    if len(a.coeffs) == 1:
        # a*y <= c with a < 0 means y >= c/a, so the bound is rounded up
        return ceil_div(a.const, ay) if ay < 0 else None
    return -INF if ay > 0 else None


def rangeat(f: Formula, y: str):
    if y not in f.fv:
        return FULL_RANGE
    if f.kind is not Kind.ATOM:
        return None
    a = f.atom
    ay = a.coeff(y)
    if len(a.coeffs) > 1:
        return FULL_RANGE
    if a.rel is Rel.LEQ:
        if ay > 0:
            return IntRange(-INF, floor_div(a.const, ay))
        return IntRange(ceil_div(a.const, ay), INF)
    if a.rel is Rel.EQ:
        if a.const % ay:
            return IntRange(1, 0)
        return IntRange(a.const // ay, a.const // ay)
    return FULL_RANGE


def _min(a, b):
    return min(a, b)


def _max(a, b):
    return max(a, b)


def dec(f: Formula, y: str):
    return flow(f, y, decat, _min)


def inc(f: Formula, y: str):
    return flow(f, y, incat, _max)


def range_of(f: Formula, y: str) -> IntRange | None:
    return flow(f, y, rangeat, IntRange.meet)


# --------------------------------------------------------------------------
# rewrites on a single binder


def _conjuncts(f: Formula):
    return list(f.children) if f.kind is Kind.AND else [f]


def _peel_congruences(body: Formula, y: str):
    """Split off single-variable congruences on ``y``; returns (rest, (r, m) | None, ok)."""
    rest, residue = [], None
    for c in _conjuncts(body):
        if c.kind is Kind.ATOM and c.atom.rel is Rel.CONG and c.atom.coeffs == ((y, 1),):
            r, m = c.atom.const, c.atom.modulus
            if residue is not None:
                merged = crt(residue[0], residue[1], r, m)
                if merged is None:
                    return rest, None, False
                r, m = merged
            residue = (r, m)
        else:
            rest.append(c)
    return mk_and(rest), residue, True


def monotone_value(body: Formula, y: str):
    """The value to substitute for ``y`` in ``exists y. body``, or None."""
    phi, residue, ok = _peel_congruences(body, y)
    if not ok:
        return BOT, None
    for estimate, below in ((dec(phi, y), True), (inc(phi, y), False)):
        if estimate is None:
            continue
        value = estimate
        if residue is not None and not isinstance(estimate, float):
            r, m = residue
            value = estimate - (estimate - r) % m if below else estimate + (r - estimate) % m
        return phi, value
    return None, None


def instantiate_monotone(f: Formula, y: str | None = None) -> Formula | None:
    """Eliminate one bound variable of ``f`` by a monotone substitution; None if inapplicable."""
    if f.kind is not Kind.EXISTS:
        return None
    for var in ([y] if y else sorted(f.bound)):
        phi, value = monotone_value(f.body, var)
        if phi is BOT:
            return BOT
        if phi is None:
            continue
        try:
            inst = substitute(phi, var, value)
        except UndefinedSubstitution:
            continue
        return simplify_bool(mk_exists(f.bound - {var}, inst))
    return None


def instantiate_range(f: Formula, bound: int = 0, y: str | None = None) -> Formula | None:
    """Expand a bound variable whose range has at most ``bound + 1`` values."""
    if f.kind is not Kind.EXISTS:
        return None
    for var in ([y] if y else sorted(f.bound)):
        r = range_of(f.body, var)
        if r is None:
            continue
        if r.empty:
            return BOT
        if r.finite and r.hi - r.lo <= bound:
            cases = [substitute(f.body, var, c) for c in range(int(r.lo), int(r.hi) + 1)]
            return simplify_bool(mk_exists(f.bound - {var}, mk_or(cases)))
    return None


@dataclass(frozen=True)
class LinearizationParams:
    alpha: int
    l1: int
    y1: Fraction
    n: int


def linearization_params(a_y: int, a_m: int, modulus: int, k: int, c: int, r: int, s: int) -> LinearizationParams:
    """Window parameters for a_y*y + a_m*m == k (mod M), y <= c best from below, m in [r, s].

    ``a_y`` must be positive.  The number of lines counts every multiple of
    alpha between the smallest and largest value a_y*y + a_m*m takes on the
    rectangle [c - alpha + 1, c] x [r, s]; the magnitude of ``a_m`` is what
    matters there, whichever sign it has.
    """
    assert a_y > 0 and a_m != 0
    alpha = modulus // math.gcd(a_y, modulus)
    m_lo = r if a_m > 0 else s
    l1 = ceil_div(a_y * (c - alpha + 1) + a_m * m_lo - k, alpha)
    y1 = Fraction(k + l1 * alpha - a_m * m_lo, a_y)
    n_num = a_y * (c - y1) + abs(a_m) * (s - r) + 1
    n = math.ceil(n_num / alpha)
    return LinearizationParams(alpha, l1, y1, max(n, 0))


def linearize_mod(f: Formula, exact: bool = False) -> Formula | None:
    """Replace a two-variable congruence under ``exists y, m`` by linear equations."""
    if f.kind is not Kind.EXISTS or len(f.bound) < 2:
        return None
    conj = _conjuncts(f.body)
    for idx, atom in enumerate(conj):
        if atom.kind is not Kind.ATOM or atom.atom.rel is not Rel.CONG or len(atom.atom.coeffs) != 2:
            continue
        if not set(atom.atom.vars) <= f.bound:
            continue
        psi = mk_and(conj[:idx] + conj[idx + 1:])
        a = atom.atom
        for y, m in (a.vars, a.vars[::-1]):
            lines = _lines_for(psi, a, y, m, exact)
            if lines is not None:
                return mk_exists(f.bound, mk_and([psi, mk_or(lines)]))
    return None


def _lines_for(psi: Formula, a, y: str, m: str, exact: bool):
    rng = range_of(psi, m)
    if rng is None or not rng.finite or rng.empty:
        return None
    a_y, a_m, M, k = a.coeff(y), a.coeff(m), a.modulus, a.const
    if math.gcd(a_y, M) != 1:
        return None
    c_below, c_above = dec(psi, y), inc(psi, y)
    if isinstance(c_below, int):
        sign, c = 1, c_below
    elif isinstance(c_above, int):
        # mirror y -> -y to reuse the best-from-below case
        sign, c = -1, -c_above
    else:
        return None
    # work with y' = sign*y and a positive coefficient on y'
    ay, am, kk = a_y * sign, a_m, k
    if ay < 0:
        ay, am, kk = -ay, -am, -kk
    p = linearization_params(ay, am, M, kk, c, int(rng.lo), int(rng.hi))
    if p.n > 1 and not exact:
        return None
    # ay*y' + am*m = kk + j*alpha, with ay*y' = +-a_y*y; flip back if the atom was negated
    flip = 1 if ay == a_y * sign else -1
    coeffs = [(y, a_y * flip), (m, a_m * flip)]
    return [mk_atom(coeffs, Rel.EQ, kk + (p.l1 + i) * p.alpha) for i in range(p.n)]


# --------------------------------------------------------------------------
# bottom-up driver


@dataclass
class InstantiationConfig:
    range_bound: int = 0
    linearize_exact: bool = False


def instantiate(f: Formula, config: InstantiationConfig | None = None, hits: dict | None = None) -> Formula:
    """Apply the first applicable instantiation at every binder, innermost first."""
    config = config or InstantiationConfig()
    hits = hits if hits is not None else {}
    memo: dict[Formula, Formula] = {}

    def bump(name: str) -> None:
        hits[name] = hits.get(name, 0) + 1

    def go(g: Formula) -> Formula:
        r = memo.get(g)
        if r is not None:
            return r
        if not g.children:
            return g
        h = rebuild(g, [go(c) for c in g.children])
        if h.kind is Kind.EXISTS:
            out = instantiate_monotone(h)
            if out is not None:
                bump("monotone")
                h = out
            else:
                out = instantiate_range(h, config.range_bound)
                if out is not None:
                    bump("range")
                    h = out
                else:
                    out = linearize_mod(h, config.linearize_exact)
                    if out is not None:
                        bump("linearize")
                        h = out
        memo[g] = h
        return h

    return go(f)
