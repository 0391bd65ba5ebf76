"""Equivalence-preserving rewriting of formulae.

Each rule is a separate function so it can be tested in isolation;
:func:`rewrite` runs them in a fixed order until nothing changes.
"""

from __future__ import annotations

import itertools
import math
from functools import cache

from .formula import (
    BOT,
    TOP,
    Formula,
    Kind,
    Rel,
    crt,
    gcd_all,
    mk_and,
    mk_atom,
    mk_exists,
    mk_not,
    mk_or,
    rebuild,
    rename,
    to_text,
)

INF = math.inf


# --------------------------------------------------------------------------
# identity / annihilation


@cache
def simplify_bool(f: Formula) -> Formula:
    k = f.kind
    if k is Kind.NOT:
        c = simplify_bool(f.child)
        if c is TOP:
            return BOT
        if c is BOT:
            return TOP
        if c.kind is Kind.NOT:
            return c.child
        return mk_not(c)
    if k is Kind.AND:
        cs = [simplify_bool(c) for c in f.children]
        if BOT in cs:
            return BOT
        return mk_and([c for c in cs if c is not TOP])
    if k is Kind.OR:
        cs = [simplify_bool(c) for c in f.children]
        if TOP in cs:
            return TOP
        return mk_or([c for c in cs if c is not BOT])
    if k is Kind.EXISTS:
        return mk_exists(f.bound, simplify_bool(f.body))
    return f


# --------------------------------------------------------------------------
# negation


def negate_atom(f: Formula) -> Formula:
    """Positive form of the negation of an atom (congruences keep a NOT)."""
    a = f.atom
    neg = [(v, -c) for v, c in a.coeffs]
    if a.rel is Rel.LEQ:
        return mk_atom(neg, Rel.LEQ, -a.const - 1)
    return mk_not(f)


@cache
def push_negations(f: Formula) -> Formula:
    k = f.kind
    if k is Kind.NOT:
        return _negated(f.child)
    if f.children:
        return rebuild(f, [push_negations(c) for c in f.children])
    return f


@cache
def _negated(f: Formula) -> Formula:
    k = f.kind
    if k is Kind.TOP:
        return BOT
    if k is Kind.BOT:
        return TOP
    if k is Kind.ATOM:
        return negate_atom(f)
    if k is Kind.NOT:
        return push_negations(f.child)
    if k is Kind.AND:
        return mk_or([_negated(c) for c in f.children])
    if k is Kind.OR:
        return mk_and([_negated(c) for c in f.children])
    return mk_not(mk_exists(f.bound, push_negations(f.body)))


# --------------------------------------------------------------------------
# antiprenexing


def _conjuncts(f: Formula):
    return f.children if f.kind is Kind.AND else (f,)


def push_exists(xs: frozenset, body: Formula) -> Formula:
    """``exists xs. body`` with the binder pushed as deep as it will go."""
    xs = xs & body.fv
    if not xs:
        return body
    k = body.kind
    if k is Kind.OR:
        return mk_or([push_exists(xs, c) for c in body.children])
    if k is Kind.EXISTS:
        return push_exists(xs | body.bound, body.body)
    if k is not Kind.AND:
        return mk_exists(xs, body)
    outside = []
    groups: list[tuple[set, list]] = []
    for c in body.children:
        vs = set(c.fv & xs)
        if not vs:
            outside.append(c)
            continue
        merged_vs, merged_cs = vs, [c]
        rest = []
        for gvs, gcs in groups:
            if gvs & merged_vs:
                merged_vs = merged_vs | gvs
                merged_cs = gcs + merged_cs
            else:
                rest.append((gvs, gcs))
        groups = rest + [(merged_vs, merged_cs)]
    parts = list(outside)
    for gvs, gcs in groups:
        if len(gcs) == 1:
            parts.append(push_exists(frozenset(gvs), gcs[0]))
        else:
            parts.append(mk_exists(gvs, mk_and(gcs)))
    return mk_and(parts)


@cache
def antiprenex(f: Formula) -> Formula:
    if f.kind is Kind.EXISTS:
        return push_exists(f.bound, antiprenex(f.body))
    if f.children:
        return rebuild(f, [antiprenex(c) for c in f.children])
    return f


# --------------------------------------------------------------------------
# variable minimisation


def _minimize_binder(xs: frozenset, body: Formula) -> Formula:
    conj = list(_conjuncts(body))
    occurrences = {x: sum(1 for c in conj if x in c.fv) for x in xs}
    out = []
    changed = False
    for c in conj:
        if c.kind is not Kind.ATOM:
            out.append(c)
            continue
        a = c.atom
        local = [v for v in a.vars if v in xs and occurrences[v] == 1]
        if a.rel is Rel.CONG and len(local) >= 2:
            g = gcd_all(a.coeff(v) for v in local)
            keep = local[0]
            coeffs = [(v, cf) for v, cf in a.coeffs if v not in local] + [(keep, g)]
            out.append(mk_atom(coeffs, Rel.CONG, a.const, a.modulus))
            changed = True
        elif a.rel is Rel.EQ and local:
            g = abs(gcd_all(a.coeff(v) for v in local))
            rest = [(v, cf) for v, cf in a.coeffs if v not in local]
            out.append(mk_atom(rest, Rel.CONG, a.const, g))
            changed = True
        else:
            out.append(c)
    if not changed:
        return mk_exists(xs, body)
    return mk_exists(xs, mk_and(out))


@cache
def var_minimize(f: Formula) -> Formula:
    if f.kind is Kind.EXISTS:
        return _minimize_binder(f.bound, var_minimize(f.body))
    if f.children:
        return rebuild(f, [var_minimize(c) for c in f.children])
    return f


# --------------------------------------------------------------------------
# interval reasoning


def _lhs_range(a, env):
    lo = hi = 0
    for v, c in a.coeffs:
        vlo, vhi = env.get(v, (-INF, INF))
        if c > 0:
            lo, hi = lo + c * vlo, hi + c * vhi
        else:
            lo, hi = lo + c * vhi, hi + c * vlo
    return lo, hi


def eval_atom_in(f: Formula, env) -> Formula:
    """TOP/BOT if the atom is decided by the intervals in ``env``, else ``f``."""
    a = f.atom
    if not any(v in env for v in a.vars):
        return f
    lo, hi = _lhs_range(a, env)
    if a.rel is Rel.LEQ:
        if hi <= a.const:
            return TOP
        if lo > a.const:
            return BOT
    elif a.rel is Rel.EQ:
        if lo == hi == a.const:
            return TOP
        if a.const < lo or a.const > hi:
            return BOT
    else:
        m = a.modulus
        if lo == hi:
            return TOP if (lo - a.const) % m == 0 else BOT
        if len(a.coeffs) == 1 and lo != -INF and hi != INF:
            (v, c), = a.coeffs
            xlo, xhi = env[v]
            first = xlo + (a.const - xlo) % m
            if first > xhi:
                return BOT
    return f


def _single(f: Formula):
    """(var, coeff) when ``f`` is an atom over exactly one variable."""
    if f.kind is Kind.ATOM and len(f.atom.coeffs) == 1:
        return f.atom.coeffs[0]
    return None


def _disequality(f: Formula):
    """(var, value) for ``x != v`` in either NOT(x = v) or pushed (x <= v-1 | -x <= -v-1) form."""
    if f.kind is Kind.NOT and f.child.kind is Kind.ATOM and f.child.atom.rel is Rel.EQ:
        s = _single(f.child)
        if s and s[1] == 1:
            return s[0], f.child.atom.const
    if f.kind is Kind.OR and len(f.children) == 2:
        a, b = f.children
        sa, sb = _single(a), _single(b)
        if sa and sb and sa[0] == sb[0] and a.atom.rel is Rel.LEQ and b.atom.rel is Rel.LEQ:
            if sa[1] == -sb[1] and abs(sa[1]) == 1:
                up, down = (a, b) if sa[1] == 1 else (b, a)
                v = up.atom.const + 1
                if -down.atom.const - 1 == v:
                    return sa[0], v
    return None


def _prune(f: Formula, env: dict) -> Formula:
    if not f.children:
        return eval_atom_in(f, env) if f.kind is Kind.ATOM else f
    key = tuple(sorted((v, r) for v, r in env.items() if v in f.fv))
    return _prune_cached(f, key)


@cache
def _prune_cached(f: Formula, key: tuple) -> Formula:
    return _prune_node(f, dict(key))


def _prune_node(f: Formula, env: dict) -> Formula:
    k = f.kind
    if k is Kind.ATOM:
        return eval_atom_in(f, env)
    if k is Kind.NOT:
        return mk_not(_prune(f.child, env))
    if k is Kind.OR:
        return mk_or([_prune(c, env) for c in f.children])
    if k is Kind.EXISTS:
        inner = {v: r for v, r in env.items() if v not in f.bound}
        return mk_exists(f.bound, _prune(f.body, inner))
    if k is Kind.AND:
        return _prune_and(f, env)
    return f


def _prune_and(f: Formula, env: dict) -> Formula:
    local: dict[str, list] = {}
    congs: dict[str, tuple[int, int]] = {}
    holes: dict[str, set] = {}
    others = []
    for c in f.children:
        s = _single(c)
        if s is not None and c.atom.rel in (Rel.LEQ, Rel.EQ):
            v, a = s
            lo, hi = local.get(v) or list(env.get(v, (-INF, INF)))
            q = c.atom.const
            if c.atom.rel is Rel.EQ:
                if q % a:
                    return BOT
                lo, hi = max(lo, q // a), min(hi, q // a)
            elif a > 0:
                hi = min(hi, q // a)
            else:
                lo = max(lo, -(q // -a))
            local[v] = [lo, hi]
            continue
        if s is not None and c.atom.rel is Rel.CONG:
            v, _ = s
            r, m = c.atom.const, c.atom.modulus
            if v in congs:
                merged = crt(congs[v][0], congs[v][1], r, m)
                if merged is None:
                    return BOT
                r, m = merged
            congs[v] = (r, m)
            continue
        d = _disequality(c)
        if d is not None:
            holes.setdefault(d[0], set()).add(d[1])
        others.append(c)

    for v in congs:
        local.setdefault(v, list(env.get(v, (-INF, INF))))
    for v in holes:
        local.setdefault(v, list(env.get(v, (-INF, INF))))
    fixed: dict[str, int] = {}
    for v, span in local.items():
        lo, hi = span
        for _ in range(64):
            before = (lo, hi)
            while lo in holes.get(v, ()):
                lo += 1
            while hi in holes.get(v, ()):
                hi -= 1
            if v in congs:
                r, m = congs[v]
                if lo != -INF:
                    lo = lo + (r - lo) % m
                if hi != INF:
                    hi = hi - (hi - r) % m
            if (lo, hi) == before or lo > hi:
                break
        if lo > hi:
            return BOT
        span[0], span[1] = lo, hi
        if lo == hi:
            fixed[v] = lo

    inner = dict(env)
    inner.update({v: tuple(span) for v, span in local.items()})
    parts = []
    for v, (lo, hi) in local.items():
        olo, ohi = env.get(v, (-INF, INF))
        if lo == hi:
            if olo != ohi:
                parts.append(mk_atom([(v, 1)], Rel.EQ, lo))
            continue
        if lo > olo:
            parts.append(mk_atom([(v, -1)], Rel.LEQ, -lo))
        if hi < ohi:
            parts.append(mk_atom([(v, 1)], Rel.LEQ, hi))
        if v in congs:
            r, m = congs[v]
            parts.append(mk_atom([(v, 1)], Rel.CONG, r, m))
    for c in others:
        g = _prune(c, inner)
        if g is BOT:
            return BOT
        parts.append(g)
    return mk_and(parts)


@cache
def bounds_prune(f: Formula) -> Formula:
    return _prune(f, {})


# --------------------------------------------------------------------------
# isomorphic conflicts

ISO_LIMIT = 32


@cache
def alpha_normal(f: Formula, depth: int = 0) -> Formula:
    """Rename bound variables canonically so alpha-equivalent formulae coincide."""
    k = f.kind
    if k is Kind.EXISTS:
        xs = sorted(f.bound)
        names = [f"@b{depth}.{i}" for i in range(len(xs))]
        perms = itertools.permutations(xs) if len(xs) <= 4 else [xs]
        best = None
        for perm in perms:
            body = alpha_normal(rename(f.body, dict(zip(perm, names))), depth + 1)
            cand = mk_exists(names, body)
            if best is None or to_text(cand) < to_text(best):
                best = cand
        return best
    if f.children:
        return rebuild(f, [alpha_normal(c, depth) for c in f.children])
    return f


@cache
def iso_conflict(f: Formula) -> Formula:
    k = f.kind
    if not f.children:
        return f
    cs = [iso_conflict(c) for c in f.children]
    if k in (Kind.AND, Kind.OR):
        small = {}
        for c in cs:
            if c.size <= ISO_LIMIT and c.kind is not Kind.NOT:
                small.setdefault(alpha_normal(c), c)
        for c in cs:
            if c.kind is Kind.NOT and c.child.size <= ISO_LIMIT and alpha_normal(c.child) in small:
                return BOT if k is Kind.AND else TOP
    return rebuild(f, cs)


# --------------------------------------------------------------------------
# driver

PASSES = (push_negations, antiprenex, var_minimize, simplify_bool, bounds_prune, iso_conflict)
MAX_ROUNDS = 16


@cache
def rewrite(f: Formula) -> Formula:
    """Apply all rules in order until a fixpoint (at most ``MAX_ROUNDS`` rounds)."""
    g = f
    for _ in range(MAX_ROUNDS):
        before = g
        for rule in PASSES:
            g = rule(g)
        if g is before:
            break
    return g


def clear_caches() -> None:
    for fn in (simplify_bool, push_negations, _negated, antiprenex, var_minimize, bounds_prune, _prune_cached,
               alpha_normal, iso_conflict, rewrite):
        fn.cache_clear()
