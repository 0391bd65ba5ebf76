"""Hash-consed LIA formulae.

Every formula is built through the ``mk_*`` constructors, which normalise
atoms, flatten and sort the children of conjunctions/disjunctions and drop
vacuous binders.  Structurally equal formulae are therefore the *same*
Python object, and identity doubles as state identity in the automata
constructions.

Variables are plain strings.  A symbol of the binary alphabet is represented
as the frozenset of variables whose bit is 1; the domain of the symbol is
implicit (whatever variables the caller tracks).
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import UndefinedSubstitution

INF = math.inf


# --------------------------------------------------------------------------
# integer helpers


def floor_div(a: int, b: int) -> int:
    return a // b


def ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, v)
    return g


def sym_mod(a: int, m: int) -> int:
    """Representative of ``a`` modulo ``m`` in the half-open range (-m/2, m/2]."""
    r = a % m
    if 2 * r > m:
        r -= m
    return r


def crt(r1: int, m1: int, r2: int, m2: int):
    """Merge x ≡ r1 (m1) and x ≡ r2 (m2). Returns (r, lcm) or None if inconsistent."""
    g = math.gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    lcm = m1 // g * m2
    # solve r1 + m1*t ≡ r2 (mod m2)
    t = ((r2 - r1) // g * pow(m1 // g, -1, m2 // g)) % (m2 // g) if m2 // g > 1 else 0
    return (r1 + m1 * t) % lcm, lcm


# --------------------------------------------------------------------------
# binary encoding


def decode(word) -> int:
    """Decode an LSBF two's complement word; the last bit is the sign."""
    bits = [int(b) for b in word]
    if not bits:
        raise ValueError("cannot decode the empty word")
    n = len(bits) - 1
    return sum(b << i for i, b in enumerate(bits[:n])) - (bits[n] << n)


def encode(value: int, length: int | None = None) -> tuple[int, ...]:
    """Shortest LSBF two's complement encoding of ``value``.

    With ``length`` the encoding is sign-extended to exactly that many bits.
    """
    n = 1
    while not (-(1 << (n - 1)) <= value < (1 << (n - 1))):
        n += 1
    if length is not None:
        if length < n:
            raise ValueError(f"{value} needs at least {n} bits")
        n = length
    return tuple((value >> i) & 1 for i in range(n))


# --------------------------------------------------------------------------
# atoms


class Rel(enum.Enum):
    EQ = "="
    LEQ = "<="
    CONG = "mod"


@dataclass(frozen=True)
class LinearAtom:
    """``sum(coeffs) rel const``; for CONG the relation is congruence modulo ``modulus``.

    Instances should come out of :func:`mk_atom`, which enforces the
    canonical form (no zero coefficients, gcd-reduced, sorted variables).
    """

    coeffs: tuple[tuple[str, int], ...]
    rel: Rel
    const: int
    modulus: int | None = None

    @property
    def vars(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def coeff(self, var: str) -> int:
        for v, a in self.coeffs:
            if v == var:
                return a
        return 0

    def dot(self, sigma: frozenset) -> int:
        return sum(a for v, a in self.coeffs if v in sigma)

    def lhs_value(self, env: Mapping[str, int]) -> int:
        return sum(a * env[v] for v, a in self.coeffs)

    def holds(self, env: Mapping[str, int]) -> bool:
        t = self.lhs_value(env)
        if self.rel is Rel.LEQ:
            return t <= self.const
        if self.rel is Rel.EQ:
            return t == self.const
        return (t - self.const) % self.modulus == 0


class Kind(enum.IntEnum):
    BOT = 0
    TOP = 1
    ATOM = 2
    NOT = 3
    AND = 4
    OR = 5
    EXISTS = 6


class Formula:
    """Immutable, interned formula node. Compare with ``is``/``==`` (identity)."""

    __slots__ = ("kind", "atom", "children", "bound", "fv", "size", "dhash", "_text", "__weakref__")

    kind: Kind
    atom: LinearAtom | None
    children: tuple["Formula", ...]
    bound: frozenset

    @property
    def child(self) -> "Formula":
        return self.children[0]

    @property
    def body(self) -> "Formula":
        return self.children[0]

    def is_atom(self, rel: Rel | None = None) -> bool:
        return self.kind is Kind.ATOM and (rel is None or self.atom.rel is rel)

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"<{to_text(self)}>"

    def __reduce__(self):
        raise TypeError("formulae are interned; serialise them with to_smtlib")


_TABLE: dict = {}


def _digest(*parts: bytes) -> bytes:
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        h.update(p)
        h.update(b"\x00")
    return h.digest()


def _make(kind: Kind, atom=None, children=(), bound=frozenset()) -> Formula:
    key = (kind, atom, children, bound)
    node = _TABLE.get(key)
    if node is not None:
        return node
    node = Formula()
    node.kind = kind
    node.atom = atom
    node.children = children
    node.bound = bound
    node._text = None
    if kind is Kind.ATOM:
        node.fv = frozenset(atom.vars)
        node.size = 1
        node.dhash = _digest(b"A", repr((atom.coeffs, atom.rel.value, atom.const, atom.modulus)).encode())
    elif kind in (Kind.BOT, Kind.TOP):
        node.fv = frozenset()
        node.size = 1
        node.dhash = _digest(bytes([kind]))
    else:
        fv = frozenset().union(*(c.fv for c in children))
        if kind is Kind.EXISTS:
            fv = fv - bound
        node.fv = fv
        node.size = 1 + sum(c.size for c in children)
        node.dhash = _digest(bytes([kind]), ",".join(sorted(bound)).encode(), *(c.dhash for c in children))
    # setdefault is atomic under the GIL, so concurrent builders agree on one node
    return _TABLE.setdefault(key, node)


def intern_table_size() -> int:
    return len(_TABLE)


TOP = _make(Kind.TOP)
BOT = _make(Kind.BOT)


def _sort_key(f: Formula):
    return f.dhash


def mk_atom(coeffs, rel: Rel, const: int, modulus: int | None = None) -> Formula:
    """Build a normalised atom; constant atoms collapse to TOP/BOT."""
    items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
    acc: dict[str, int] = {}
    for v, a in items:
        acc[v] = acc.get(v, 0) + a
    const = int(const)
    if rel is Rel.CONG:
        if modulus is None or modulus <= 0:
            raise ValueError("congruence needs a positive modulus")
        m = int(modulus)
        acc = {v: sym_mod(a, m) for v, a in acc.items()}
        acc = {v: a for v, a in acc.items() if a}
        g = gcd_all([*acc.values(), m])
        c = const % m
        if c % g:
            return BOT
        if g > 1:
            m //= g
            c //= g
            acc = {v: sym_mod(a // g, m) for v, a in acc.items()}
            acc = {v: a for v, a in acc.items() if a}
        if m == 1 or not acc:
            return TOP if c % m == 0 else BOT
        if len(acc) == 1:
            (v, a), = acc.items()
            c = c * pow(a, -1, m) % m
            acc = {v: 1}
        else:
            first = min(acc)
            if acc[first] < 0:
                acc = {v: sym_mod(-a, m) for v, a in acc.items()}
                c = -c
        return _make(Kind.ATOM, LinearAtom(tuple(sorted(acc.items())), Rel.CONG, c % m, m))
    acc = {v: a for v, a in acc.items() if a}
    if not acc:
        ok = (0 <= const) if rel is Rel.LEQ else (const == 0)
        return TOP if ok else BOT
    g = gcd_all(acc.values())
    if rel is Rel.EQ:
        if const % g:
            return BOT
        const //= g
        acc = {v: a // g for v, a in acc.items()}
        first = min(acc)
        if acc[first] < 0:
            acc = {v: -a for v, a in acc.items()}
            const = -const
    elif rel is Rel.LEQ:
        const = floor_div(const, g)
        acc = {v: a // g for v, a in acc.items()}
    else:
        raise ValueError(rel)
    return _make(Kind.ATOM, LinearAtom(tuple(sorted(acc.items())), rel, const, None))


def leq(coeffs, c: int) -> Formula:
    return mk_atom(coeffs, Rel.LEQ, c)


def eq(coeffs, c: int) -> Formula:
    return mk_atom(coeffs, Rel.EQ, c)


def cong(coeffs, c: int, m: int) -> Formula:
    return mk_atom(coeffs, Rel.CONG, c, m)


def mk_not(f: Formula) -> Formula:
    return _make(Kind.NOT, None, (f,))


def _flat_sorted(kind: Kind, children: Iterable[Formula]) -> tuple[Formula, ...]:
    flat: dict[Formula, None] = {}
    for c in children:
        if c.kind is kind:
            for cc in c.children:
                flat[cc] = None
        else:
            flat[c] = None
    return tuple(sorted(flat, key=_sort_key))


def mk_and(children: Iterable[Formula]) -> Formula:
    cs = _flat_sorted(Kind.AND, children)
    if not cs:
        return TOP
    if len(cs) == 1:
        return cs[0]
    return _make(Kind.AND, None, cs)


def mk_or(children: Iterable[Formula]) -> Formula:
    cs = _flat_sorted(Kind.OR, children)
    if not cs:
        return BOT
    if len(cs) == 1:
        return cs[0]
    return _make(Kind.OR, None, cs)


def mk_exists(variables: Iterable[str], body: Formula) -> Formula:
    xs = frozenset(variables) & body.fv
    if not xs:
        return body
    if body.kind is Kind.EXISTS:
        xs = xs | body.bound
        body = body.body
    return _make(Kind.EXISTS, None, (body,), xs)


def mk_forall(variables: Iterable[str], body: Formula) -> Formula:
    return mk_not(mk_exists(variables, mk_not(body)))


def mk_implies(a: Formula, b: Formula) -> Formula:
    return mk_or([mk_not(a), b])


def rebuild(f: Formula, children: Sequence[Formula]) -> Formula:
    """Re-create ``f`` with new children through the normalising constructors."""
    k = f.kind
    if k is Kind.AND:
        return mk_and(children)
    if k is Kind.OR:
        return mk_or(children)
    if k is Kind.NOT:
        return mk_not(children[0])
    if k is Kind.EXISTS:
        return mk_exists(f.bound, children[0])
    return f


# --------------------------------------------------------------------------
# structural operations


def free_vars(f: Formula) -> frozenset:
    return f.fv


def bound_vars(f: Formula) -> frozenset:
    out: set[str] = set()
    stack = [f]
    seen = set()
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        if g.kind is Kind.EXISTS:
            out |= g.bound
        stack.extend(g.children)
    return frozenset(out)


def atoms(f: Formula) -> list[Formula]:
    out: dict[Formula, None] = {}
    stack = [f]
    seen = set()
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        if g.kind is Kind.ATOM:
            out[g] = None
        stack.extend(g.children)
    return list(out)


def canonicalize(f: Formula) -> Formula:
    """Rebuild ``f`` bottom-up through the normalising constructors.

    Formulae created with the ``mk_*`` functions are already canonical, so
    this is the identity on them; it matters for atoms built by hand.
    """
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        r = memo.get(g)
        if r is not None:
            return r
        if g.kind is Kind.ATOM:
            a = g.atom
            r = mk_atom(a.coeffs, a.rel, a.const, a.modulus)
        elif g.children:
            r = rebuild(g, [go(c) for c in g.children])
        else:
            r = g
        memo[g] = r
        return r

    return go(f)


def _subst_atom(a: LinearAtom, y: str, k) -> Formula:
    ay = a.coeff(y)
    if ay == 0:
        return _make(Kind.ATOM, a)
    if isinstance(k, float):
        if a.rel is Rel.LEQ and ay * k == -INF:
            return TOP
        raise UndefinedSubstitution(f"cannot substitute {k} for {y} in {to_text(_make(Kind.ATOM, a))}")
    rest = [(v, c) for v, c in a.coeffs if v != y]
    return mk_atom(rest, a.rel, a.const - ay * k, a.modulus)


def substitute(f: Formula, y: str, k) -> Formula:
    """Replace ``y`` by the integer ``k`` or by ``±math.inf``.

    For infinite ``k`` only inequalities whose ``y`` term tends to -inf are
    defined (they become TOP); anything else raises UndefinedSubstitution.
    """
    if isinstance(k, float) and not math.isinf(k):
        raise TypeError("k must be an int or ±inf")
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        if y not in g.fv:
            return g
        r = memo.get(g)
        if r is not None:
            return r
        if g.kind is Kind.ATOM:
            r = _subst_atom(g.atom, y, k)
        else:
            if g.kind is Kind.EXISTS and y in g.bound:
                raise ValueError(f"{y} is bound in the formula")
            r = rebuild(g, [go(c) for c in g.children])
        memo[g] = r
        return r

    return go(f)


def rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename free and bound variables according to ``mapping``."""
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        r = memo.get(g)
        if r is not None:
            return r
        k = g.kind
        if k is Kind.ATOM:
            a = g.atom
            r = mk_atom([(mapping.get(v, v), c) for v, c in a.coeffs], a.rel, a.const, a.modulus)
        elif k is Kind.EXISTS:
            r = mk_exists({mapping.get(v, v) for v in g.bound}, go(g.body))
        elif g.children:
            r = rebuild(g, [go(c) for c in g.children])
        else:
            r = g
        memo[g] = r
        return r

    return go(f)


def evaluate_qf(f: Formula, env: Mapping[str, int]) -> bool:
    """Truth value of a quantifier-free formula under a total assignment."""
    k = f.kind
    if k is Kind.TOP:
        return True
    if k is Kind.BOT:
        return False
    if k is Kind.ATOM:
        return f.atom.holds(env)
    if k is Kind.NOT:
        return not evaluate_qf(f.child, env)
    if k is Kind.AND:
        return all(evaluate_qf(c, env) for c in f.children)
    if k is Kind.OR:
        return any(evaluate_qf(c, env) for c in f.children)
    raise ValueError("formula has quantifiers")


# --------------------------------------------------------------------------
# printing


def _term_text(coeffs) -> str:
    parts = []
    for i, (v, a) in enumerate(coeffs):
        mag = abs(a)
        t = v if mag == 1 else f"{mag}*{v}"
        if i == 0:
            parts.append(t if a > 0 else f"-{t}")
        else:
            parts.append(f"+ {t}" if a > 0 else f"- {t}")
    return " ".join(parts)


def atom_text(a: LinearAtom) -> str:
    lhs = _term_text(a.coeffs)
    if a.rel is Rel.CONG:
        return f"{lhs} == {a.const} (mod {a.modulus})"
    return f"{lhs} {a.rel.value} {a.const}"


def to_text(f: Formula) -> str:
    """Deterministic human-readable rendering (not meant to be parsed back)."""
    if f._text is not None:
        return f._text
    k = f.kind
    if k is Kind.TOP:
        s = "true"
    elif k is Kind.BOT:
        s = "false"
    elif k is Kind.ATOM:
        s = atom_text(f.atom)
    elif k is Kind.NOT:
        s = f"!({to_text(f.child)})"
    elif k is Kind.AND:
        s = " & ".join(_paren(c) for c in f.children)
    elif k is Kind.OR:
        s = " | ".join(_paren(c) for c in f.children)
    else:
        s = f"exists {', '.join(sorted(f.bound))}. ({to_text(f.body)})"
    f._text = s
    return s


def _paren(f: Formula) -> str:
    if f.kind in (Kind.AND, Kind.OR):
        return f"({to_text(f)})"
    return to_text(f)
