"""A small SMT-LIB v2 reader for quantified linear integer arithmetic.

Only the LIA fragment is accepted: Int constants, linear terms, ``mod``/``div``
by numerals, Int-valued ``ite``, the usual Boolean connectives and
quantifiers over Int.  Everything else fails with :class:`UnsupportedFeature`
or :class:`ParseError` (carrying a line/column position).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

from .errors import ParseError, UnsupportedFeature
from .formula import (
    BOT,
    TOP,
    Formula,
    Kind,
    Rel,
    mk_and,
    mk_atom,
    mk_exists,
    mk_forall,
    mk_implies,
    mk_not,
    mk_or,
)

# --------------------------------------------------------------------------
# s-expressions


@dataclass(frozen=True)
class Tok:
    text: str
    kind: str  # "sym", "num", "dec", "str", "kw", "qsym"
    pos: tuple[int, int]


@dataclass
class SList:
    items: list
    pos: tuple[int, int]


def tokenize(text: str) -> Iterator:
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for ch in text[i:i + k]:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        i += k

    while i < n:
        ch = text[i]
        pos = (line, col)
        if ch.isspace():
            advance(1)
        elif ch == ";":
            j = text.find("\n", i)
            advance((n if j < 0 else j) - i)
        elif ch in "()":
            yield Tok(ch, "paren", pos)
            advance(1)
        elif ch == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise ParseError("unterminated quoted symbol", pos)
            yield Tok(text[i + 1:j], "qsym", pos)
            advance(j + 1 - i)
        elif ch == '"':
            j = i + 1
            while True:
                j = text.find('"', j)
                if j < 0:
                    raise ParseError("unterminated string literal", pos)
                if j + 1 < n and text[j + 1] == '"':
                    j += 2
                    continue
                break
            yield Tok(text[i + 1:j].replace('""', '"'), "str", pos)
            advance(j + 1 - i)
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();|"':
                j += 1
            word = text[i:j]
            if word.isdigit():
                kind = "num"
            elif word.replace(".", "", 1).isdigit() and "." in word:
                kind = "dec"
            elif word.startswith(":"):
                kind = "kw"
            else:
                kind = "sym"
            yield Tok(word, kind, pos)
            advance(j - i)


def read_sexprs(text: str) -> list:
    stack: list[SList] = []
    out: list = []
    for tok in tokenize(text):
        if tok.kind == "paren" and tok.text == "(":
            stack.append(SList([], tok.pos))
        elif tok.kind == "paren":
            if not stack:
                raise ParseError("unbalanced ')'", tok.pos)
            done = stack.pop()
            (stack[-1].items if stack else out).append(done)
        else:
            (stack[-1].items if stack else out).append(tok)
    if stack:
        raise ParseError("unbalanced '('", stack[-1].pos)
    return out


def _pos(e):
    return e.pos


def _sym(e, what="symbol") -> str:
    if isinstance(e, Tok) and e.kind in ("sym", "qsym"):
        return e.text
    raise ParseError(f"expected {what}", _pos(e))


# --------------------------------------------------------------------------
# linear terms


@dataclass(frozen=True)
class Lin:
    coeffs: tuple[tuple[str, int], ...]
    const: int

    @staticmethod
    def of(d: dict, c: int) -> "Lin":
        return Lin(tuple(sorted((v, a) for v, a in d.items() if a)), c)

    def scale(self, k: int) -> "Lin":
        return Lin.of({v: a * k for v, a in self.coeffs}, self.const * k)

    def add(self, other: "Lin") -> "Lin":
        d = dict(self.coeffs)
        for v, a in other.coeffs:
            d[v] = d.get(v, 0) + a
        return Lin.of(d, self.const + other.const)

    @property
    def is_const(self) -> bool:
        return not self.coeffs


def _and(parts) -> Formula:
    # guards produced by the translation are mostly TOP; drop them here
    parts = list(parts)
    if BOT in parts:
        return BOT
    return mk_and([p for p in parts if p is not TOP])


def _or(parts) -> Formula:
    parts = list(parts)
    if TOP in parts:
        return TOP
    return mk_or([p for p in parts if p is not BOT])


@dataclass(frozen=True)
class Case:
    """One branch of an Int term: under ``guard`` (with ``fresh`` existentially bound) it equals ``expr``."""

    guard: Formula
    expr: Lin
    fresh: frozenset = frozenset()


def _combine(cases_list, fn):
    out = []
    for combo in itertools.product(*cases_list):
        guard = _and([c.guard for c in combo])
        if guard is BOT:
            continue
        fresh = frozenset().union(*(c.fresh for c in combo))
        out.append(Case(guard, fn([c.expr for c in combo]), fresh))
    return out


ARITH_HEADS = {"+", "-", "*", "div", "mod", "abs"}
COMPARE_HEADS = {"<", "<=", ">", ">=", "="}


@dataclass
class Script:
    logic: str | None = None
    declarations: list[tuple[str, str]] = field(default_factory=list)
    assertions: list[Formula] = field(default_factory=list)
    commands: list[str] = field(default_factory=list)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(n for n, s in self.declarations if s == "Int")

    def formula(self) -> Formula:
        return _and(self.assertions)


class Translator:
    def __init__(self):
        self.script = Script()
        self.consts: dict[str, str] = {}
        self.macros: dict[str, object] = {}
        self.used: set[str] = set()
        self._fresh = itertools.count()

    # -- names ------------------------------------------------------------

    def fresh_name(self, base: str) -> str:
        while True:
            name = f"{base}!{next(self._fresh)}"
            if name not in self.used:
                self.used.add(name)
                return name

    def bind_name(self, name: str) -> str:
        if name in self.used:
            return self.fresh_name(name)
        self.used.add(name)
        return name

    # -- commands ---------------------------------------------------------

    def command(self, e) -> None:
        if not isinstance(e, SList) or not e.items:
            raise ParseError("expected a command", _pos(e))
        head = _sym(e.items[0], "command name")
        args = e.items[1:]
        s = self.script
        if head == "set-logic":
            s.logic = _sym(args[0], "logic name") if args else None
        elif head in ("set-info", "set-option", "get-info", "echo"):
            pass
        elif head in ("declare-fun", "declare-const"):
            self.declare(head, args, e)
        elif head == "define-fun":
            self.define(args, e)
        elif head == "assert":
            if len(args) != 1:
                raise ParseError("assert takes one term", e.pos)
            s.assertions.append(self.boolean(args[0], {}))
        elif head in ("check-sat", "get-model", "exit"):
            s.commands.append(head)
        elif head in ("push", "pop", "get-unsat-core", "check-sat-assuming", "get-value"):
            raise UnsupportedFeature(f"command {head} is not supported")
        else:
            raise ParseError(f"unknown command {head}", e.pos)

    def _sort(self, e) -> str:
        if isinstance(e, Tok):
            if e.text in ("Int", "Bool"):
                return e.text
            if e.text == "Real":
                raise UnsupportedFeature("Real sort")
            raise ParseError(f"unknown sort {e.text}", e.pos)
        if e.items and isinstance(e.items[0], Tok) and e.items[0].text == "Array":
            raise UnsupportedFeature("arrays are not supported")
        raise UnsupportedFeature("parametric sorts are not supported")

    def declare(self, head, args, e) -> None:
        if head == "declare-fun":
            if len(args) != 3 or not isinstance(args[1], SList):
                raise ParseError("malformed declare-fun", e.pos)
            if args[1].items:
                raise UnsupportedFeature("uninterpreted functions are not supported")
            sort_e = args[2]
        else:
            if len(args) != 2:
                raise ParseError("malformed declare-const", e.pos)
            sort_e = args[1]
        name = _sym(args[0])
        sort = self._sort(sort_e)
        if sort != "Int":
            raise UnsupportedFeature("Boolean constants are not supported")
        if name in self.consts:
            raise ParseError(f"{name} declared twice", args[0].pos)
        self.consts[name] = name
        self.used.add(name)
        self.script.declarations.append((name, sort))

    def define(self, args, e) -> None:
        if len(args) != 4 or not isinstance(args[1], SList):
            raise ParseError("malformed define-fun", e.pos)
        if args[1].items:
            raise UnsupportedFeature("define-fun with parameters is not supported")
        self.macros[_sym(args[0])] = (self._sort(args[2]), args[3])

    # -- terms ------------------------------------------------------------

    def _lookup(self, tok: Tok, env: dict):
        name = tok.text
        if name in env:
            return env[name]
        if name in self.macros:
            sort, body = self.macros[name]
            return ("term", body, {})
        if name in self.consts:
            return ("var", self.consts[name])
        raise ParseError(f"unknown symbol {name}", tok.pos)

    def _let(self, e: SList, env: dict):
        if len(e.items) != 3 or not isinstance(e.items[1], SList):
            raise ParseError("malformed let", e.pos)
        new = dict(env)
        for b in e.items[1].items:
            if not isinstance(b, SList) or len(b.items) != 2:
                raise ParseError("malformed let binding", _pos(b))
            new[_sym(b.items[0])] = ("term", b.items[1], env)
        return e.items[2], new

    def integer(self, e, env: dict) -> list[Case]:
        if isinstance(e, Tok):
            if e.kind == "num":
                return [Case(TOP, Lin((), int(e.text)))]
            if e.kind == "dec":
                raise UnsupportedFeature("decimal literals are not supported")
            if e.kind not in ("sym", "qsym"):
                raise ParseError("expected an Int term", e.pos)
            if e.text in ("true", "false"):
                raise ParseError("expected an Int term, got a Boolean", e.pos)
            b = self._lookup(e, env)
            if b[0] == "var":
                return [Case(TOP, Lin(((b[1], 1),), 0))]
            if b[0] == "term":
                return self.integer(b[1], b[2])
            raise ParseError(f"{e.text} is not an Int", e.pos)
        if not e.items:
            raise ParseError("empty term", e.pos)
        head_e = e.items[0]
        if isinstance(head_e, SList):
            if head_e.items and isinstance(head_e.items[0], Tok) and head_e.items[0].text == "_":
                raise UnsupportedFeature("indexed identifiers are not supported")
            raise ParseError("expected a function symbol", head_e.pos)
        head = head_e.text
        args = e.items[1:]
        if head == "let":
            body, new = self._let(e, env)
            return self.integer(body, new)
        if head == "!":
            return self.integer(args[0], env)
        if head == "ite":
            if len(args) != 3:
                raise ParseError("ite takes three arguments", e.pos)
            c = self.boolean(args[0], env)
            return [Case(_and([c, x.guard]), x.expr, x.fresh) for x in self.integer(args[1], env)] + [
                Case(_and([mk_not(c), x.guard]), x.expr, x.fresh) for x in self.integer(args[2], env)
            ]
        parts = [self.integer(a, env) for a in args]
        if head == "+":
            return _combine(parts, lambda xs: _sum(xs))
        if head == "-":
            if len(parts) == 1:
                return [Case(c.guard, c.expr.scale(-1), c.fresh) for c in parts[0]]
            return _combine(parts, lambda xs: _sum([xs[0]] + [x.scale(-1) for x in xs[1:]]))
        if head == "*":
            return self._mul(parts, e)
        if head in ("mod", "div"):
            if len(parts) != 2:
                raise ParseError(f"{head} takes two arguments", e.pos)
            return self._divmod(head, parts[0], parts[1], e)
        if head == "abs":
            if len(parts) != 1:
                raise ParseError("abs takes one argument", e.pos)
            out = []
            for c in parts[0]:
                nonneg = mk_atom([(v, -a) for v, a in c.expr.coeffs], Rel.LEQ, c.expr.const)
                out.append(Case(_and([c.guard, nonneg]), c.expr, c.fresh))
                out.append(Case(_and([c.guard, mk_not(nonneg)]), c.expr.scale(-1), c.fresh))
            return out
        if head in COMPARE_HEADS or head in ("and", "or", "not", "=>", "distinct", "exists", "forall"):
            raise ParseError(f"expected an Int term, got {head}", e.pos)
        if head in ("select", "store"):
            raise UnsupportedFeature("arrays are not supported")
        raise ParseError(f"unknown function {head}", head_e.pos)

    def _mul(self, parts, e) -> list[Case]:
        def mul(xs: list[Lin]) -> Lin:
            acc = Lin((), 1)
            for x in xs:
                if acc.is_const:
                    acc = x.scale(acc.const)
                elif x.is_const:
                    acc = acc.scale(x.const)
                else:
                    raise UnsupportedFeature("nonlinear multiplication")
            return acc

        return _combine(parts, mul)

    def _divmod(self, head, num_cases, den_cases, e) -> list[Case]:
        out = []
        for d_case in den_cases:
            if not d_case.expr.is_const or d_case.guard is not TOP:
                raise UnsupportedFeature(f"{head} by a non-constant")
            d = d_case.expr.const
            if d == 0:
                raise UnsupportedFeature(f"{head} by zero")
            for c in num_cases:
                q, r = self.fresh_name("q"), self.fresh_name("r")
                # t = d*q + r, 0 <= r <= |d| - 1
                t = c.expr
                defn = _and([
                    mk_atom(list(t.coeffs) + [(q, -d), (r, -1)], Rel.EQ, -t.const),
                    mk_atom([(r, -1)], Rel.LEQ, 0),
                    mk_atom([(r, 1)], Rel.LEQ, abs(d) - 1),
                ])
                var = r if head == "mod" else q
                out.append(Case(_and([c.guard, defn]), Lin(((var, 1),), 0), c.fresh | {q, r}))
        return out

    def _compare(self, rel: str, lhs: list[Case], rhs: list[Case]) -> Formula:
        disj = []
        for a, b in itertools.product(lhs, rhs):
            diff = a.expr.add(b.expr.scale(-1))  # diff.coeffs . x + diff.const  REL 0
            co, k = list(diff.coeffs), -diff.const
            if rel == "<=":
                atom = mk_atom(co, Rel.LEQ, k)
            elif rel == "<":
                atom = mk_atom(co, Rel.LEQ, k - 1)
            elif rel == ">=":
                atom = mk_atom([(v, -x) for v, x in co], Rel.LEQ, -k)
            elif rel == ">":
                atom = mk_atom([(v, -x) for v, x in co], Rel.LEQ, -k - 1)
            else:
                atom = mk_atom(co, Rel.EQ, k)
            disj.append(mk_exists(a.fresh | b.fresh, _and([a.guard, b.guard, atom])))
        return _or(disj)

    def _mod_equals(self, mod_e: SList, k_e, env) -> Formula | None:
        """``(= (mod t d) k)`` as a congruence, when d and k are numerals."""
        if len(mod_e.items) != 3:
            return None
        d_cases = self.integer(mod_e.items[2], env)
        k_cases = self.integer(k_e, env)
        if len(d_cases) != 1 or len(k_cases) != 1:
            return None
        d, k = d_cases[0].expr, k_cases[0].expr
        if not (d.is_const and k.is_const) or d.const == 0:
            return None
        m, kv = abs(d.const), k.const
        if not 0 <= kv < m:
            return BOT
        disj = []
        for c in self.integer(mod_e.items[1], env):
            disj.append(mk_exists(c.fresh, _and([c.guard, mk_atom(c.expr.coeffs, Rel.CONG, kv - c.expr.const, m)])))
        return _or(disj)

    def boolean(self, e, env: dict) -> Formula:
        if isinstance(e, Tok):
            if e.text == "true":
                return TOP
            if e.text == "false":
                return BOT
            if e.kind not in ("sym", "qsym"):
                raise ParseError("expected a Boolean term", e.pos)
            b = self._lookup(e, env)
            if b[0] == "term":
                return self.boolean(b[1], b[2])
            raise ParseError(f"{e.text} is not a Boolean", e.pos)
        if not e.items:
            raise ParseError("empty term", e.pos)
        head_e = e.items[0]
        if isinstance(head_e, SList):
            raise ParseError("expected a function symbol", head_e.pos)
        head = head_e.text
        args = e.items[1:]
        if head == "let":
            body, new = self._let(e, env)
            return self.boolean(body, new)
        if head == "!":
            return self.boolean(args[0], env)
        if head == "not":
            if len(args) != 1:
                raise ParseError("not takes one argument", e.pos)
            return mk_not(self.boolean(args[0], env))
        if head == "and":
            return _and([self.boolean(a, env) for a in args])
        if head == "or":
            return _or([self.boolean(a, env) for a in args])
        if head == "=>":
            fs = [self.boolean(a, env) for a in args]
            out = fs[-1]
            for f in reversed(fs[:-1]):
                out = mk_implies(f, out)
            return out
        if head == "xor":
            fs = [self.boolean(a, env) for a in args]
            out = fs[0]
            for f in fs[1:]:
                out = _or([_and([out, mk_not(f)]), _and([mk_not(out), f])])
            return out
        if head == "ite":
            if len(args) != 3:
                raise ParseError("ite takes three arguments", e.pos)
            c, a, b = (self.boolean(x, env) for x in args)
            return _or([_and([c, a]), _and([mk_not(c), b])])
        if head in ("exists", "forall"):
            return self._quantifier(head, args, e, env)
        if head == "distinct":
            terms = [self.integer(a, env) for a in args]
            return _and([mk_not(self._compare("=", x, y)) for x, y in itertools.combinations(terms, 2)])
        if head == "=":
            if len(args) < 2:
                raise ParseError("= takes at least two arguments", e.pos)
            if self._is_bool(args[0], env):
                fs = [self.boolean(a, env) for a in args]
                return _and([
                    _or([_and([x, y]), _and([mk_not(x), mk_not(y)])]) for x, y in zip(fs, fs[1:])
                ])
            if len(args) == 2:
                for m_e, k_e in ((args[0], args[1]), (args[1], args[0])):
                    if isinstance(m_e, SList) and m_e.items and isinstance(m_e.items[0], Tok) and m_e.items[0].text == "mod":
                        f = self._mod_equals(m_e, k_e, env)
                        if f is not None:
                            return f
        if head in COMPARE_HEADS:
            if len(args) < 2:
                raise ParseError(f"{head} takes at least two arguments", e.pos)
            terms = [self.integer(a, env) for a in args]
            return _and([self._compare(head, x, y) for x, y in zip(terms, terms[1:])])
        if head in ARITH_HEADS:
            self.integer(e, env)  # surfaces nonlinear terms before the sort error
            raise ParseError(f"expected a Boolean term, got {head}", e.pos)
        if head in ("select", "store"):
            raise UnsupportedFeature("arrays are not supported")
        raise ParseError(f"unknown function {head}", head_e.pos)

    def _is_bool(self, e, env) -> bool:
        if isinstance(e, Tok):
            if e.text in ("true", "false"):
                return True
            if e.kind in ("sym", "qsym") and e.text in env and env[e.text][0] == "term":
                return self._is_bool(env[e.text][1], env[e.text][2])
            if e.kind in ("sym", "qsym") and e.text in self.macros:
                return self.macros[e.text][0] == "Bool"
            return False
        if not e.items or not isinstance(e.items[0], Tok):
            return False
        head = e.items[0].text
        if head in ("let",):
            body, new = self._let(e, env)
            return self._is_bool(body, new)
        if head == "ite":
            return self._is_bool(e.items[2], env)
        if head == "!":
            return self._is_bool(e.items[1], env)
        return head not in ARITH_HEADS

    def _quantifier(self, head, args, e, env) -> Formula:
        if len(args) != 2 or not isinstance(args[0], SList) or not args[0].items:
            raise ParseError(f"malformed {head}", e.pos)
        new = dict(env)
        names = []
        for b in args[0].items:
            if not isinstance(b, SList) or len(b.items) != 2:
                raise ParseError("malformed sorted variable", _pos(b))
            sort = self._sort(b.items[1])
            if sort != "Int":
                raise UnsupportedFeature("quantified Boolean variables are not supported")
            internal = self.bind_name(_sym(b.items[0]))
            new[b.items[0].text] = ("var", internal)
            names.append(internal)
        body = self.boolean(args[1], new)
        return mk_exists(names, body) if head == "exists" else mk_forall(names, body)


def _sum(xs: list[Lin]) -> Lin:
    acc = Lin((), 0)
    for x in xs:
        acc = acc.add(x)
    return acc


def parse(text: str) -> Script:
    t = Translator()
    for e in read_sexprs(text):
        t.command(e)
    return t.script


def parse_term(text: str, variables=()) -> Formula:
    """Translate a single Boolean term over the given Int variables."""
    t = Translator()
    for v in variables:
        t.consts[v] = v
        t.used.add(v)
    exprs = read_sexprs(text)
    if len(exprs) != 1:
        raise ParseError("expected exactly one term", (1, 1))
    return t.boolean(exprs[0], {})


to_internal = parse_term


# --------------------------------------------------------------------------
# printing


def _num(k: int) -> str:
    return str(k) if k >= 0 else f"(- {-k})"


def _lhs(coeffs) -> str:
    terms = [v if a == 1 else f"(* {_num(a)} {v})" for v, a in coeffs]
    return terms[0] if len(terms) == 1 else f"(+ {' '.join(terms)})"


def to_smtlib(f: Formula) -> str:
    k = f.kind
    if k is Kind.TOP:
        return "true"
    if k is Kind.BOT:
        return "false"
    if k is Kind.ATOM:
        a = f.atom
        if a.rel is Rel.LEQ:
            return f"(<= {_lhs(a.coeffs)} {_num(a.const)})"
        if a.rel is Rel.EQ:
            return f"(= {_lhs(a.coeffs)} {_num(a.const)})"
        return f"(= (mod {_lhs(a.coeffs)} {a.modulus}) {a.const})"
    if k is Kind.NOT:
        return f"(not {to_smtlib(f.child)})"
    if k in (Kind.AND, Kind.OR):
        op = "and" if k is Kind.AND else "or"
        return f"({op} {' '.join(to_smtlib(c) for c in f.children)})"
    binders = " ".join(f"({v} Int)" for v in sorted(f.bound))
    return f"(exists ({binders}) {to_smtlib(f.body)})"


def script_text(f: Formula, variables=None, logic: str = "LIA", get_model: bool = False) -> str:
    variables = sorted(f.fv) if variables is None else list(variables)
    lines = [f"(set-logic {logic})"]
    lines += [f"(declare-fun {v} () Int)" for v in variables]
    lines.append(f"(assert {to_smtlib(f)})")
    lines.append("(check-sat)")
    if get_model:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def model_text(model: dict[str, int], variables) -> str:
    return "\n".join(f"(define-fun {v} () Int {_num(model[v])})" for v in variables)
