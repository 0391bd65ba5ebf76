from __future__ import annotations

import pytest

from conftest import same_models, term
from liaderiv.formula import BOT, TOP, Kind, cong, eq, leq, mk_and, mk_exists, mk_not, mk_or, to_text
from liaderiv.rewrite import (
    alpha_normal,
    antiprenex,
    bounds_prune,
    iso_conflict,
    push_negations,
    rewrite,
    simplify_bool,
    var_minimize,
)

PHI = leq({"x": 1, "y": 1}, 3)
PSI = cong({"y": 1}, 1, 4)


def test_identity_and_annihilation():
    assert simplify_bool(mk_or([PHI, BOT])) is PHI
    assert simplify_bool(mk_and([PHI, BOT])) is BOT
    assert simplify_bool(mk_and([PHI, TOP])) is PHI
    assert simplify_bool(mk_or([PHI, TOP])) is TOP
    assert simplify_bool(mk_not(mk_not(PHI))) is PHI
    assert simplify_bool(mk_not(TOP)) is BOT


def test_de_morgan():
    f = mk_not(mk_and([PHI, PSI]))
    assert push_negations(f) is mk_or([leq({"x": -1, "y": -1}, -4), mk_not(PSI)])
    g = mk_not(mk_or([PHI, PSI]))
    assert push_negations(g) is mk_and([leq({"x": -1, "y": -1}, -4), mk_not(PSI)])


def test_negated_atoms():
    assert push_negations(mk_not(leq({"x": 1}, 5))) is leq({"x": -1}, -6)
    # equalities and congruences keep their negation
    assert push_negations(mk_not(eq({"x": 1}, 0))) is mk_not(eq({"x": 1}, 0))
    assert push_negations(mk_not(mk_not(PSI))) is PSI


def test_push_negations_leaves_negation_only_on_atoms_and_binders(small_corpus):
    def ok(f):
        if f.kind is Kind.NOT:
            inner = f.child
            if inner.kind is Kind.ATOM:
                return inner.atom.rel.name in ("EQ", "CONG")
            return inner.kind is Kind.EXISTS and ok(inner.body)
        return all(ok(c) for c in f.children)

    for f in small_corpus:
        assert ok(push_negations(f))


def test_antiprenex_distributes_and_shrinks_scope():
    a, b = leq({"u": 1, "x": -1}, 0), eq({"u": 1, "y": -1}, 0)
    assert antiprenex(mk_exists(["u"], mk_or([a, b]))) is mk_or([mk_exists(["u"], a), mk_exists(["u"], b)])
    out = antiprenex(mk_exists(["u"], mk_and([leq({"x": 1}, 3), b])))
    assert out is mk_and([leq({"x": 1}, 3), mk_exists(["u"], b)])
    assert antiprenex(term("(exists ((u Int)) (<= x 3))", ("x",))) is leq({"x": 1}, 3)


def test_antiprenex_splits_independent_binders():
    f = mk_exists(["u", "v"], mk_and([leq({"u": 1, "x": 1}, 0), leq({"v": 1, "y": 1}, 0)]))
    g = antiprenex(f)
    assert g.kind is Kind.AND
    assert all(c.kind is Kind.EXISTS and len(c.bound) == 1 for c in g.children)


def test_var_minimize_congruence_merge():
    f13 = term("(exists ((a Int) (b Int)) (= (mod (+ (* 3 y) (* 4 a) (* 6 b)) 13) 0))", ("y",))
    out = var_minimize(f13)
    assert out.kind is Kind.EXISTS and len(out.bound) == 1
    (v,) = out.bound
    assert out.body is cong({"y": 3, v: 2}, 0, 13)
    # modulo 5 the merged coefficient 2 is rescaled by normalisation; the meaning is unchanged
    f5 = term("(exists ((a Int) (b Int)) (= (mod (+ (* 3 y) (* 4 a) (* 6 b)) 5) 0))", ("y",))
    out5 = var_minimize(f5)
    assert len(out5.bound) == 1
    assert same_models(f5, out5, lo=-20, hi=20, box=30)


def test_var_minimize_equation_to_congruence():
    f = term("(exists ((a Int)) (= (+ y (* 3 a)) 0))", ("y",))
    assert var_minimize(f) is cong({"y": 1}, 0, 3)


def test_var_minimize_needs_a_bound_coefficient():
    f = term("(exists ((a Int)) (= (+ (* 2 y) (* 0 a)) 0))", ("y",))
    assert rewrite(f) is eq({"y": 1}, 0)


def test_bounds_prune_examples():
    f = term("(and (>= x 0) (<= x 10) (not (= x 0)))", ("x",))
    assert rewrite(f) is mk_and([leq({"x": -1}, -1), leq({"x": 1}, 10)])
    g = term("(and (>= x 3) (or (<= y 2) (and (= x 0) (<= z 1))))")
    assert simplify_bool(bounds_prune(g)) is mk_and([leq({"x": -1}, -3), leq({"y": 1}, 2)])
    assert bounds_prune(term("(and (<= x 2) (>= x 5))", ("x",))) is BOT


def test_bounds_prune_congruence_tightening():
    f = term("(and (<= 0 x) (<= x 1000) (= (mod x 257) 255))", ("x",))
    out = bounds_prune(f)
    assert same_models(f, out, ["x"], -300, 1100)
    assert "x <= 769" in to_text(out)


def test_iso_conflict():
    f = term("(and (exists ((a Int)) (and (> a 3) (<= (+ a z) 10)))"
             " (not (exists ((b Int)) (and (> b 3) (<= (+ b z) 10)))))", ("z",))
    assert iso_conflict(f) is BOT
    assert iso_conflict(mk_and([PHI, mk_not(PHI)])) is BOT
    g = term("(and (exists ((a Int)) (<= a z)) (not (exists ((b Int)) (<= b w))))", ("z", "w"))
    assert iso_conflict(g) is g


def test_alpha_normal_identifies_renamings():
    f = mk_exists(["a", "b"], leq({"a": 1, "b": 2, "x": 1}, 0))
    g = mk_exists(["c", "d"], leq({"d": 1, "c": 2, "x": 1}, 0))
    assert alpha_normal(f) is alpha_normal(g)


RULES = [push_negations, antiprenex, var_minimize, simplify_bool, bounds_prune, iso_conflict, rewrite]


@pytest.mark.parametrize("rule", RULES, ids=lambda r: r.__name__)
def test_rule_preserves_models_on_corpus(rule, corpus):
    for f in corpus:
        assert same_models(f, rule(f), lo=-6, hi=6, box=12), to_text(f)


def test_rewrite_is_a_fixpoint(corpus):
    for f in corpus:
        g = rewrite(f)
        assert rewrite(g) is g


def test_rewrite_does_not_grow_much(corpus):
    # pushing negations through equalities can add nodes; the rest only shrink
    for f in corpus:
        assert rewrite(f).size <= 2 * f.size
