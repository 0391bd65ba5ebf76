from __future__ import annotations

import random

from conftest import implies_in_box, same_models, term
from liaderiv.corpus import random_corpus
from liaderiv.formula import BOT, TOP, cong, leq, mk_and, mk_not, mk_or
from liaderiv.pruning import prune, prune_disjunction, subsumes

V = ("x", "y", "m")


def test_atom_rule():
    assert subsumes(leq({"x": 1, "y": 2}, 0), leq({"x": 1, "y": 2}, 1))
    assert not subsumes(leq({"x": 1, "y": 2}, 1), leq({"x": 1, "y": 2}, 0))
    assert subsumes(leq({"x": 1}, -8), leq({"x": 1}, -6))
    assert not subsumes(leq({"x": 1}, 5), leq({"y": 1}, 5))


def test_equalities_and_congruences_only_by_identity():
    c = cong({"x": 1}, 1, 3)
    assert subsumes(c, c)
    assert not subsumes(cong({"x": 1}, 1, 6), c)


def test_connective_rules():
    a0, a1, b = leq({"x": 1}, 0), leq({"x": 1}, 1), leq({"y": 1}, 4)
    assert subsumes(mk_and([a0, b]), a1)
    assert subsumes(mk_and([a0, b]), mk_and([a1, b]))
    assert subsumes(a0, mk_or([a1, cong({"y": 1}, 0, 2)]))
    assert subsumes(mk_or([a0, mk_and([a1, b])]), a1)
    assert not subsumes(a1, mk_and([a0, b]))
    assert subsumes(mk_not(a1), mk_not(a0))
    assert not subsumes(mk_not(a0), mk_not(a1))


def test_exists_covariant_with_same_binders():
    f = term("(exists ((u Int)) (and (<= (+ x u) 0) (<= u 0)))", ("x",))
    g = term("(exists ((u Int)) (and (<= (+ x u) 1) (<= u 1)))", ("x",))
    assert subsumes(f, g)
    assert not subsumes(g, f)


def test_prune_disjunction_examples():
    a6, a8 = leq({"x": 1}, -6), leq({"x": 1}, -8)
    assert prune_disjunction([a6, a8]) == [a6]
    assert prune_disjunction([a8, a6]) == [a6]
    assert prune_disjunction([a6]) == [a6]


def test_prune_disjunction_macrostate():
    p1 = term("(exists ((y Int) (m Int)) (and (<= (- (+ (* 3 m) x) y) 0) (<= y (- 1))"
              " (= (mod (- m y) 7) 1) (<= (- m) 0) (<= m 0)))", ("x",))
    p2 = term("(exists ((y Int) (m Int)) (and (<= (- (+ (* 3 m) x) y) 1) (<= y (- 1))"
              " (= (mod (- m y) 7) 0) (<= m 1) (<= (- m) 0)))", ("x",))
    p3 = term("(exists ((y Int) (m Int)) (and (<= (- (+ (* 3 m) x) y) 0) (<= y (- 1))"
              " (= (mod (- m y) 7) 0) (<= (- m) 0) (<= m 0)))", ("x",))
    assert subsumes(p3, p2)
    assert prune_disjunction([p1, p2, p3]) == [p1, p2]


def test_prune_is_bottom_up():
    inner = mk_or([leq({"x": 1}, 0), leq({"x": 1}, 2)])
    f = mk_and([inner, leq({"y": 1}, 0)])
    assert prune(f) is mk_and([leq({"x": 1}, 2), leq({"y": 1}, 0)])
    assert prune(TOP) is TOP and prune(BOT) is BOT


def test_prune_output_is_antichain(small_corpus):
    for f in small_corpus:
        g = mk_or([f, *small_corpus[:5]])
        kept = prune_disjunction(list(g.children))
        for i, a in enumerate(kept):
            for j, b in enumerate(kept):
                assert i == j or not subsumes(a, b)


def test_prune_preserves_models(corpus):
    for f in corpus:
        assert same_models(f, prune(f), lo=-6, hi=6, box=12)


def _pairs(count, seed):
    rng = random.Random(seed)
    pool = random_corpus(seed, 120)
    # perturb constants so the atom rule actually fires
    out = []
    for _ in range(count):
        f = rng.choice(pool)
        if rng.random() < 0.5:
            g = _loosen(f, rng)
        else:
            g = rng.choice(pool)
        out.append((f, g))
    return out


def _loosen(f, rng):
    from liaderiv.formula import Kind, Rel, mk_atom, rebuild
    if f.kind is Kind.ATOM:
        a = f.atom
        if a.rel is Rel.LEQ:
            return mk_atom(a.coeffs, Rel.LEQ, a.const + rng.randint(0, 3))
        return f
    if not f.children:
        return f
    return rebuild(f, [_loosen(c, rng) for c in f.children])


def test_subsumption_implies_inclusion():
    hits = 0
    for f, g in _pairs(400, 7):
        if subsumes(f, g):
            hits += 1
            assert implies_in_box(f, g, lo=-6, hi=6, box=12)
    assert hits > 50


def test_reflexive_and_transitive(small_corpus):
    fs = small_corpus[:25]
    for f in fs:
        assert subsumes(f, f)
    for a in fs:
        for b in fs:
            if not subsumes(a, b):
                continue
            for c in fs:
                if subsumes(b, c):
                    assert subsumes(a, c)
