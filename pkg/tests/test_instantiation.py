from __future__ import annotations

import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import same_models, term
from liaderiv.formula import BOT, cong, eq, evaluate_qf, leq, mk_and, mk_or, substitute, to_text
from liaderiv.instantiation import (
    FULL_RANGE,
    InstantiationConfig,
    IntRange,
    dec,
    decat,
    flow,
    inc,
    incat,
    instantiate,
    instantiate_monotone,
    instantiate_range,
    linearization_params,
    linearize_mod,
    range_of,
    rangeat,
)

X_MINUS_Y_1 = leq({"x": 1, "y": -1}, 1)
Y_NEG = leq({"y": 1}, -1)


def T(text, free=("x", "z")):
    return term(text, free)


# analyses


def test_flow_examples():
    assert flow(mk_and([X_MINUS_Y_1, Y_NEG]), "y", decat, min) == -1
    assert flow(mk_or([leq({"y": 1}, 1), leq({"y": 1}, 2)]), "y", decat, min) is None
    assert flow(leq({"y": 1}, 2), "y", rangeat, IntRange.meet) == IntRange(-math.inf, 2)


def test_decat_incat():
    assert decat(X_MINUS_Y_1, "y") == math.inf
    assert decat(Y_NEG, "y") == -1
    assert decat(leq({"y": 5}, 42), "y") == 8
    assert decat(leq({"x": 1, "y": 1}, 0), "y") is None
    assert decat(eq({"y": 1}, 0), "y") is None
    assert decat(leq({"x": 1}, 0), "y") == math.inf
    assert incat(leq({"y": -2}, -3), "y") == 2
    assert incat(leq({"y": -3}, 7), "y") == -2
    assert incat(leq({"x": 1, "y": 1}, 0), "y") == -math.inf


def test_dec_inc():
    assert dec(mk_and([X_MINUS_Y_1, Y_NEG]), "y") == -1
    assert dec(mk_and([leq({"x": 1, "y": -1}, 33), leq({"y": 1}, 12)]), "y") == 12
    assert inc(mk_and([X_MINUS_Y_1, Y_NEG]), "y") is None


def test_rangeat_examples():
    assert rangeat(leq({"y": 1}, 2), "y") == IntRange(-math.inf, 2)
    assert rangeat(leq({"y": -2}, -3), "y") == IntRange(2, math.inf)
    assert rangeat(eq({"x": 1, "y": 3}, 42), "y") == FULL_RANGE
    assert rangeat(eq({"y": 3}, 6), "y") == IntRange(2, 2)
    assert range_of(mk_or([Y_NEG, X_MINUS_Y_1]), "y") is None


# rewrites


def test_monotone_examples():
    f = T("(exists ((y Int)) (and (<= (- x y) 1) (<= y (- 1)) (= (mod y 5) 0)))")
    assert instantiate_monotone(f) is leq({"x": 1}, -4)
    g = T("(exists ((y Int)) (and (<= (- x y) 33) (<= y 12) (= (mod y 7) 2)))")
    assert instantiate_monotone(g) is leq({"x": 1}, 42)
    h = T("(exists ((y Int)) (and (<= x 4) (>= (* 3 y) (+ x z))))")
    assert instantiate_monotone(h) is leq({"x": 1}, 4)


def test_monotone_conflicting_congruences():
    f = T("(exists ((y Int)) (and (<= y x) (= (mod y 4) 1) (= (mod y 6) 2)))")
    assert instantiate_monotone(f) is BOT


def test_monotone_not_applicable():
    f = T("(exists ((y Int)) (and (<= (+ x y) 3) (<= (- x y) 3)))")
    assert instantiate_monotone(f) is None


def test_range_examples():
    f = T("(exists ((y Int)) (and (<= y 2) (>= (* 2 y) 3) (= (+ x (* 3 y)) 42)))")
    assert instantiate_range(f, 0) is eq({"x": 1}, 36)
    assert instantiate_range(T("(exists ((y Int)) (and (<= y 1) (<= (- y) (- 3)) (<= (+ x y) 4)))"), 0) is BOT
    assert instantiate_range(T("(exists ((y Int)) (and (<= y 5) (<= (+ x y) 4)))"), 0) is None


def test_range_bound_controls_expansion():
    f = T("(exists ((y Int)) (and (<= 0 y) (<= y 2) (= (mod (+ x y) 5) 0)))")
    assert instantiate_range(f, 1) is None
    g = instantiate_range(f, 2)
    assert g is not None and "y" not in g.fv
    assert same_models(f, g, ["x"], -20, 20)


def test_linearization_parameters():
    p = linearization_params(1, 1, 37, 12, 17, 1, 50)
    assert (p.alpha, p.l1, p.y1, p.n) == (37, 0, 11, 2)
    p = linearization_params(1, 1, 37, 12, 17, 1, 20)
    assert (p.alpha, p.l1, p.n) == (37, 0, 1)


def test_linearize_two_line_example():
    f = T("(exists ((y Int) (m Int)) (and (<= y 17) (<= 1 m) (<= m 50) (= (mod (+ y m) 37) 12)))", ())
    assert linearize_mod(f) is None
    g = linearize_mod(f, exact=True)
    lines = mk_or([eq({"y": 1, "m": 1}, 12), eq({"y": 1, "m": 1}, 49)])
    assert lines in g.body.children
    h = linearize_mod(T("(exists ((y Int) (m Int)) (and (<= y 17) (<= 1 m) (<= m 20)"
                        " (= (mod (+ y m) 37) 12)))", ()))
    assert eq({"y": 1, "m": 1}, 12) in h.body.children


def test_linearize_single_line_brute_force():
    # rectangle [-19, 17] x [1, 20]: the only crossing line is y + m = 12
    for y in range(-19, 18):
        for m in range(1, 21):
            assert ((y + m - 12) % 37 == 0) == (y + m == 12)


def test_linearize_requires_two_bound_vars():
    f = T("(exists ((y Int)) (and (<= y 17) (= (mod (+ y x) 37) 12)))")
    assert linearize_mod(f) is None


# properties


def n(k: int) -> str:
    return str(k) if k >= 0 else f"(- {-k})"


def _rand_case(rng):
    a_y = rng.choice([1, 2, 3, 5, -1, -2])
    a_m = rng.choice([1, 2, 3, -1, -3])
    M = rng.randint(2, 13)
    k = rng.randint(0, M - 1)
    c = rng.randint(-10, 10)
    r = rng.randint(-4, 4)
    s = r + rng.randint(0, 6)
    return a_y, a_m, M, k, c, r, s


@pytest.mark.parametrize("seed", range(6))
def test_linearize_equivalence_below(seed):
    rng = random.Random(seed)
    checked = 0
    for _ in range(40):
        a_y, a_m, M, k, c, r, s = _rand_case(rng)
        f = T(f"(exists ((y Int) (m Int)) (and (<= y {n(c)}) (<= x y) (<= {n(r)} m) (<= m {n(s)})"
              f" (= (mod (+ (* {n(a_y)} y) (* {n(a_m)} m)) {M}) {k})))", ("x",))
        g = linearize_mod(f, exact=True)
        if g is None:
            continue
        checked += 1
        assert same_models(f, g, ["x"], c - 3 * M - 5, c + 2, box=60), (to_text(f), to_text(g))
    assert checked > 5


@pytest.mark.parametrize("seed", range(4))
def test_linearize_equivalence_above(seed):
    rng = random.Random(100 + seed)
    checked = 0
    for _ in range(40):
        a_y, a_m, M, k, c, r, s = _rand_case(rng)
        f = T(f"(exists ((y Int) (m Int)) (and (>= y {n(c)}) (<= y x) (<= {n(r)} m) (<= m {n(s)})"
              f" (= (mod (+ (* {n(a_y)} y) (* {n(a_m)} m)) {M}) {k})))", ("x",))
        g = linearize_mod(f, exact=True)
        if g is None:
            continue
        checked += 1
        assert same_models(f, g, ["x"], c - 2, c + 3 * M + 5, box=60), (to_text(f), to_text(g))
    assert checked > 5


@given(st.integers(1, 7), st.integers(-7, 7).filter(bool), st.integers(2, 15),
       st.integers(-20, 20), st.integers(-10, 10), st.integers(-40, 0))
def test_window_holds_one_residue_class(a_y, a_m, M, c, m, y1_off):
    alpha = M // math.gcd(a_y, M)
    y1 = c + y1_off
    k = (a_y * y1 + a_m * m) % M
    witnesses = [y2 for y2 in range(c - alpha + 1, c + 1) if (a_y * y2 + a_m * m - k) % M == 0]
    assert witnesses and all((y2 - y1) % alpha == 0 for y2 in witnesses)


@given(st.integers(-6, 6),
       st.lists(st.tuples(st.sampled_from([-3, -2, -1, 1, 2, 3]), st.integers(-3, 0), st.integers(-8, 8)),
                max_size=3))
def test_dec_is_a_monotonicity_certificate(top, rows):
    f = mk_and([leq({"y": 1}, top)] + [leq({"x": a, "y": b}, c) for a, b, c in rows])
    d = dec(f, "y")
    assert d == top
    for x in range(-6, 7):
        assert not any(evaluate_qf(f, {"x": x, "y": y}) for y in range(d + 1, d + 20))
        # models only grow as y rises towards d
        for y1 in range(-12, d + 1):
            if evaluate_qf(f, {"x": x, "y": y1}):
                assert all(evaluate_qf(f, {"x": x, "y": y2}) for y2 in range(y1, d + 1))


@pytest.mark.parametrize("bound", [0, 1])
def test_instantiation_preserves_models(corpus, bound):
    from liaderiv.rewrite import rewrite
    cfg = InstantiationConfig(range_bound=bound, linearize_exact=True)
    hits = {}
    for f in corpus:
        g = rewrite(f)
        h = instantiate(g, cfg, hits)
        assert same_models(g, h, lo=-6, hi=6, box=12), to_text(g)
    assert sum(hits.values()) > 0


def test_substitution_of_dec_value_matches_exists():
    f = T("(exists ((y Int)) (and (<= (- x y) 33) (<= y 12) (= (mod y 7) 2)))")
    g = substitute(mk_and([leq({"x": 1, "y": -1}, 33), leq({"y": 1}, 12)]), "y", 9)
    assert same_models(f, g, ["x"], -30, 60, box=80)


def test_named_examples_are_sound():
    cases = [
        T("(exists ((y Int)) (and (<= (- x y) 1) (<= y (- 1)) (= (mod y 5) 0)))"),
        T("(exists ((y Int)) (and (<= y 2) (>= (* 2 y) 3) (= (+ x (* 3 y)) 42)))"),
    ]
    for f in cases:
        g = instantiate(f, InstantiationConfig())
        assert same_models(f, g, ["x"], -40, 60, box=80)
    assert cong({"x": 1}, 0, 1) is not None
