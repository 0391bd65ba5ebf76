from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import same_models, term
from liaderiv.errors import UndefinedSubstitution
from liaderiv.rewrite import simplify_bool
from liaderiv.formula import (
    BOT,
    TOP,
    Kind,
    Rel,
    canonicalize,
    cong,
    crt,
    decode,
    encode,
    eq,
    evaluate_qf,
    free_vars,
    leq,
    mk_and,
    mk_atom,
    mk_exists,
    mk_not,
    mk_or,
    substitute,
    to_text,
)


# encoding


@pytest.mark.parametrize("word,value", [("0101", -6), ("010", 2), ("0", 0), ("1", -1)])
def test_decode_examples(word, value):
    assert decode([int(b) for b in word]) == value


@pytest.mark.parametrize("value,word", [(2, "010"), (0, "0"), (-6, "0101"), (-1, "1"), (1, "10")])
def test_encode_examples(value, word):
    assert "".join(map(str, encode(value))) == word


def test_decode_rejects_empty():
    with pytest.raises(ValueError):
        decode([])


@given(st.integers(-10**12, 10**12))
def test_encode_roundtrip_and_shortest(v):
    w = encode(v)
    assert decode(w) == v
    # dropping the sign bit of a shortest word changes its value
    assert len(w) == 1 or decode(w[:-1]) != v


def test_sign_repetition_all_short_words():
    for n in range(1, 13):
        for w in itertools.product((0, 1), repeat=n):
            assert decode(w + (w[-1],)) == decode(w)


def test_encode_padded_length():
    assert encode(-6, 6) == (0, 1, 0, 1, 1, 1)
    assert decode(encode(5, 9)) == 5


def test_crt():
    assert crt(1, 4, 2, 6) is None
    assert crt(1, 4, 3, 6) == (9, 12)
    r, m = crt(2, 3, 3, 5)
    assert (m, r % 3, r % 5) == (15, 2, 3)


# construction and canonical forms


def test_free_vars_examples():
    assert free_vars(leq({"x": 1, "y": 2}, 1)) == {"x", "y"}
    assert free_vars(mk_exists(["y"], leq({"x": 1, "y": -1}, 1))) == {"x"}
    assert free_vars(BOT) == frozenset()


def test_hash_consing_and_child_order():
    a, b = leq({"y": 1}, 12), leq({"x": 1, "y": -1}, 33)
    assert mk_and([a, b]) is mk_and([b, a])
    assert mk_and([a, b, a]) is mk_and([a, b])
    assert mk_or([a]) is a
    assert mk_and([]) is TOP and mk_or([]) is BOT


def test_gcd_normalisation():
    assert leq({"x": 2, "y": 4}, 5) is leq({"x": 1, "y": 2}, 2)
    assert eq({"x": 2}, 3) is BOT
    assert eq({"x": -2, "y": 4}, 6) is eq({"x": 1, "y": -2}, -3)
    c = cong({"x": 4, "y": 6}, 2, 10)
    assert c.atom.modulus == 5
    assert 0 <= c.atom.const < c.atom.modulus
    assert cong({"x": 3}, 1, 3) is BOT
    assert cong({"x": 3}, 0, 3) is TOP


def test_constant_atoms_collapse():
    assert leq({}, 0) is TOP
    assert leq({}, -1) is BOT
    assert eq({"x": 0}, 0) is TOP


def test_exists_drops_vacuous_and_merges():
    body = leq({"x": 1}, 3)
    assert mk_exists(["y"], body) is body
    inner = mk_exists(["u"], leq({"u": 1, "v": 1, "x": 1}, 0))
    outer = mk_exists(["v"], inner)
    assert outer.kind is Kind.EXISTS and outer.bound == {"u", "v"}


def test_canonicalize_idempotent(small_corpus):
    for f in small_corpus:
        g = canonicalize(f)
        assert canonicalize(g) is g


def test_canonicalize_preserves_models(small_corpus):
    for f in small_corpus[:30]:
        assert same_models(f, canonicalize(f))


def test_to_text_examples():
    assert to_text(leq({"x": 1, "y": 2}, 2)) == "x + 2*y <= 2"
    assert to_text(cong({"x": 1}, 2, 7)) == "x == 2 (mod 7)"
    assert to_text(mk_exists(["y"], mk_and([leq({"x": 1, "y": -1}, 1), leq({"y": 1}, -1)]))) \
        == "exists y. (y <= -1 & x - y <= 1)"


def test_formula_is_not_picklable():
    import pickle
    with pytest.raises(TypeError):
        pickle.dumps(leq({"x": 1}, 0))


# substitution


def test_substitute_finite():
    f = mk_and([leq({"x": 1, "y": -1}, 33), leq({"y": 1}, 12)])
    # constants are evaluated in place; dropping the TOP is left to rewriting
    assert substitute(f, "y", 9) is mk_and([leq({"x": 1}, 42), TOP])
    assert simplify_bool(substitute(f, "y", 9)) is leq({"x": 1}, 42)
    assert substitute(eq({"x": 1, "y": 3}, 42), "y", 2) is eq({"x": 1}, 36)


def test_substitute_infinite():
    f = leq({"x": 1, "y": -3, "z": 1}, 0)
    assert substitute(f, "y", math.inf) is TOP
    assert substitute(leq({"y": 1}, 4), "y", -math.inf) is TOP
    with pytest.raises(UndefinedSubstitution):
        substitute(f, "y", -math.inf)
    with pytest.raises(UndefinedSubstitution):
        substitute(eq({"x": 1, "y": 1}, 0), "y", math.inf)
    with pytest.raises(UndefinedSubstitution):
        substitute(cong({"x": 1, "y": 1}, 0, 3), "y", math.inf)


def test_substitute_leaves_other_atoms():
    f = mk_and([leq({"x": 1}, 3), leq({"x": 1, "y": -1}, 0)])
    assert simplify_bool(substitute(f, "y", math.inf)) is leq({"x": 1}, 3)


@given(st.integers(-6, 6), st.integers(-3, 3), st.integers(-3, 3), st.integers(-9, 9),
       st.sampled_from([Rel.LEQ, Rel.EQ, Rel.CONG]), st.integers(2, 7))
def test_substitute_matches_conjoined_equality(k, a, b, c, rel, m):
    coeffs = {"x": a or 1, "y": b or 2}
    f = mk_and([mk_atom(coeffs, rel, c, m if rel is Rel.CONG else None), leq({"x": 1}, 5)])
    g = substitute(f, "y", k)
    assert "y" not in g.fv
    for x in range(-12, 13):
        assert evaluate_qf(g, {"x": x}) == evaluate_qf(f, {"x": x, "y": k})


def test_not_keeps_structure():
    a = leq({"x": 1}, 0)
    assert mk_not(a).kind is Kind.NOT
    assert term("(not (<= x 0))").kind is Kind.NOT
