"""The two-coin Frobenius problem as an LIA benchmark."""

from __future__ import annotations

import math

from .errors import NotCoprime
from .smtlib import Script, parse


def frobenius_text(a: int, b: int) -> str:
    """SMT-LIB script whose only model is the Frobenius number of ``a`` and ``b``.

    p is not representable as a*x + b*y with x, y >= 0, and every r >= 0
    that is not representable satisfies r <= p.
    """
    if a <= 0 or b <= 0 or math.gcd(a, b) != 1:
        raise NotCoprime(f"{a} and {b} must be coprime positive integers")
    return f"""(set-logic LIA)
(set-info :source |Frobenius coin problem for coins {a} and {b}|)
(declare-fun p () Int)
(assert (>= p 0))
(assert (forall ((x Int) (y Int))
  (=> (and (>= x 0) (>= y 0)) (distinct p (+ (* {a} x) (* {b} y))))))
(assert (forall ((r Int))
  (=> (and (>= r 0)
           (not (exists ((u Int) (v Int))
                  (and (>= u 0) (>= v 0) (= r (+ (* {a} u) (* {b} v)))))))
      (<= r p))))
(check-sat)
(get-model)
"""


def gen_frobenius(a: int, b: int) -> Script:
    return parse(frobenius_text(a, b))


def representable(n: int, a: int, b: int) -> bool:
    """Is ``n`` a non-negative combination of ``a`` and ``b``?"""
    return n >= 0 and any((n - a * x) % b == 0 for x in range(n // a + 1))


def frobenius_by_search(a: int, b: int) -> int:
    """Largest non-representable integer, by checking every value up to a*b."""
    if math.gcd(a, b) != 1:
        raise NotCoprime(f"{a} and {b} are not coprime")
    return max((n for n in range(a * b + 1) if not representable(n, a, b)), default=-1)


def coprime_pairs(lo: int = 2, hi: int = 11):
    return [(a, b) for a in range(lo, hi + 1) for b in range(a + 1, hi + 1) if math.gcd(a, b) == 1]
