from __future__ import annotations

import functools
import itertools
import time
from dataclasses import dataclass

import pytest
from hypothesis import settings

from liaderiv.corpus import random_corpus
from liaderiv.oracle import UNKNOWN, BruteForce
from liaderiv.smtlib import parse_term

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

CORPUS_SEED = 2024
CLASSIC_TIMEOUT = 20.0


def term(text: str, free=("x", "y", "z")):
    """Parse an SMT-LIB Boolean term over the given free Int variables."""
    return parse_term(text, free)


def table(f, variables, lo=-32, hi=32, box=None):
    """Truth table of ``f`` over a box of assignments (quantifiers range over ``box``)."""
    return _table(f, tuple(variables), lo, hi, box if box is not None else max(abs(lo), abs(hi)))


@functools.lru_cache(maxsize=4096)
def _table(f, variables, lo, hi, box):
    bf = BruteForce(box)
    return {vals: bf.eval(f, dict(zip(variables, vals)))
            for vals in itertools.product(range(lo, hi + 1), repeat=len(variables))}


def same_models(f, g, variables=None, lo=-8, hi=8, box=None) -> bool:
    """No assignment in the box where both sides are decided and disagree."""
    variables = sorted((f.fv | g.fv) if variables is None else variables)
    tf, tg = table(f, variables, lo, hi, box), table(g, variables, lo, hi, box)
    return all(a is UNKNOWN or b is UNKNOWN or a == b for a, b in zip(tf.values(), tg.values()))


def implies_in_box(f, g, variables=None, lo=-8, hi=8, box=None) -> bool:
    variables = sorted((f.fv | g.fv) if variables is None else variables)
    tf, tg = table(f, variables, lo, hi, box), table(g, variables, lo, hi, box)
    return not any(a is True and b is False for a, b in zip(tf.values(), tg.values()))


@pytest.fixture(scope="session")
def corpus():
    return random_corpus(CORPUS_SEED, 200)


@pytest.fixture(scope="session")
def small_corpus(corpus):
    return corpus[:60]


@dataclass
class CorpusRun:
    formula: object
    tracked: tuple
    classic: object  # None when the bottom-up build timed out
    optimized: object
    plain: object
    stats_optimized: object
    stats_plain: object


@pytest.fixture(scope="session")
def corpus_runs(corpus):
    """Classical, optimised and unoptimised automata for every corpus formula, plus wall time."""
    from liaderiv.config import SolverConfig
    from liaderiv.errors import Timeout
    from liaderiv.solver import RunStats, build

    def classic(f, tracked):
        # the bottom-up route can blow up on a few formulae; those keep None
        try:
            return build(f, tracked, SolverConfig(classic=True, timeout=CLASSIC_TIMEOUT))
        except Timeout:
            return None

    t0 = time.perf_counter()
    runs = []
    for f in corpus:
        tracked = tuple(sorted(f.fv))
        so, sp = RunStats(), RunStats()
        runs.append(CorpusRun(
            f, tracked,
            classic(f, tracked),
            build(f, tracked, SolverConfig(), so),
            build(f, tracked, SolverConfig().without_optimizations(), sp),
            so, sp,
        ))
    return runs, time.perf_counter() - t0


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
